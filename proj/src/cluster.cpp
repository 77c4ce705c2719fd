#include "losskit/cluster.hpp"

#include "losskit/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace losskit {

namespace {

std::pair<int, int> ordered(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

int parity_of(const std::vector<int>& outcomes, const std::vector<std::size_t>& steps) {
  int p = 0;
  for (std::size_t s : steps) p ^= outcomes.at(s);
  return p;
}

std::size_t index_of(const std::vector<int>& labels, int label) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw std::invalid_argument(fmt::format("qubit label {} is not present", label));
  return static_cast<std::size_t>(it - labels.begin());
}

void check_feedforward(const PauliFeedforward& ff, std::size_t limit, const std::vector<int>& labels) {
  if (ff.letter != 'X' && ff.letter != 'Z') {
    throw std::invalid_argument(fmt::format("feedforward letter must be X or Z, got '{}'", ff.letter));
  }
  index_of(labels, ff.qubit);
  for (std::size_t s : ff.steps) {
    if (s >= limit) throw std::invalid_argument(fmt::format("feedforward refers to step {} which is not earlier", s));
  }
}

}  // namespace

// --------------------------------------------------------------------- Graph

Graph::Graph(std::set<int> vertices, const std::vector<std::pair<int, int>>& edges) : vertices_(std::move(vertices)) {
  for (const auto& [a, b] : edges) add_edge(a, b);
}

Graph Graph::line(const std::vector<int>& labels) {
  Graph g;
  for (int v : labels) g.add_vertex(v);
  for (std::size_t i = 0; i + 1 < labels.size(); ++i) g.add_edge(labels[i], labels[i + 1]);
  return g;
}

Graph Graph::line(int k) {
  std::vector<int> labels(static_cast<std::size_t>(std::max(k, 0)));
  for (int i = 0; i < k; ++i) labels[static_cast<std::size_t>(i)] = i + 1;
  return line(labels);
}

Graph Graph::star(int center, const std::vector<int>& leaves) {
  Graph g;
  g.add_vertex(center);
  for (int leaf : leaves) {
    g.add_vertex(leaf);
    g.add_edge(center, leaf);
  }
  return g;
}

void Graph::require(int v) const {
  if (!has_vertex(v)) throw std::invalid_argument(fmt::format("vertex {} is not in the graph", v));
}

bool Graph::has_edge(int a, int b) const { return edges_.count(ordered(a, b)) > 0; }

std::vector<int> Graph::neighbors(int v) const {
  require(v);
  std::vector<int> out;
  for (const auto& [a, b] : edges_) {
    if (a == v) out.push_back(b);
    if (b == v) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Graph::position(int v) const {
  require(v);
  return static_cast<std::size_t>(std::distance(vertices_.begin(), vertices_.find(v)));
}

void Graph::add_vertex(int v) { vertices_.insert(v); }

void Graph::add_edge(int a, int b) {
  if (a == b) throw std::invalid_argument(fmt::format("self-loop on vertex {}", a));
  require(a);
  require(b);
  edges_.insert(ordered(a, b));
}

void Graph::toggle_edge(int a, int b) {
  if (has_edge(a, b)) {
    edges_.erase(ordered(a, b));
  } else {
    add_edge(a, b);
  }
}

void Graph::remove_vertex(int v) {
  require(v);
  vertices_.erase(v);
  std::erase_if(edges_, [v](const auto& e) { return e.first == v || e.second == v; });
}

// --------------------------------------------------------------- Graph states

StateVector graph_cluster_state(const Graph& g) {
  const std::size_t n = g.size();
  if (n == 0) throw std::invalid_argument("graph has no vertices");
  if (n > kMaxQubits) throw std::length_error(fmt::format("{} vertices exceeds the limit of {}", n, kMaxQubits));
  std::vector<std::pair<std::uint64_t, std::uint64_t>> masks;
  for (const auto& [a, b] : g.edges()) {
    masks.emplace_back(std::uint64_t{1} << (n - 1 - g.position(a)), std::uint64_t{1} << (n - 1 - g.position(b)));
  }
  const std::uint64_t dim = std::uint64_t{1} << n;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::uint64_t k = 0; k < dim; ++k) {
    int sign = 1;
    for (const auto& [ma, mb] : masks) {
      if ((k & ma) && (k & mb)) sign = -sign;
    }
    v(static_cast<Eigen::Index>(k)) = sign * amp;
  }
  return StateVector(std::move(v));
}

PauliString vertex_stabilizer(const Graph& g, int v) {
  std::vector<Pauli> letters(g.size(), Pauli::I);
  letters[g.position(v)] = Pauli::X;
  for (int w : g.neighbors(v)) letters[g.position(w)] = Pauli::Z;
  return PauliString(std::move(letters));
}

StateVector phi5() {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(32);
  for (int k : {0b00000, 0b01111, 0b10011, 0b11100}) v(k) = 0.5;
  return StateVector(std::move(v));
}

Graph phi5_graph() { return Graph::line(std::vector<int>{3, 2, 1, 4, 5}); }

// --------------------------------------------------------------- Rewrite rules

Graph graph_z_remove(const Graph& g, int v) {
  Graph out = g;
  out.remove_vertex(v);
  return out;
}

std::vector<int> z_removal_byproduct(const Graph& g, int v, int s) {
  if (s != 0 && s != 1) throw std::invalid_argument("outcome must be 0 or 1");
  return s ? g.neighbors(v) : std::vector<int>{};
}

namespace {

struct Segment {
  std::optional<int> a;  // outer neighbour of u
  std::optional<int> b;  // outer neighbour of v
};

Segment linear_segment(const Graph& g, int u, int v) {
  if (u == v) throw std::invalid_argument("contraction needs two distinct vertices");
  if (!g.has_edge(u, v)) throw std::invalid_argument(fmt::format("vertices {} and {} are not adjacent", u, v));
  const auto nu = g.neighbors(u);
  const auto nv = g.neighbors(v);
  if (nu.size() > 2 || nv.size() > 2) {
    throw std::invalid_argument("XX contraction is defined only on a linear segment (degrees <= 2)");
  }
  Segment seg;
  for (int w : nu) {
    if (w != v) seg.a = w;
  }
  for (int w : nv) {
    if (w != u) seg.b = w;
  }
  if (seg.a && seg.b && *seg.a == *seg.b) throw std::invalid_argument("XX contraction on a triangle is not linear");
  return seg;
}

}  // namespace

Graph graph_xx_contract(const Graph& g, int u, int v) {
  const Segment seg = linear_segment(g, u, v);
  Graph out = g;
  out.remove_vertex(u);
  out.remove_vertex(v);
  if (seg.a && seg.b) out.toggle_edge(*seg.a, *seg.b);
  return out;
}

std::vector<int> xx_contraction_byproduct(const Graph& g, int u, int v, int s_u, int s_v) {
  if ((s_u != 0 && s_u != 1) || (s_v != 0 && s_v != 1)) throw std::invalid_argument("outcomes must be 0 or 1");
  const Segment seg = linear_segment(g, u, v);
  std::vector<int> out;
  if (seg.a && s_v) out.push_back(*seg.a);
  if (seg.b && s_u) out.push_back(*seg.b);
  std::sort(out.begin(), out.end());
  return out;
}

IndirectResult indirect_z(const DensityMatrix& rho, std::size_t lost, std::size_t helper, OutcomeSource& source,
                          const MeasurementBasis& helper_basis, bool strict) {
  const std::size_t n = rho.num_qubits();
  if (lost >= n || helper >= n) throw std::out_of_range("indirect_z qubit index out of range");
  if (lost == helper) throw std::invalid_argument("helper must differ from the lost qubit");
  if (helper_basis.kind == MeasurementBasis::Kind::Equatorial) {
    throw std::invalid_argument("indirect measurement helper basis must be X or Z");
  }
  if (strict) {
    std::vector<Pauli> letters(n, Pauli::I);
    letters[lost] = Pauli::Z;
    letters[helper] = helper_basis.kind == MeasurementBasis::Kind::X ? Pauli::X : Pauli::Z;
    const double corr = expectation(rho, PauliString(std::move(letters)));
    if (corr < 1.0 - 1e-9) {
      throw std::invalid_argument(
          fmt::format("helper {} is not perfectly correlated with Z on qubit {} (<.> = {})", helper, lost, corr));
    }
  }
  const DensityMatrix erased = partial_trace(rho, {lost});
  const std::size_t pos = helper > lost ? helper - 1 : helper;
  MeasureResult r = measure(erased, pos, helper_basis, source);
  return IndirectResult{r.outcome, r.outcome, std::move(r.collapsed), r.probability};
}

// --------------------------------------------------------------- Patterns

void MeasurementPattern::validate(const std::vector<int>& labels) const {
  std::set<int> seen;
  for (int l : labels) {
    if (!seen.insert(l).second) throw std::invalid_argument(fmt::format("duplicate qubit label {}", l));
  }
  index_of(labels, output);
  std::set<int> measured;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const PatternStep& st = steps[i];
    index_of(labels, st.qubit);
    if (st.qubit == output) throw std::invalid_argument(fmt::format("step {} measures the output qubit", i));
    if (!measured.insert(st.qubit).second) {
      throw std::invalid_argument(fmt::format("qubit {} is measured twice", st.qubit));
    }
    for (std::size_t s : st.flip_angle_on) {
      if (s >= i) throw std::invalid_argument(fmt::format("step {} adapts on step {} which is not earlier", i, s));
    }
    for (const PauliFeedforward& ff : st.before) {
      check_feedforward(ff, i, labels);
      if (measured.count(ff.qubit) && ff.qubit != st.qubit) {
        throw std::invalid_argument(fmt::format("step {} corrects qubit {} after it was measured", i, ff.qubit));
      }
    }
  }
  for (const PauliFeedforward& ff : output_frame) {
    check_feedforward(ff, steps.size(), labels);
    if (ff.qubit != output) throw std::invalid_argument("output frame must act on the output qubit");
  }
}

std::string OneWayResult::branch_label() const {
  std::string s;
  for (int b : outcomes) s.push_back(b ? '1' : '0');
  return s.empty() ? "-" : s;
}

OneWayResult run_pattern(const DensityMatrix& rho, const std::vector<int>& labels, const MeasurementPattern& pattern,
                         OutcomeSource& source, const std::optional<StateVector>& target) {
  if (labels.size() != rho.num_qubits()) {
    throw std::invalid_argument(fmt::format("{} labels for a {}-qubit state", labels.size(), rho.num_qubits()));
  }
  pattern.validate(labels);

  DensityMatrix state = rho;
  std::vector<int> alive = labels;
  std::vector<int> outcomes;
  double probability = 1.0;
  auto apply_ff = [&](const PauliFeedforward& ff) {
    if (parity_of(outcomes, ff.steps)) state = apply_gate(state, Gate::from_letter(ff.letter), {index_of(alive, ff.qubit)});
  };

  for (const PatternStep& st : pattern.steps) {
    for (const PauliFeedforward& ff : st.before) apply_ff(ff);
    MeasurementBasis basis = st.basis;
    if (basis.kind == MeasurementBasis::Kind::Equatorial && parity_of(outcomes, st.flip_angle_on)) {
      basis.alpha = -basis.alpha;
    }
    const std::size_t pos = index_of(alive, st.qubit);
    MeasureResult r = measure(state, pos, basis, source);
    outcomes.push_back(r.outcome);
    probability *= r.probability;
    state = std::move(r.collapsed);
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(pos));
  }

  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < alive.size(); ++i) {
    if (alive[i] != pattern.output) rest.push_back(i);
  }
  if (!rest.empty()) {
    state = partial_trace(state, rest);
    alive = {pattern.output};
  }
  for (const PauliFeedforward& ff : pattern.output_frame) apply_ff(ff);

  OneWayResult result{outcomes, state, target, std::nullopt, probability};
  if (target) result.fidelity = fidelity_pure(*target, state);
  return result;
}

StateVector rotation_target(double alpha) {
  Eigen::VectorXcd v(2);
  v << 1.0, std::polar(1.0, -alpha);
  return StateVector::normalized(std::move(v));
}

MeasurementPattern loss_tolerant_pattern(int lost_photon, double alpha) {
  int remover = 0, redundant = 0, rotor = 0;
  if (lost_photon == 2) {
    remover = 3, redundant = 5, rotor = 4;
  } else if (lost_photon == 4) {
    remover = 5, redundant = 3, rotor = 2;
  } else {
    throw std::invalid_argument(fmt::format("no completing pattern for lost photon {}; supported: 2, 4", lost_photon));
  }
  MeasurementPattern p;
  p.steps.push_back({remover, MeasurementBasis::z(), {}, {}});
  p.steps.push_back({redundant, MeasurementBasis::x(), {}, {}});
  p.steps.push_back({rotor, MeasurementBasis::b(alpha), {}, {{rotor, 'X', {0}}, {rotor, 'Z', {1}}}});
  p.output = 1;
  p.output_frame = {{1, 'Z', {2}}};
  return p;
}

namespace {

std::pair<DensityMatrix, std::vector<int>> erased_phi5(int lost_photon, const NoiseSpec& noise,
                                                       const ChannelPlacement& placement) {
  if (lost_photon < 1 || lost_photon > 5) throw std::invalid_argument(fmt::format("no photon {}", lost_photon));
  const DensityMatrix noisy = apply_channel(DensityMatrix(phi5()), noise, placement);
  std::vector<int> labels;
  for (int p = 1; p <= 5; ++p) {
    if (p != lost_photon) labels.push_back(p);
  }
  return {partial_trace(noisy, {static_cast<std::size_t>(lost_photon - 1)}), labels};
}

}  // namespace

OneWayResult loss_tolerant_rotation(int lost_photon, double alpha, const NoiseSpec& noise, OutcomeSource& source,
                                    const ChannelPlacement& placement) {
  const MeasurementPattern pattern = loss_tolerant_pattern(lost_photon, alpha);
  const auto [rho, labels] = erased_phi5(lost_photon, noise, placement);
  return run_pattern(rho, labels, pattern, source, rotation_target(alpha));
}

std::vector<OneWayResult> loss_tolerant_branches(int lost_photon, double alpha, const NoiseSpec& noise,
                                                 const ChannelPlacement& placement) {
  const MeasurementPattern pattern = loss_tolerant_pattern(lost_photon, alpha);
  const auto [rho, labels] = erased_phi5(lost_photon, noise, placement);
  const StateVector target = rotation_target(alpha);
  const std::size_t k = pattern.steps.size();
  std::vector<OneWayResult> out;
  for (std::uint64_t branch = 0; branch < (std::uint64_t{1} << k); ++branch) {
    std::vector<int> bits(k);
    for (std::size_t i = 0; i < k; ++i) bits[i] = static_cast<int>((branch >> (k - 1 - i)) & 1U);
    auto source = OutcomeSource::forced(bits);
    try {
      out.push_back(run_pattern(rho, labels, pattern, source, target));
    } catch (const ZeroProbabilityOutcome&) {
      // Branch cannot occur.
    }
  }
  return out;
}

}  // namespace losskit
