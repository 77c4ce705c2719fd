// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "losskit/cluster.hpp"
#include "losskit/codes.hpp"
#include "losskit/recovery.hpp"
#include "losskit/tomography.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

using namespace losskit;

namespace {

constexpr double kPi = std::numbers::pi;
const double kS = 1.0 / std::numbers::sqrt2;

// Pinned tolerances.
constexpr double kRoundTripTol = 1e-9;
constexpr double kRoundTripSeconds = 10.0;
constexpr double kIdentityTol = 1e-10;
constexpr double kOneWayTol = 1e-9;
constexpr double kMagnitudeTol = 1e-9;
constexpr double kTomographyShots = 1e6;
constexpr int kTomographyTrials = 100;
constexpr int kTomographyMinWithin = 99;
constexpr double kTomographySigmas = 5.0;
constexpr double kSigmaScalingTol = 0.20;
constexpr double kGraphTol = 1e-9;
constexpr double kUnrecoverableBound = 0.854 + 0.02;
constexpr int kUnrecoverableInputs = 1000;

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  fmt::print("{} {}: {}\n", pass ? "PASS" : "FAIL", name, detail);
  if (!pass) ++failures;
}

void criterion(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [pass, detail] = body();
    report(name, pass, detail);
  } catch (const std::exception& e) {
    report(name, false, fmt::format("exception: {}", e.what()));
  }
}

StateVector vec(std::initializer_list<cplx> xs) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (cplx x : xs) v(i++) = x;
  return StateVector::normalized(v);
}

StateVector kron(const StateVector& a, const StateVector& b) { return a.tensor(b); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const CodeParams k22(2, 2);
const std::vector<LogicalInput> kPresets{LogicalInput::V(), LogicalInput::PLUS(), LogicalInput::R()};

std::pair<bool, std::string> round_trip() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  int cases = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Stream s(Seed{2024}, i);
    const LogicalInput in = LogicalInput::haar(s);
    const DensityMatrix rho(encode(in, k22));
    for (std::size_t q = 0; q < 4; ++q) {
      const RecoveryPlan plan = plan_recovery(k22, {{q}});
      const DensityMatrix erased = erase(rho, plan.pattern);
      for (int b = 0; b < 4; ++b) {
        auto src = OutcomeSource::forced({b >> 1, b & 1});
        const RecoveryRecord r = execute_recovery(erased, plan, src, in.state());
        worst = std::max(worst, std::abs(1.0 - *r.fidelity_vs_input));
        ++cases;
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {cases == 1600 && worst <= kRoundTripTol && secs < kRoundTripSeconds,
          fmt::format("{} cases, max |1-F| = {:.2e}, {:.2f} s", cases, worst, secs)};
}

std::pair<bool, std::string> stabilizer_suite() {
  double worst = 0.0;
  for (const auto& in : kPresets) {
    const DensityMatrix rho(encode(in, k22));
    for (const char* p : {"XXXX", "ZZZZ"}) worst = std::max(worst, std::abs(1.0 - expectation(rho, PauliString::parse(p))));
  }
  return {worst <= kIdentityTol, fmt::format("max |1-<XXXX>|, |1-<ZZZZ>| = {:.2e} over V, PLUS, R", worst)};
}

std::pair<bool, std::string> codeword_identities() {
  const StateVector phi_p = vec({kS, 0, 0, kS});
  const StateVector phi_m = vec({kS, 0, 0, -kS});
  Eigen::VectorXcd ghz = Eigen::VectorXcd::Zero(16);
  ghz(0) = ghz(15) = kS;
  const Eigen::VectorXcd r = kron(phi_p, phi_p).amplitudes() + cplx(0, 1) * kron(phi_m, phi_m).amplitudes();
  const std::vector<StateVector> expected{kron(phi_m, phi_m), StateVector(ghz), StateVector::normalized(r)};
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) worst = std::max(worst, std::abs(1.0 - fidelity_pure(encode(kPresets[i], k22), expected[i])));
  return {worst <= kIdentityTol, fmt::format("V = Phi-Phi-, PLUS = GHZ4, R = Phi+Phi+ + i Phi-Phi-; max |1-F| = {:.2e}", worst)};
}

std::pair<bool, std::string> setting_counts() {
  std::vector<std::size_t> got;
  for (const auto& in : kPresets) got.push_back(group_settings(decompose_projector(encode(in, k22))).size());
  got.push_back(group_settings(decompose_projector(phi5())).size());
  return {got == std::vector<std::size_t>{9, 5, 9, 15}, fmt::format("V {}, PLUS {}, R {}, phi5 {} (want 9, 5, 9, 15)",
                                                                    got[0], got[1], got[2], got[3])};
}

std::pair<bool, std::string> phi5_check() {
  const StateVector p = phi5();
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 32; ++k) {
    const bool support = k == 0b00000 || k == 0b01111 || k == 0b10011 || k == 0b11100;
    worst = std::max(worst, std::abs(p[k] - cplx(support ? 0.5 : 0.0, 0.0)));
  }
  StateVector h = graph_cluster_state(phi5_graph());
  for (std::size_t q : {0, 2, 4}) h = apply_gate(h, Gate::h(), {q});
  const double f = fidelity_pure(h, p);
  return {worst <= kIdentityTol && std::abs(1.0 - f) <= kIdentityTol,
          fmt::format("max amplitude error {:.2e}; F(H1 H3 H5 cluster, phi5) = {:.12f}", worst, f)};
}

std::pair<bool, std::string> oneway() {
  const std::vector<std::pair<double, StateVector>> named{
      {0.0, vec({kS, kS})}, {-kPi / 2, vec({kS, cplx(0, kS)})}, {-kPi / 3, vec({kS, std::polar(kS, kPi / 3)})}};
  double worst = 0.0;
  std::size_t branches = 0;
  auto check = [&](int lost, double alpha, const StateVector& target) {
    for (const OneWayResult& r : loss_tolerant_branches(lost, alpha, NoiseSpec{})) {
      worst = std::max(worst, std::abs(1.0 - fidelity_pure(target, r.output)));
      ++branches;
    }
  };
  for (int lost : {2, 4}) {
    for (const auto& [alpha, target] : named) check(lost, alpha, target);
  }
  const std::size_t named_branches = branches;
  Stream s(Seed{77}, 0);
  for (int i = 0; i < 20; ++i) {
    const double alpha = (2 * s.uniform() - 1) * kPi;
    const StateVector target = vec({kS, std::polar(kS, -alpha)});
    for (int lost : {2, 4}) check(lost, alpha, target);
  }
  return {named_branches == 48 && branches == 48 + 320 && worst <= kOneWayTol,
          fmt::format("{} branches (48 named, {} random alpha), max |1-F| = {:.2e}", branches, branches - 48, worst)};
}

std::pair<bool, std::string> magnitude() {
  const double v = 0.55;
  const NoiseSpec noise{v, 0.0, 1.0};
  double worst_code = 0.0, worst_rec = 0.0;
  double min_gap = 1.0;
  for (const auto& in : kPresets) {
    const StateVector ideal = encode(in, k22);
    const DensityMatrix rho = apply_channel(DensityMatrix(ideal), noise);
    const double fc = fidelity_pure(ideal, rho);
    worst_code = std::max(worst_code, std::abs(fc - (v + (1 - v) / 16)));
    for (std::size_t q = 0; q < 4; ++q) {
      double avg = 0.0;
      for (const auto& r : enumerate_branches(erase(rho, {{q}}), plan_recovery(k22, {{q}}), in.state())) {
        avg += r.probability * *r.fidelity_vs_input;
      }
      worst_rec = std::max(worst_rec, std::abs(avg - (1 + v) / 2));
      min_gap = std::min(min_gap, avg - fc);
    }
  }
  return {worst_code <= kMagnitudeTol && worst_rec <= kMagnitudeTol && min_gap > 0,
          fmt::format("codeword 0.578125 (err {:.1e}), recovered 0.775 (err {:.1e}), recovered - codeword >= {:.4f}",
                      worst_code, worst_rec, min_gap)};
}

std::pair<bool, std::string> tomography() {
  const StateVector target = phi5();
  const PauliDecomposition d = decompose_projector(target);
  const auto settings = group_settings(d);
  const DensityMatrix rho = apply_channel(DensityMatrix(target), NoiseSpec{0.8, 0.0, 0.9}, ChannelPlacement{{}, {0}});
  const double exact = fidelity_pure(target, rho);

  auto estimate = [&](std::uint64_t shots, std::uint64_t seed) {
    std::vector<CountsTable> tables;
    for (std::size_t i = 0; i < settings.size(); ++i) {
      Stream s(Seed{seed}, i);
      tables.push_back(simulate_counts(rho, settings[i], shots, s));
    }
    return estimate_fidelity(tables, d);
  };

  int within = 0;
  for (int t = 0; t < kTomographyTrials; ++t) {
    const FidelityEstimate e = estimate(static_cast<std::uint64_t>(kTomographyShots), 1000 + static_cast<std::uint64_t>(t));
    if (std::abs(e.fidelity - exact) <= kTomographySigmas * e.sigma) ++within;
  }

  // sigma * sqrt(N) against its value at the largest N.
  const double ref = estimate(1000000, 5000).sigma * 1000.0;
  double worst = 0.0;
  for (std::uint64_t n : {100ULL, 1000ULL, 10000ULL, 100000ULL, 1000000ULL}) {
    const double scaled = estimate(n, 6000 + n).sigma * std::sqrt(static_cast<double>(n));
    worst = std::max(worst, std::abs(scaled / ref - 1.0));
  }
  return {within >= kTomographyMinWithin && worst <= kSigmaScalingTol,
          fmt::format("exact F = {:.6f}; {}/{} trials within 5 sigma at 1e6 shots; max sigma*sqrt(N) deviation {:.1f}%",
                      exact, within, kTomographyTrials, 100 * worst)};
}

std::pair<bool, std::string> graph_rules() {
  std::vector<Graph> graphs;
  for (int k = 2; k <= 7; ++k) {
    graphs.push_back(Graph::line(k));
    std::vector<int> leaves;
    for (int l = 2; l <= k; ++l) leaves.push_back(l);
    graphs.push_back(Graph::star(1, leaves));
  }
  Stream s(Seed{99}, 0);
  for (int t = 0; t < 40; ++t) {
    const int n = 3 + t % 5;
    Graph g;
    g.add_vertex(1);
    for (int v = 2; v <= n; ++v) {
      g.add_vertex(v);
      g.add_edge(v, 1 + static_cast<int>(s.uniform() * (v - 1)));
    }
    graphs.push_back(g);
  }

  auto with_z = [](StateVector psi, const Graph& g, const std::vector<int>& labels) {
    for (int l : labels) psi = apply_gate(psi, Gate::z(), {g.position(l)});
    return psi;
  };
  double worst = 0.0;
  std::size_t z_checks = 0, xx_checks = 0;
  for (const Graph& g : graphs) {
    const DensityMatrix rho(graph_cluster_state(g));
    for (int v : g.vertices()) {
      const Graph reduced = graph_z_remove(g, v);
      for (int out = 0; out < 2; ++out) {
        const MeasureResult m = measure(rho, g.position(v), MeasurementBasis::z(), out);
        const StateVector expected = with_z(graph_cluster_state(reduced), reduced, z_removal_byproduct(g, v, out));
        worst = std::max(worst, std::abs(1.0 - fidelity_pure(expected, m.collapsed)));
        ++z_checks;
      }
    }
    for (const auto& [u0, v0] : g.edges()) {
      for (const auto& [u, v] : {std::pair{u0, v0}, std::pair{v0, u0}}) {
        if (g.degree(u) > 2 || g.degree(v) > 2 || g.size() < 3) continue;
        Graph reduced;
        try {
          reduced = graph_xx_contract(g, u, v);
        } catch (const std::invalid_argument&) {
          continue;  // triangle
        }
        for (int su = 0; su < 2; ++su) {
          for (int sv = 0; sv < 2; ++sv) {
            const MeasureResult mu = measure(rho, g.position(u), MeasurementBasis::x(), su);
            const std::size_t pv = g.position(v) - (g.position(v) > g.position(u) ? 1 : 0);
            const MeasureResult mv = measure(mu.collapsed, pv, MeasurementBasis::x(), sv);
            const StateVector expected =
                with_z(graph_cluster_state(reduced), reduced, xx_contraction_byproduct(g, u, v, su, sv));
            worst = std::max(worst, std::abs(1.0 - fidelity_pure(expected, mv.collapsed)));
            ++xx_checks;
          }
        }
      }
    }
  }
  return {worst <= kGraphTol && xx_checks > 0,
          fmt::format("{} graphs, {} Z removals, {} XX contractions, max |1-F| = {:.2e}", graphs.size(), z_checks,
                      xx_checks, worst)};
}

std::pair<bool, std::string> unrecoverability() {
  bool predicate = true;
  double worst_avg = 0.0;
  for (const LossPattern& loss : {LossPattern{{0, 1}}, LossPattern{{2, 3}}}) {
    predicate = predicate && !recoverable(k22, loss);
    const RecoveryPlan plan = plan_best_effort(k22, loss);
    double sum = 0.0;
    for (int i = 0; i < kUnrecoverableInputs; ++i) {
      Stream s(Seed{31337}, static_cast<std::uint64_t>(i));
      const LogicalInput in = LogicalInput::haar(s);
      for (const auto& r : enumerate_branches(erase(DensityMatrix(encode(in, k22)), loss), plan, in.state())) {
        sum += r.probability * *r.fidelity_vs_input;
      }
    }
    worst_avg = std::max(worst_avg, sum / kUnrecoverableInputs);
  }
  return {predicate && worst_avg <= kUnrecoverableBound,
          fmt::format("recoverable() false for both full-block losses; best-effort mean F = {:.4f} (bound {:.3f})",
                      worst_avg, kUnrecoverableBound)};
}

std::pair<bool, std::string> cli_determinism() {
  const std::filesystem::path golden(LOSSKIT_GOLDEN_DIR);
  const auto dir = std::filesystem::temp_directory_path() / "losskit_acceptance";
  std::filesystem::create_directories(dir);
  bool ok = true;
  std::vector<std::string> notes;
  for (const std::string name : {"recover_small", "oneway_small"}) {
    const std::string cmd = name.substr(0, name.find('_'));
    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
      const auto out = dir / fmt::format("{}_{}.csv", name, run);
      const int status = std::system(fmt::format("\"{}\" {} --config \"{}\" --out \"{}\"", LOSSKIT_CLI, cmd,
                                                 (golden / (name + ".yaml")).string(), out.string())
                                         .c_str());
      ok = ok && status == 0;
      outputs.push_back(slurp(out));
    }
    const bool same = outputs[0] == outputs[1] && !outputs[0].empty();
    const bool matches = outputs[0] == slurp(golden / (name + ".csv"));
    ok = ok && same && matches;
    notes.push_back(fmt::format("{} identical={} golden={}", name, same, matches));
  }
  return {ok, fmt::format("{}", fmt::join(notes, "; "))};
}

}  // namespace

int main() {
  criterion("noiseless round trip", round_trip);
  criterion("stabilizer suite", stabilizer_suite);
  criterion("codeword identities", codeword_identities);
  criterion("setting counts", setting_counts);
  criterion("five-photon state", phi5_check);
  criterion("one-way loss tolerance", oneway);
  criterion("noise magnitude", magnitude);
  criterion("tomography estimator", tomography);
  criterion("graph-rule equivalence", graph_rules);
  criterion("unrecoverability", unrecoverability);
  criterion("cli determinism", cli_determinism);
  return failures == 0 ? 0 : 1;
}
