#include "losskit/tomography.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>

namespace losskit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleResolution = 1e9;

int bit_at(std::uint64_t outcome, std::size_t n, std::size_t qubit) {
  return static_cast<int>((outcome >> (n - 1 - qubit)) & 1U);
}

std::string bits_string(std::uint64_t value, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t q = 0; q < n; ++q) {
    if (bit_at(value, n, q)) s[q] = '1';
  }
  return s;
}

// Dedupe key: -1 for Z, otherwise the angle on a 1e-9 grid.
std::vector<long long> setting_key(const std::vector<LocalBasis>& bases) {
  std::vector<long long> key;
  key.reserve(bases.size());
  for (const LocalBasis& b : bases) key.push_back(b.equatorial ? std::llround(b.angle * kAngleResolution) : -1);
  return key;
}

using SettingMap = std::map<std::vector<long long>, Setting>;

void add_term(SettingMap& settings, const std::vector<LocalBasis>& bases, MeasuredTerm term) {
  auto [it, inserted] = settings.try_emplace(setting_key(bases));
  if (inserted) it->second.bases = bases;
  it->second.terms.push_back(std::move(term));
}

// Pauli term read in a setting: Sign wherever the letter is not I.
MeasuredTerm pauli_measured(const PauliTerm& t) {
  MeasuredTerm m{t.coeff, std::vector<LocalOp>(t.op.size(), LocalOp::Identity), "P:" + t.op.letters_str()};
  for (std::size_t q = 0; q < t.op.size(); ++q) {
    if (t.op[q] != Pauli::I) m.ops[q] = LocalOp::Sign;
  }
  return m;
}

// Reduce angle to [0, pi); returns true when the observable changed sign.
bool reduce_angle(double& a) {
  a = std::fmod(a, 2 * kPi);
  if (a < 0) a += 2 * kPi;
  bool flipped = false;
  if (a >= kPi) {
    a -= kPi;
    flipped = true;
  }
  if (kPi - a < 1.0 / kAngleResolution) {
    a = 0.0;
    flipped = !flipped;
  }
  return flipped;
}

// Settings for the coherences of `proj` between x and x^S.
SettingMap equatorial_settings(const Eigen::MatrixXcd& proj, std::size_t n, std::uint64_t s_mask) {
  SettingMap out;
  const int k = std::popcount(s_mask);
  const std::uint64_t lead = std::uint64_t{1} << (63 - std::countl_zero(s_mask));
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < dim; ++x) {
    if (x & lead) continue;
    const std::uint64_t y = x ^ s_mask;
    const cplx c = proj(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    if (std::abs(c) < kZeroProbability) continue;
    // c|x><y| + h.c. = (|c|/k) sum_j (-1)^j prod_{i in S} M(sigma_i theta_j) prod_{i not in S} |x_i><x_i|,
    // theta_j = (-arg c + j pi)/k, sigma_i = (-1)^{x_i}.
    for (int j = 0; j < k; ++j) {
      const double theta = (-std::arg(c) + j * kPi) / k;
      double coeff = std::abs(c) / k * ((j % 2 == 0) ? 1.0 : -1.0);
      std::vector<LocalBasis> bases(n, LocalBasis::z());
      std::vector<LocalOp> ops(n);
      for (std::size_t q = 0; q < n; ++q) {
        const std::uint64_t m = std::uint64_t{1} << (n - 1 - q);
        if (s_mask & m) {
          double a = (x & m) ? -theta : theta;
          if (reduce_angle(a)) coeff = -coeff;
          bases[q] = LocalBasis::eq(a);
          ops[q] = LocalOp::Sign;
        } else {
          ops[q] = (x & m) ? LocalOp::Project1 : LocalOp::Project0;
        }
      }
      const std::string key = fmt::format("E:{}:{}:{}", bits_string(s_mask, n), bits_string(x, n), j);
      add_term(out, bases, MeasuredTerm{coeff, std::move(ops), key});
    }
  }
  return out;
}

double term_sum(const std::vector<const MeasuredTerm*>& terms, std::uint64_t outcome) {
  double g = 0.0;
  for (const MeasuredTerm* t : terms) g += t->value(outcome);
  return g;
}

}  // namespace

// ------------------------------------------------------------- Decomposition

Eigen::MatrixXcd PauliDecomposition::reconstruct() const {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const PauliTerm& t : terms) m += t.coeff * t.op.matrix();
  return m;
}

double PauliDecomposition::identity_coefficient() const {
  for (const PauliTerm& t : terms) {
    if (t.op.weight() == 0) return t.coeff;
  }
  return 0.0;
}

PauliDecomposition decompose_projector(const StateVector& psi) {
  const std::size_t n = psi.num_qubits();
  if (n > kMaxDecompositionQubits) {
    throw std::length_error(fmt::format("decomposition supports at most {} qubits, got {}", kMaxDecompositionQubits, n));
  }
  PauliDecomposition d;
  d.n_qubits = n;
  const double norm = 1.0 / static_cast<double>(std::uint64_t{1} << n);
  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  for (std::uint64_t code = 0; code < count; ++code) {
    std::vector<Pauli> letters(n);
    for (std::size_t q = 0; q < n; ++q) letters[q] = static_cast<Pauli>((code >> (2 * (n - 1 - q))) & 3U);
    PauliString p(std::move(letters));
    const double c = expectation(psi, p) * norm;
    if (std::abs(c) >= kZeroProbability) d.terms.push_back({c, std::move(p)});
  }
  return d;
}

// ------------------------------------------------------------------ Settings

LocalBasis LocalBasis::eq(double angle) {
  if (!(angle >= 0.0 && angle < kPi)) throw std::invalid_argument(fmt::format("angle {} outside [0, pi)", angle));
  return {true, angle};
}

std::string LocalBasis::label() const {
  if (!equatorial) return "Z";
  if (std::abs(angle) < 1.0 / kAngleResolution) return "X";
  if (std::abs(angle - kPi / 2) < 1.0 / kAngleResolution) return "Y";
  return fmt::format("M({:.6f})", angle);
}

MeasurementBasis LocalBasis::basis() const {
  return equatorial ? MeasurementBasis::b(angle) : MeasurementBasis::z();
}

double MeasuredTerm::value(std::uint64_t outcome) const {
  const std::size_t n = ops.size();
  double v = coeff;
  for (std::size_t q = 0; q < n; ++q) {
    const int b = bit_at(outcome, n, q);
    switch (ops[q]) {
      case LocalOp::Identity: break;
      case LocalOp::Sign: v = b ? -v : v; break;
      case LocalOp::Project0: if (b) return 0.0; break;
      case LocalOp::Project1: if (!b) return 0.0; break;
    }
  }
  return v;
}

std::string Setting::label() const {
  std::vector<std::string> parts;
  bool letters_only = true;
  for (const LocalBasis& b : bases) {
    parts.push_back(b.label());
    letters_only = letters_only && parts.back().size() == 1;
  }
  return fmt::format("{}", fmt::join(parts, letters_only ? "" : ","));
}

void CountsTable::write_csv(std::ostream& os, bool header) const {
  if (header) os << "setting,outcome,count\n";
  const std::string label = setting.label();
  const bool quote = label.find(',') != std::string::npos;
  for (std::uint64_t b = 0; b < counts.size(); ++b) {
    os << (quote ? "\"" + label + "\"" : label) << ',' << bits_string(b, setting.bases.size()) << ',' << counts[b]
       << '\n';
  }
}

std::vector<Setting> group_settings(const PauliDecomposition& d) {
  const std::size_t n = d.n_qubits;
  std::map<std::uint64_t, std::vector<const PauliTerm*>> by_support;
  for (const PauliTerm& t : d.terms) {
    if (t.op.weight() > 0) by_support[t.op.x_mask()].push_back(&t);
  }
  const Eigen::MatrixXcd proj = d.reconstruct();

  SettingMap all;
  for (const auto& [s_mask, terms] : by_support) {
    if (s_mask == 0) {
      for (const PauliTerm* t : terms) add_term(all, std::vector<LocalBasis>(n, LocalBasis::z()), pauli_measured(*t));
      continue;
    }
    SettingMap pauli;
    for (const PauliTerm* t : terms) {
      std::vector<LocalBasis> bases(n, LocalBasis::z());
      for (std::size_t q = 0; q < n; ++q) {
        if (t->op[q] == Pauli::X) bases[q] = LocalBasis::eq(0.0);
        if (t->op[q] == Pauli::Y) bases[q] = LocalBasis::eq(kPi / 2);
      }
      add_term(pauli, bases, pauli_measured(*t));
    }
    SettingMap equatorial = equatorial_settings(proj, n, s_mask);
    SettingMap& chosen = pauli.size() <= equatorial.size() ? pauli : equatorial;
    for (auto& [key, setting] : chosen) {
      for (MeasuredTerm& term : setting.terms) add_term(all, setting.bases, std::move(term));
    }
  }

  std::vector<Setting> out;
  out.reserve(all.size());
  for (auto& [key, setting] : all) out.push_back(std::move(setting));
  std::stable_sort(out.begin(), out.end(), [](const Setting& a, const Setting& b) { return a.label() < b.label(); });
  return out;
}

// ---------------------------------------------------------------- Sampling

std::vector<double> outcome_probabilities(const DensityMatrix& rho, const Setting& setting) {
  const std::size_t n = rho.num_qubits();
  if (setting.bases.size() != n) {
    throw std::invalid_argument(fmt::format("setting has {} bases for {} qubits", setting.bases.size(), n));
  }
  DensityMatrix r = rho;
  for (std::size_t q = 0; q < n; ++q) {
    if (setting.bases[q].equatorial) r = apply_unitary(r, setting.bases[q].basis().to_computational(), q);
  }
  std::vector<double> p(r.dim());
  double total = 0.0;
  for (std::uint64_t b = 0; b < r.dim(); ++b) total += (p[b] = std::max(0.0, r(b, b).real()));
  for (double& v : p) v /= total;
  return p;
}

CountsTable simulate_counts(const DensityMatrix& rho, const Setting& setting, std::uint64_t shots, Stream& stream) {
  if (shots == 0) throw std::invalid_argument("shots must be >= 1");
  const std::vector<double> p = outcome_probabilities(rho, setting);
  CountsTable table{setting, shots, std::vector<std::uint64_t>(p.size(), 0)};
  std::uint64_t remaining = shots;
  double mass = 1.0;
  for (std::size_t b = 0; b + 1 < p.size() && remaining > 0; ++b) {
    const double cond = mass > 0.0 ? std::clamp(p[b] / mass, 0.0, 1.0) : 0.0;
    table.counts[b] = stream.binomial(remaining, cond);
    remaining -= table.counts[b];
    mass -= p[b];
  }
  table.counts.back() += remaining;
  return table;
}

// ---------------------------------------------------------------- Estimation

FidelityEstimate estimate_fidelity(const std::vector<CountsTable>& tables, const PauliDecomposition& d) {
  std::set<std::string> required;
  for (const Setting& s : group_settings(d)) {
    for (const MeasuredTerm& t : s.terms) required.insert(t.key);
  }

  std::vector<const CountsTable*> order;
  for (const CountsTable& t : tables) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(),
                   [](const CountsTable* a, const CountsTable* b) { return a->setting.label() < b->setting.label(); });

  std::set<std::string> used;
  double f = d.identity_coefficient();
  double var = 0.0;
  for (const CountsTable* table : order) {
    std::vector<const MeasuredTerm*> mine;
    for (const MeasuredTerm& t : table->setting.terms) {
      if (required.count(t.key) && used.insert(t.key).second) mine.push_back(&t);
    }
    if (mine.empty()) continue;
    std::uint64_t total = 0;
    for (std::uint64_t c : table->counts) total += c;
    if (total == 0) throw std::invalid_argument(fmt::format("setting {} has no counts", table->setting.label()));
    const double N = static_cast<double>(total);
    double fs = 0.0;
    for (std::uint64_t b = 0; b < table->counts.size(); ++b) fs += table->counts[b] * term_sum(mine, b) / N;
    for (std::uint64_t b = 0; b < table->counts.size(); ++b) {
      const double dev = term_sum(mine, b) - fs;
      var += table->counts[b] * dev * dev / (N * N);
    }
    f += fs;
  }
  for (const std::string& key : required) {
    if (!used.count(key)) throw std::invalid_argument(fmt::format("term {} is not covered by any setting", key));
  }
  return {f, std::sqrt(var)};
}

double settings_fidelity(const DensityMatrix& rho, const PauliDecomposition& d) {
  if (rho.num_qubits() != d.n_qubits) throw std::invalid_argument("state and decomposition sizes differ");
  double f = d.identity_coefficient();
  for (const Setting& s : group_settings(d)) {
    std::vector<const MeasuredTerm*> terms;
    for (const MeasuredTerm& t : s.terms) terms.push_back(&t);
    const std::vector<double> p = outcome_probabilities(rho, s);
    for (std::uint64_t b = 0; b < p.size(); ++b) f += p[b] * term_sum(terms, b);
  }
  return f;
}

}  // namespace losskit
