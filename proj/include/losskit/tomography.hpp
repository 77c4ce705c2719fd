#pragma once

// Fidelity estimation from local measurement settings: Pauli decomposition of
// a target projector, grouping into settings, simulated counts and the linear
// estimator with Poisson error propagation.

#include "losskit/pauli.hpp"
#include "losskit/random.hpp"
#include "losskit/state.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace losskit {

struct PauliTerm {
  double coeff;
  PauliString op;
};

// |psi><psi| = sum_P c_P P with c_P = <psi|P|psi> / 2^n.
struct PauliDecomposition {
  std::size_t n_qubits = 0;
  std::vector<PauliTerm> terms;  // lexicographic in letters; identity first when present

  Eigen::MatrixXcd reconstruct() const;
  double identity_coefficient() const;
};

inline constexpr std::size_t kMaxDecompositionQubits = 6;

// Throws std::length_error above kMaxDecompositionQubits qubits.
PauliDecomposition decompose_projector(const StateVector& psi);

// Local measurement: Z, or the equatorial observable cos(a) X + sin(a) Y with
// a in [0, pi). Outcome 0 is the +1 eigenvector in both cases.
struct LocalBasis {
  bool equatorial = false;
  double angle = 0.0;

  static LocalBasis z() { return {false, 0.0}; }
  static LocalBasis eq(double angle);
  // "Z", "X" (a = 0), "Y" (a = pi/2), otherwise "M(a)" with six decimals.
  std::string label() const;
  MeasurementBasis basis() const;
};

// Per-qubit function of a measured bit.
enum class LocalOp { Identity, Sign, Project0, Project1 };

// coeff * prod_i op_i(b_i): one estimator summand read from a setting.
struct MeasuredTerm {
  double coeff;
  std::vector<LocalOp> ops;
  std::string key;  // identifies the term across settings

  double value(std::uint64_t outcome) const;
};

struct Setting {
  std::vector<LocalBasis> bases;
  std::vector<MeasuredTerm> terms;

  // Concatenated letters when every basis is Z, X or Y, else labels joined by ','.
  std::string label() const;
};

struct CountsTable {
  Setting setting;
  std::uint64_t shots = 0;
  std::vector<std::uint64_t> counts;  // indexed by outcome bits, qubit 0 most significant

  // One line per outcome: setting,outcome,count (with header when requested).
  void write_csv(std::ostream& os, bool header = true) const;
};

// Settings covering every non-identity term, sorted by label. Terms are grouped
// by their X/Y support S: S empty shares one all-Z setting; otherwise the
// cheaper of (a) one Pauli setting per distinct X/Y pattern on S, Z elsewhere,
// and (b) equatorial settings that read each coherence |x><x^S| + h.c. from
// |S| rotated angles. Ties choose (a).
// Coherences are read from the reconstructed projector.
std::vector<Setting> group_settings(const PauliDecomposition& d);

// Outcome distribution of `rho` under `setting`.
std::vector<double> outcome_probabilities(const DensityMatrix& rho, const Setting& setting);

// Multinomial sample via sequential binomials.
CountsTable simulate_counts(const DensityMatrix& rho, const Setting& setting, std::uint64_t shots, Stream& stream);

struct FidelityEstimate {
  double fidelity;
  double sigma;
};

// F = c_I + sum over settings of the empirical mean of that setting's terms.
// Tables are visited in label order and each term key is read from the first
// table carrying it. sigma^2 = sum_s sum_b N_b (g_s(b) - F_s)^2 / N_s^2 treats
// every count as an independent Poisson variable. Throws std::invalid_argument
// when a term required by group_settings(d) is in no table.
FidelityEstimate estimate_fidelity(const std::vector<CountsTable>& tables, const PauliDecomposition& d);

// The same estimator on exact outcome probabilities.
double settings_fidelity(const DensityMatrix& rho, const PauliDecomposition& d);

}  // namespace losskit
