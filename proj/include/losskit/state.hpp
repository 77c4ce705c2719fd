#pragma once

// Dense pure and mixed n-qubit states.
//
// Conventions shared by every module:
//   * qubit 0 is the most significant bit of a basis index;
//   * |0> = |H>, |1> = |V>, |+> is the +1 eigenvector of X;
//   * Rz(a) = diag(exp(-i a/2), exp(+i a/2)).

#include "losskit/pauli.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace losskit {

using cplx = std::complex<double>;

inline constexpr double kAlgebraTol = 1e-10;
inline constexpr double kEigenFloor = -1e-9;
inline constexpr double kZeroProbability = 1e-12;
inline constexpr std::size_t kMaxQubits = 12;

class OutcomeSource;

class StateVector {
 public:
  // Throws unless the length is a power of two and the norm is 1 within 1e-10.
  explicit StateVector(Eigen::VectorXcd amplitudes);

  static StateVector normalized(Eigen::VectorXcd amplitudes);
  static StateVector basis(std::size_t n_qubits, std::uint64_t index);
  // "0110" -> |0110>.
  static StateVector from_bits(std::string_view bits);
  static StateVector plus(std::size_t n_qubits);

  std::size_t num_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  cplx operator[](std::uint64_t index) const { return amps_(static_cast<Eigen::Index>(index)); }

  // <this|other>
  cplx inner(const StateVector& other) const;
  StateVector tensor(const StateVector& other) const;

 private:
  std::size_t n_qubits_ = 0;
  Eigen::VectorXcd amps_;
};

class DensityMatrix {
 public:
  // Throws unless square with power-of-two dimension, Hermitian within 1e-9
  // and of unit trace within 1e-9. Positivity is checked by `is_valid`.
  explicit DensityMatrix(Eigen::MatrixXcd matrix);
  explicit DensityMatrix(const StateVector& psi);

  static DensityMatrix maximally_mixed(std::size_t n_qubits);

  std::size_t num_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  cplx operator()(std::uint64_t r, std::uint64_t c) const {
    return rho_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  double trace() const { return rho_.trace().real(); }
  double purity() const;
  double min_eigenvalue() const;
  // Hermitian, unit trace and eigenvalues >= -1e-9.
  bool is_valid(double tol = kAlgebraTol) const;

 private:
  std::size_t n_qubits_ = 0;
  Eigen::MatrixXcd rho_;
};

enum class GateKind { H, X, Y, Z, Rz, CNOT, CZ };

struct Gate {
  GateKind kind;
  double angle = 0.0;

  static Gate h() { return {GateKind::H}; }
  static Gate x() { return {GateKind::X}; }
  static Gate y() { return {GateKind::Y}; }
  static Gate z() { return {GateKind::Z}; }
  static Gate rz(double a) { return {GateKind::Rz, a}; }
  static Gate cnot() { return {GateKind::CNOT}; }
  static Gate cz() { return {GateKind::CZ}; }
  static Gate from_letter(char c);

  std::size_t arity() const;
  Gate adjoint() const;
  // Only for single-qubit gates.
  Eigen::Matrix2cd matrix() const;
};

// For CNOT the targets are {control, target}.
StateVector apply_gate(const StateVector& psi, const Gate& gate, const std::vector<std::size_t>& targets);
DensityMatrix apply_gate(const DensityMatrix& rho, const Gate& gate, const std::vector<std::size_t>& targets);

// Arbitrary 2x2 unitary on one qubit; no unitarity check.
StateVector apply_unitary(const StateVector& psi, const Eigen::Matrix2cd& u, std::size_t qubit);
DensityMatrix apply_unitary(const DensityMatrix& rho, const Eigen::Matrix2cd& u, std::size_t qubit);

StateVector apply_pauli(const StateVector& psi, const PauliString& p);
DensityMatrix apply_pauli(const DensityMatrix& rho, const PauliString& p);

// Kept qubits are renumbered in ascending original order.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& discard);

// Single-qubit projective basis. Outcome 0 is |0>, |+> or |+a> = (|0> + e^{ia}|1>)/sqrt2.
struct MeasurementBasis {
  enum class Kind { Z, X, Equatorial };
  Kind kind = Kind::Z;
  double alpha = 0.0;

  static MeasurementBasis z() { return {Kind::Z, 0.0}; }
  static MeasurementBasis x() { return {Kind::X, 0.0}; }
  static MeasurementBasis b(double alpha) { return {Kind::Equatorial, alpha}; }

  // Basis vector for `outcome` as a 2-vector.
  Eigen::Vector2cd vector(int outcome) const;
  // Unitary taking the outcome-0 vector to |0> and the outcome-1 vector to |1>.
  Eigen::Matrix2cd to_computational() const;
  std::string label() const;
};

struct MeasureResult {
  int outcome;
  DensityMatrix collapsed;  // measured qubit removed
  double probability;
};

// Probability of outcome 0 when measuring `qubit` in `basis`.
double outcome_zero_probability(const DensityMatrix& rho, std::size_t qubit, const MeasurementBasis& basis);

MeasureResult measure(const DensityMatrix& rho, std::size_t qubit, const MeasurementBasis& basis, int forced_outcome);
MeasureResult measure(const DensityMatrix& rho, std::size_t qubit, const MeasurementBasis& basis, OutcomeSource& source);

// Tr(rho P). Real part only; exact for Hermitian P.
double expectation(const DensityMatrix& rho, const PauliString& p);
cplx trace_with(const DensityMatrix& rho, const PauliString& p);
double expectation(const StateVector& psi, const PauliString& p);

// <psi|rho|psi>
double fidelity_pure(const StateVector& psi, const DensityMatrix& rho);
// |<a|b>|^2
double fidelity_pure(const StateVector& a, const StateVector& b);

}  // namespace losskit
