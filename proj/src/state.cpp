#include "losskit/state.hpp"

#include "losskit/error.hpp"
#include "losskit/random.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace losskit {

namespace {

using Index = Eigen::Index;

std::size_t qubits_for_dim(std::uint64_t dim) {
  if (dim == 0 || !std::has_single_bit(dim)) {
    throw std::invalid_argument(fmt::format("dimension {} is not a power of two", dim));
  }
  return static_cast<std::size_t>(std::countr_zero(dim));
}

std::uint64_t bit_of(std::size_t n, std::size_t qubit) { return std::uint64_t{1} << (n - 1 - qubit); }

void check_targets(std::size_t n, const Gate& gate, const std::vector<std::size_t>& targets) {
  if (targets.size() != gate.arity()) {
    throw std::invalid_argument(fmt::format("gate expects {} target(s), got {}", gate.arity(), targets.size()));
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= n) throw std::out_of_range(fmt::format("qubit {} out of range for {} qubits", targets[i], n));
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) throw std::invalid_argument("duplicate gate targets");
    }
  }
}

template <typename Vec>
void apply_single(Vec&& v, const Eigen::Matrix2cd& u, std::size_t n, std::size_t qubit) {
  const std::uint64_t mask = bit_of(n, qubit);
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t i0 = 0; i0 < dim; ++i0) {
    if (i0 & mask) continue;
    const std::uint64_t i1 = i0 | mask;
    const cplx a = v(static_cast<Index>(i0));
    const cplx b = v(static_cast<Index>(i1));
    v(static_cast<Index>(i0)) = u(0, 0) * a + u(0, 1) * b;
    v(static_cast<Index>(i1)) = u(1, 0) * a + u(1, 1) * b;
  }
}

template <typename Vec>
void apply_two(Vec&& v, GateKind kind, std::size_t n, std::size_t q0, std::size_t q1) {
  const std::uint64_t m0 = bit_of(n, q0);
  const std::uint64_t m1 = bit_of(n, q1);
  const std::uint64_t dim = std::uint64_t{1} << n;
  if (kind == GateKind::CZ) {
    for (std::uint64_t i = 0; i < dim; ++i) {
      if ((i & m0) && (i & m1)) v(static_cast<Index>(i)) = -v(static_cast<Index>(i));
    }
    return;
  }
  // CNOT: control q0, target q1.
  for (std::uint64_t i = 0; i < dim; ++i) {
    if ((i & m0) && !(i & m1)) std::swap(v(static_cast<Index>(i)), v(static_cast<Index>(i | m1)));
  }
}

template <typename Vec>
void apply_gate_inplace(Vec&& v, const Gate& gate, std::size_t n, const std::vector<std::size_t>& targets) {
  if (gate.arity() == 1) {
    apply_single(v, gate.matrix(), n, targets[0]);
  } else {
    apply_two(v, gate.kind, n, targets[0], targets[1]);
  }
}

// rho -> U rho U^dagger, with `left` applying U to a column vector.
template <typename F>
Eigen::MatrixXcd conjugate(const Eigen::MatrixXcd& rho, F&& left) {
  Eigen::MatrixXcd m = rho;
  for (Index c = 0; c < m.cols(); ++c) left(m.col(c));
  m.adjointInPlace();
  for (Index c = 0; c < m.cols(); ++c) left(m.col(c));
  m.adjointInPlace();
  return m;
}

}  // namespace

// ---------------------------------------------------------------- StateVector

StateVector::StateVector(Eigen::VectorXcd amplitudes) : amps_(std::move(amplitudes)) {
  n_qubits_ = qubits_for_dim(static_cast<std::uint64_t>(amps_.size()));
  if (n_qubits_ > kMaxQubits) throw std::length_error(fmt::format("{} qubits exceeds the limit of {}", n_qubits_, kMaxQubits));
  const double norm2 = amps_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kAlgebraTol) {
    throw std::invalid_argument(fmt::format("state vector is not normalized (|psi|^2 = {})", norm2));
  }
}

StateVector StateVector::normalized(Eigen::VectorXcd amplitudes) {
  const double norm = amplitudes.norm();
  if (norm < 1e-300) throw std::invalid_argument("cannot normalize the zero vector");
  return StateVector(amplitudes / norm);
}

StateVector StateVector::basis(std::size_t n_qubits, std::uint64_t index) {
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  if (index >= dim) throw std::out_of_range("basis index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Index>(dim));
  v(static_cast<Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

StateVector StateVector::from_bits(std::string_view bits) {
  std::uint64_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("basis label must contain only 0/1");
    index = (index << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return basis(bits.size(), index);
}

StateVector StateVector::plus(std::size_t n_qubits) {
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  return StateVector(Eigen::VectorXcd::Constant(static_cast<Index>(dim), 1.0 / std::sqrt(static_cast<double>(dim))));
}

cplx StateVector::inner(const StateVector& other) const {
  if (dim() != other.dim()) throw std::invalid_argument("dimension mismatch in inner product");
  return amps_.dot(other.amps_);
}

StateVector StateVector::tensor(const StateVector& other) const {
  Eigen::VectorXcd out(amps_.size() * other.amps_.size());
  for (Index i = 0; i < amps_.size(); ++i) out.segment(i * other.amps_.size(), other.amps_.size()) = amps_(i) * other.amps_;
  return StateVector(std::move(out));
}

// -------------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(Eigen::MatrixXcd matrix) : rho_(std::move(matrix)) {
  if (rho_.rows() != rho_.cols()) throw std::invalid_argument("density matrix must be square");
  n_qubits_ = qubits_for_dim(static_cast<std::uint64_t>(rho_.rows()));
  if (n_qubits_ > kMaxQubits) throw std::length_error(fmt::format("{} qubits exceeds the limit of {}", n_qubits_, kMaxQubits));
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-9) throw std::invalid_argument(fmt::format("density matrix is not Hermitian (deviation {})", herm));
  const double tr = rho_.trace().real();
  if (std::abs(tr - 1.0) > 1e-9) throw std::invalid_argument(fmt::format("density matrix trace is {}, expected 1", tr));
}

DensityMatrix::DensityMatrix(const StateVector& psi)
    : DensityMatrix(Eigen::MatrixXcd(psi.amplitudes() * psi.amplitudes().adjoint())) {}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n_qubits) {
  const Index dim = Index{1} << n_qubits;
  return DensityMatrix(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim)));
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool DensityMatrix::is_valid(double tol) const {
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(trace() - 1.0) > tol) return false;
  return min_eigenvalue() >= kEigenFloor;
}

// ---------------------------------------------------------------------- Gates

Gate Gate::from_letter(char c) {
  switch (c) {
    case 'H': return h();
    case 'X': return x();
    case 'Y': return y();
    case 'Z': return z();
    default: throw std::invalid_argument(fmt::format("no single-qubit gate named '{}'", c));
  }
}

std::size_t Gate::arity() const { return (kind == GateKind::CNOT || kind == GateKind::CZ) ? 2 : 1; }

Gate Gate::adjoint() const { return kind == GateKind::Rz ? rz(-angle) : *this; }

Eigen::Matrix2cd Gate::matrix() const {
  Eigen::Matrix2cd m;
  const double s = 1.0 / std::numbers::sqrt2;
  switch (kind) {
    case GateKind::H: m << s, s, s, -s; break;
    case GateKind::X: m << 0, 1, 1, 0; break;
    case GateKind::Y: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case GateKind::Z: m << 1, 0, 0, -1; break;
    case GateKind::Rz: m << std::polar(1.0, -angle / 2), 0, 0, std::polar(1.0, angle / 2); break;
    default: throw std::invalid_argument("two-qubit gate has no 2x2 matrix");
  }
  return m;
}

StateVector apply_gate(const StateVector& psi, const Gate& gate, const std::vector<std::size_t>& targets) {
  check_targets(psi.num_qubits(), gate, targets);
  Eigen::VectorXcd v = psi.amplitudes();
  apply_gate_inplace(v, gate, psi.num_qubits(), targets);
  return StateVector::normalized(std::move(v));
}

DensityMatrix apply_gate(const DensityMatrix& rho, const Gate& gate, const std::vector<std::size_t>& targets) {
  const std::size_t n = rho.num_qubits();
  check_targets(n, gate, targets);
  return DensityMatrix(conjugate(rho.matrix(), [&](auto col) { apply_gate_inplace(col, gate, n, targets); }));
}

StateVector apply_unitary(const StateVector& psi, const Eigen::Matrix2cd& u, std::size_t qubit) {
  if (qubit >= psi.num_qubits()) throw std::out_of_range("qubit index out of range");
  Eigen::VectorXcd v = psi.amplitudes();
  apply_single(v, u, psi.num_qubits(), qubit);
  return StateVector::normalized(std::move(v));
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Eigen::Matrix2cd& u, std::size_t qubit) {
  const std::size_t n = rho.num_qubits();
  if (qubit >= n) throw std::out_of_range("qubit index out of range");
  return DensityMatrix(conjugate(rho.matrix(), [&](auto col) { apply_single(col, u, n, qubit); }));
}

StateVector apply_pauli(const StateVector& psi, const PauliString& p) {
  if (p.size() != psi.num_qubits()) throw std::invalid_argument("Pauli string length does not match state");
  const std::uint64_t xm = p.x_mask();
  Eigen::VectorXcd out(psi.amplitudes().size());
  for (std::uint64_t k = 0; k < psi.dim(); ++k) out(static_cast<Index>(k ^ xm)) = p.amplitude_factor(k) * psi[k];
  return StateVector::normalized(std::move(out));
}

DensityMatrix apply_pauli(const DensityMatrix& rho, const PauliString& p) {
  if (p.size() != rho.num_qubits()) throw std::invalid_argument("Pauli string length does not match state");
  const std::uint64_t xm = p.x_mask();
  const std::uint64_t dim = rho.dim();
  Eigen::MatrixXcd out(rho.matrix().rows(), rho.matrix().cols());
  for (std::uint64_t r = 0; r < dim; ++r) {
    const cplx fr = p.amplitude_factor(r);
    for (std::uint64_t c = 0; c < dim; ++c) {
      out(static_cast<Index>(r ^ xm), static_cast<Index>(c ^ xm)) = fr * std::conj(p.amplitude_factor(c)) * rho(r, c);
    }
  }
  return DensityMatrix(std::move(out));
}

// -------------------------------------------------------------- Partial trace

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& discard) {
  const std::size_t n = rho.num_qubits();
  std::vector<bool> drop(n, false);
  for (std::size_t q : discard) {
    if (q >= n) throw std::out_of_range(fmt::format("qubit {} out of range for {} qubits", q, n));
    drop[q] = true;
  }
  std::vector<std::size_t> kept, gone;
  for (std::size_t q = 0; q < n; ++q) (drop[q] ? gone : kept).push_back(q);
  if (kept.empty()) throw std::invalid_argument("cannot trace out every qubit");
  if (gone.empty()) return rho;

  auto spread = [n](const std::vector<std::size_t>& qubits) {
    std::vector<std::uint64_t> table(std::size_t{1} << qubits.size(), 0);
    for (std::uint64_t a = 0; a < table.size(); ++a) {
      std::uint64_t full = 0;
      for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (a & (std::uint64_t{1} << (qubits.size() - 1 - i))) full |= bit_of(n, qubits[i]);
      }
      table[a] = full;
    }
    return table;
  };
  const auto keep_idx = spread(kept);
  const auto gone_idx = spread(gone);

  const Index dk = static_cast<Index>(keep_idx.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (Index a = 0; a < dk; ++a) {
    for (Index b = 0; b < dk; ++b) {
      cplx sum = 0.0;
      for (std::uint64_t e : gone_idx) sum += rho(keep_idx[a] | e, keep_idx[b] | e);
      out(a, b) = sum;
    }
  }
  return DensityMatrix(std::move(out));
}

// ---------------------------------------------------------------- Measurement

Eigen::Vector2cd MeasurementBasis::vector(int outcome) const {
  const double s = 1.0 / std::numbers::sqrt2;
  const double sign = outcome == 0 ? 1.0 : -1.0;
  Eigen::Vector2cd v;
  switch (kind) {
    case Kind::Z:
      v << (outcome == 0 ? 1.0 : 0.0), (outcome == 0 ? 0.0 : 1.0);
      break;
    case Kind::X:
      v << s, sign * s;
      break;
    case Kind::Equatorial:
      v << s, sign * s * std::polar(1.0, alpha);
      break;
  }
  return v;
}

Eigen::Matrix2cd MeasurementBasis::to_computational() const {
  Eigen::Matrix2cd u;
  u.row(0) = vector(0).adjoint();
  u.row(1) = vector(1).adjoint();
  return u;
}

std::string MeasurementBasis::label() const {
  switch (kind) {
    case Kind::Z: return "Z";
    case Kind::X: return "X";
    case Kind::Equatorial: return fmt::format("B({:.6f})", alpha);
  }
  return "?";
}

double outcome_zero_probability(const DensityMatrix& rho, std::size_t qubit, const MeasurementBasis& basis) {
  const std::size_t n = rho.num_qubits();
  if (qubit >= n) throw std::out_of_range(fmt::format("qubit {} out of range for {} qubits", qubit, n));
  // <b0| rho_q |b0> with rho_q the single-qubit marginal.
  const Eigen::Vector2cd b0 = basis.vector(0);
  const std::uint64_t mask = bit_of(n, qubit);
  cplx r00 = 0.0, r01 = 0.0, r11 = 0.0;
  for (std::uint64_t i = 0; i < rho.dim(); ++i) {
    if (i & mask) continue;
    r00 += rho(i, i);
    r01 += rho(i, i | mask);
    r11 += rho(i | mask, i | mask);
  }
  const cplx p = std::conj(b0(0)) * r00 * b0(0) + std::conj(b0(0)) * r01 * b0(1) +
                 std::conj(b0(1)) * std::conj(r01) * b0(0) + std::conj(b0(1)) * r11 * b0(1);
  return std::clamp(p.real(), 0.0, 1.0);
}

MeasureResult measure(const DensityMatrix& rho, std::size_t qubit, const MeasurementBasis& basis, int forced_outcome) {
  const std::size_t n = rho.num_qubits();
  if (qubit >= n) throw std::out_of_range(fmt::format("qubit {} out of range for {} qubits", qubit, n));
  if (forced_outcome != 0 && forced_outcome != 1) throw std::invalid_argument("outcome must be 0 or 1");

  const DensityMatrix rotated = apply_unitary(rho, basis.to_computational(), qubit);
  const std::uint64_t mask = bit_of(n, qubit);
  const std::uint64_t low = mask - 1;
  const std::uint64_t sub_dim = rho.dim() / 2;
  auto full_index = [&](std::uint64_t k) {
    // Insert the measured bit into position `qubit` of a reduced index.
    const std::uint64_t hi = (k & ~low) << 1;
    return hi | (k & low) | (forced_outcome ? mask : 0);
  };

  Eigen::MatrixXcd block(static_cast<Index>(sub_dim), static_cast<Index>(sub_dim));
  for (std::uint64_t a = 0; a < sub_dim; ++a) {
    for (std::uint64_t b = 0; b < sub_dim; ++b) {
      block(static_cast<Index>(a), static_cast<Index>(b)) = rotated(full_index(a), full_index(b));
    }
  }
  const double p = block.trace().real();
  if (p < kZeroProbability) {
    throw ZeroProbabilityOutcome(fmt::format("outcome {} of {} on qubit {} has probability {}", forced_outcome,
                                             basis.label(), qubit, p));
  }
  block /= p;
  // Remove roundoff asymmetry before validation.
  block = (0.5 * (block + block.adjoint())).eval();
  return MeasureResult{forced_outcome, DensityMatrix(std::move(block)), p};
}

MeasureResult measure(const DensityMatrix& rho, std::size_t qubit, const MeasurementBasis& basis, OutcomeSource& source) {
  const double p0 = outcome_zero_probability(rho, qubit, basis);
  return measure(rho, qubit, basis, source.draw(p0));
}

// ------------------------------------------------------------------ Estimates

cplx trace_with(const DensityMatrix& rho, const PauliString& p) {
  if (p.size() != rho.num_qubits()) {
    throw std::invalid_argument(fmt::format("Pauli string has {} letters, state has {} qubits", p.size(), rho.num_qubits()));
  }
  // Tr(rho P) = sum_k <k|rho P|k> = sum_k f(k) rho(k, k^x).
  const std::uint64_t xm = p.x_mask();
  cplx sum = 0.0;
  for (std::uint64_t k = 0; k < rho.dim(); ++k) sum += p.amplitude_factor(k) * rho(k, k ^ xm);
  return sum;
}

double expectation(const DensityMatrix& rho, const PauliString& p) { return trace_with(rho, p).real(); }

double expectation(const StateVector& psi, const PauliString& p) {
  if (p.size() != psi.num_qubits()) throw std::invalid_argument("Pauli string length does not match state");
  const std::uint64_t xm = p.x_mask();
  cplx sum = 0.0;
  for (std::uint64_t k = 0; k < psi.dim(); ++k) sum += std::conj(psi[k ^ xm]) * p.amplitude_factor(k) * psi[k];
  return sum.real();
}

double fidelity_pure(const StateVector& psi, const DensityMatrix& rho) {
  if (psi.dim() != rho.dim()) throw std::invalid_argument("dimension mismatch in fidelity");
  return psi.amplitudes().dot(rho.matrix() * psi.amplitudes()).real();
}

double fidelity_pure(const StateVector& a, const StateVector& b) { return std::norm(a.inner(b)); }

}  // namespace losskit
