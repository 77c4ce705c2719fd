#include "losskit/codes.hpp"

#include "losskit/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace losskit {

CodeParams::CodeParams(std::size_t n_, std::size_t m_) : n(n_), m(m_) {
  if (n < 2) throw std::invalid_argument(fmt::format("code_n must be >= 2, got {}", n));
  if (m < 1) throw std::invalid_argument(fmt::format("code_m must be >= 1, got {}", m));
  if (n * m > kMaxQubits) {
    throw std::length_error(fmt::format("code ({}, {}) needs {} qubits, limit is {}", n, m, n * m, kMaxQubits));
  }
}

std::size_t CodeParams::block_of(std::size_t qubit) const {
  if (qubit >= total()) throw std::out_of_range(fmt::format("qubit {} outside a {}-qubit code", qubit, total()));
  return qubit / n;
}

std::vector<std::size_t> CodeParams::block_qubits(std::size_t block) const {
  if (block >= m) throw std::out_of_range(fmt::format("block {} outside a {}-block code", block, m));
  std::vector<std::size_t> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = block * n + i;
  return q;
}

// ------------------------------------------------------------- LogicalInput

LogicalInput LogicalInput::from_amplitudes(cplx a0, cplx a1, std::string name) {
  const double norm2 = std::norm(a0) + std::norm(a1);
  if (std::abs(norm2 - 1.0) > kAlgebraTol) {
    throw std::invalid_argument(fmt::format("logical input not normalized (|a0|^2+|a1|^2 = {})", norm2));
  }
  return LogicalInput{a0, a1, std::move(name)};
}

LogicalInput LogicalInput::ZERO() { return {1.0, 0.0, "ZERO"}; }
LogicalInput LogicalInput::V() { return {0.0, 1.0, "V"}; }
LogicalInput LogicalInput::PLUS() {
  const double s = 1.0 / std::numbers::sqrt2;
  return {s, s, "PLUS"};
}
LogicalInput LogicalInput::R() {
  const double s = 1.0 / std::numbers::sqrt2;
  return {s, cplx(0.0, s), "R"};
}
LogicalInput LogicalInput::S() {
  const double s = 1.0 / std::numbers::sqrt2;
  return {s, std::polar(s, std::numbers::pi / 3.0), "S"};
}

LogicalInput LogicalInput::haar(Stream& stream) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto& eng = stream.engine();
  cplx a0(gauss(eng), gauss(eng));
  cplx a1(gauss(eng), gauss(eng));
  const double norm = std::sqrt(std::norm(a0) + std::norm(a1));
  return {a0 / norm, a1 / norm, "haar"};
}

LogicalInput LogicalInput::from_name(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == "ZERO" || upper == "H" || upper == "0") return ZERO();
  if (upper == "V" || upper == "1") return V();
  if (upper == "PLUS" || upper == "+") return PLUS();
  if (upper == "R") return R();
  if (upper == "S") return S();
  throw std::invalid_argument(fmt::format("unknown logical input '{}'", name));
}

StateVector LogicalInput::state() const {
  Eigen::VectorXcd v(2);
  v << a0, a1;
  return StateVector::normalized(std::move(v));
}

// -------------------------------------------------------------------- Codes

std::pair<StateVector, StateVector> logical_basis(const CodeParams& params) {
  const CodeParams p(params.n, params.m);
  const std::uint64_t ones = (std::uint64_t{1} << p.n) - 1;
  const std::uint64_t dim = std::uint64_t{1} << p.total();

  // Sum over choices of |0..0> or |1..1> per block; |1_l> picks up a sign per |1..1> block.
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  Eigen::VectorXcd one = zero;
  for (std::uint64_t choice = 0; choice < (std::uint64_t{1} << p.m); ++choice) {
    std::uint64_t index = 0;
    for (std::size_t b = 0; b < p.m; ++b) {
      index <<= p.n;
      if (choice & (std::uint64_t{1} << (p.m - 1 - b))) index |= ones;
    }
    zero(static_cast<Eigen::Index>(index)) = 1.0;
    one(static_cast<Eigen::Index>(index)) = (std::popcount(choice) % 2 == 0) ? 1.0 : -1.0;
  }
  return {StateVector::normalized(std::move(zero)), StateVector::normalized(std::move(one))};
}

StateVector encode(const LogicalInput& input, const CodeParams& params) {
  const auto [zero, one] = logical_basis(params);
  return StateVector::normalized(input.a0 * zero.amplitudes() + input.a1 * one.amplitudes());
}

StateVector encode_circuit_22(const LogicalInput& input) {
  StateVector psi = input.state().tensor(StateVector::basis(3, 0));
  psi = apply_gate(psi, Gate::cnot(), {0, 2});
  psi = apply_gate(psi, Gate::h(), {0});
  psi = apply_gate(psi, Gate::h(), {2});
  psi = apply_gate(psi, Gate::cnot(), {0, 1});
  psi = apply_gate(psi, Gate::cnot(), {2, 3});
  return psi;
}

std::vector<PauliString> stabilizers(const CodeParams& params) {
  const CodeParams p(params.n, params.m);
  const std::size_t total = p.total();
  std::vector<PauliString> out;
  for (std::size_t b = 0; b + 1 < p.m; ++b) {
    std::vector<Pauli> letters(total, Pauli::I);
    for (std::size_t q = b * p.n; q < (b + 2) * p.n; ++q) letters[q] = Pauli::X;
    out.emplace_back(std::move(letters));
  }
  for (std::size_t b = 0; b < p.m; ++b) {
    for (std::size_t i = 0; i + 1 < p.n; ++i) {
      std::vector<Pauli> letters(total, Pauli::I);
      letters[b * p.n + i] = Pauli::Z;
      letters[b * p.n + i + 1] = Pauli::Z;
      out.emplace_back(std::move(letters));
    }
  }
  return out;
}

}  // namespace losskit
