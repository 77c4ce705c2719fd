#pragma once

// Parity/redundancy erasure codes: m blocks of n qubits,
//   |0_l> ~ (|0..0> + |1..1>)^{(x)m},  |1_l> ~ (|0..0> - |1..1>)^{(x)m}.

#include "losskit/pauli.hpp"
#include "losskit/state.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace losskit {

class Stream;

struct CodeParams {
  std::size_t n = 2;  // qubits per block
  std::size_t m = 2;  // number of blocks

  CodeParams() = default;
  // Throws std::invalid_argument for n < 2 or m < 1, std::length_error for n*m > kMaxQubits.
  CodeParams(std::size_t n, std::size_t m);

  std::size_t total() const { return n * m; }
  std::size_t block_of(std::size_t qubit) const;
  std::vector<std::size_t> block_qubits(std::size_t block) const;
};

// a0|0> + a1|1>, normalized within 1e-10.
struct LogicalInput {
  cplx a0{1.0, 0.0};
  cplx a1{0.0, 0.0};
  std::string name;

  static LogicalInput ZERO();
  static LogicalInput V();
  static LogicalInput PLUS();
  static LogicalInput R();
  static LogicalInput S();
  static LogicalInput from_amplitudes(cplx a0, cplx a1, std::string name = "custom");
  // Haar-random pure qubit.
  static LogicalInput haar(Stream& stream);
  // Accepts the preset names ZERO, V, PLUS, R, S (case-insensitive; "+" for PLUS).
  static LogicalInput from_name(std::string_view name);

  StateVector state() const;
};

// (|0_l>, |1_l>)
std::pair<StateVector, StateVector> logical_basis(const CodeParams& params);

StateVector encode(const LogicalInput& input, const CodeParams& params);

// Gate-level encoder for the (2,2) code acting on |psi>|000>:
// CNOT(0->2), H(0), H(2), CNOT(0->1), CNOT(2->3).
StateVector encode_circuit_22(const LogicalInput& input);

// X-type generators (X^n on consecutive block pairs) first, then the
// adjacent in-block ZZ generators. n*m - 1 independent generators in total.
std::vector<PauliString> stabilizers(const CodeParams& params);

}  // namespace losskit
