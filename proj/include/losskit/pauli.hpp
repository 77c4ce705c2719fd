#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace losskit {

enum class Pauli : std::uint8_t { I, X, Y, Z };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

// Signed tensor product of single-qubit Paulis. The phase is i^phase_power.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<Pauli> letters, int phase_power = 0);

  // Accepts an optional sign prefix ("+", "-", "+i", "-i", "i") followed by
  // letters from {I,X,Y,Z}, e.g. "-XXYY" or "iZ".
  static PauliString parse(std::string_view text);
  static PauliString identity(std::size_t n);
  // Single letter on `qubit`, identity elsewhere.
  static PauliString single(std::size_t n, std::size_t qubit, Pauli p);

  std::size_t size() const { return letters_.size(); }
  Pauli operator[](std::size_t q) const { return letters_.at(q); }
  const std::vector<Pauli>& letters() const { return letters_; }
  int phase_power() const { return phase_; }
  std::complex<double> phase() const;
  bool is_hermitian() const { return phase_ % 2 == 0; }
  std::size_t weight() const;

  PauliString operator*(const PauliString& rhs) const;
  PauliString operator-() const;
  bool operator==(const PauliString& rhs) const = default;
  bool commutes_with(const PauliString& rhs) const;

  // Letters only, no sign: "XXZI".
  std::string letters_str() const;
  // With sign: "+XXZI", "-iYZ".
  std::string str() const;

  Eigen::MatrixXcd matrix() const;

  // Bit masks in the qubit-0-is-MSB convention used by all state types.
  std::uint64_t x_mask() const;
  std::uint64_t z_mask() const;
  // P|k> = amplitude_factor(k) |k ^ x_mask()>.
  std::complex<double> amplitude_factor(std::uint64_t k) const;

 private:
  std::vector<Pauli> letters_;
  int phase_ = 0;
};

}  // namespace losskit
