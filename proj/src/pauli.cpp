#include "losskit/pauli.hpp"

#include <array>
#include <bit>
#include <stdexcept>

namespace losskit {

namespace {

// a*b = i^phase * letter, indexed [a][b].
struct Product {
  int phase;
  Pauli letter;
};

constexpr std::array<std::array<Product, 4>, 4> kTable{{
    {{{0, Pauli::I}, {0, Pauli::X}, {0, Pauli::Y}, {0, Pauli::Z}}},
    {{{0, Pauli::X}, {0, Pauli::I}, {1, Pauli::Z}, {3, Pauli::Y}}},
    {{{0, Pauli::Y}, {3, Pauli::Z}, {0, Pauli::I}, {1, Pauli::X}}},
    {{{0, Pauli::Z}, {1, Pauli::Y}, {3, Pauli::X}, {0, Pauli::I}}},
}};

std::complex<double> i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

char to_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw std::invalid_argument(std::string("not a Pauli letter: ") + c);
  }
}

PauliString::PauliString(std::vector<Pauli> letters, int phase_power)
    : letters_(std::move(letters)), phase_(((phase_power % 4) + 4) % 4) {}

PauliString PauliString::parse(std::string_view text) {
  int phase = 0;
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
    if (text.front() == '-') phase = 2;
    text.remove_prefix(1);
  }
  if (!text.empty() && text.front() == 'i') {
    phase += 1;
    text.remove_prefix(1);
  }
  std::vector<Pauli> letters;
  letters.reserve(text.size());
  for (char c : text) letters.push_back(pauli_from_char(c));
  return PauliString(std::move(letters), phase);
}

PauliString PauliString::identity(std::size_t n) { return PauliString(std::vector<Pauli>(n, Pauli::I)); }

PauliString PauliString::single(std::size_t n, std::size_t qubit, Pauli p) {
  if (qubit >= n) throw std::out_of_range("qubit index out of range");
  std::vector<Pauli> letters(n, Pauli::I);
  letters[qubit] = p;
  return PauliString(std::move(letters));
}

std::complex<double> PauliString::phase() const { return i_power(phase_); }

std::size_t PauliString::weight() const {
  std::size_t w = 0;
  for (Pauli p : letters_) w += (p != Pauli::I);
  return w;
}

PauliString PauliString::operator*(const PauliString& rhs) const {
  if (size() != rhs.size()) throw std::invalid_argument("Pauli string length mismatch");
  std::vector<Pauli> out(size());
  int phase = phase_ + rhs.phase_;
  for (std::size_t q = 0; q < size(); ++q) {
    const Product& prod = kTable[static_cast<int>(letters_[q])][static_cast<int>(rhs.letters_[q])];
    phase += prod.phase;
    out[q] = prod.letter;
  }
  return PauliString(std::move(out), phase);
}

PauliString PauliString::operator-() const { return PauliString(letters_, phase_ + 2); }

bool PauliString::commutes_with(const PauliString& rhs) const {
  if (size() != rhs.size()) throw std::invalid_argument("Pauli string length mismatch");
  int anti = 0;
  for (std::size_t q = 0; q < size(); ++q) {
    Pauli a = letters_[q], b = rhs.letters_[q];
    anti += (a != Pauli::I && b != Pauli::I && a != b);
  }
  return anti % 2 == 0;
}

std::string PauliString::letters_str() const {
  std::string s;
  s.reserve(size());
  for (Pauli p : letters_) s.push_back(to_char(p));
  return s;
}

std::string PauliString::str() const {
  static const std::array<const char*, 4> prefix{"+", "+i", "-", "-i"};
  return prefix[phase_] + letters_str();
}

std::uint64_t PauliString::x_mask() const {
  std::uint64_t m = 0;
  const std::size_t n = size();
  for (std::size_t q = 0; q < n; ++q) {
    if (letters_[q] == Pauli::X || letters_[q] == Pauli::Y) m |= std::uint64_t{1} << (n - 1 - q);
  }
  return m;
}

std::uint64_t PauliString::z_mask() const {
  std::uint64_t m = 0;
  const std::size_t n = size();
  for (std::size_t q = 0; q < n; ++q) {
    if (letters_[q] == Pauli::Z || letters_[q] == Pauli::Y) m |= std::uint64_t{1} << (n - 1 - q);
  }
  return m;
}

std::complex<double> PauliString::amplitude_factor(std::uint64_t k) const {
  // X: |b> -> |b^1>; Z: (-1)^b; Y = iXZ: i(-1)^b.
  std::size_t y_count = 0;
  for (Pauli p : letters_) y_count += (p == Pauli::Y);
  const int sign = std::popcount(k & z_mask()) % 2 == 0 ? 1 : -1;
  return i_power(phase_ + static_cast<int>(y_count % 4)) * static_cast<double>(sign);
}

Eigen::MatrixXcd PauliString::matrix() const {
  const std::uint64_t dim = std::uint64_t{1} << size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const std::uint64_t xm = x_mask();
  for (std::uint64_t k = 0; k < dim; ++k) {
    m(static_cast<Eigen::Index>(k ^ xm), static_cast<Eigen::Index>(k)) = amplitude_factor(k);
  }
  return m;
}

}  // namespace losskit
