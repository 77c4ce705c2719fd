#include "losskit/noise.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace losskit {

namespace {

void check_unit_interval(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(fmt::format("{} must lie in [0, 1], got {}", name, value));
  }
}

// (1-p) rho + p P rho P
Eigen::MatrixXcd pauli_mix(const DensityMatrix& rho, const PauliString& p, double prob) {
  if (prob == 0.0) return rho.matrix();
  return (1.0 - prob) * rho.matrix() + prob * apply_pauli(rho, p).matrix();
}

}  // namespace

void NoiseSpec::validate() const {
  check_unit_interval(white_noise_v, "white_noise_v");
  check_unit_interval(pair_dephasing_d, "pair_dephasing_d");
  check_unit_interval(epr_visibility, "epr_visibility");
}

bool NoiseSpec::is_noiseless() const {
  return white_noise_v == 1.0 && pair_dephasing_d == 0.0 && epr_visibility == 1.0;
}

DensityMatrix apply_channel(const DensityMatrix& rho, const NoiseSpec& spec, const ChannelPlacement& placement) {
  spec.validate();
  const std::size_t n = rho.num_qubits();
  DensityMatrix out = rho;

  const double flip = (1.0 - spec.epr_visibility) / 2.0;
  for (std::size_t q : placement.epr_qubits) {
    if (q >= n) throw std::out_of_range(fmt::format("epr qubit {} out of range for {} qubits", q, n));
    out = DensityMatrix(pauli_mix(out, PauliString::single(n, q, Pauli::Z), flip));
  }

  for (const auto& [a, b] : placement.interfering_pairs) {
    if (a >= n || b >= n || a == b) {
      throw std::out_of_range(fmt::format("invalid interfering pair ({}, {}) for {} qubits", a, b, n));
    }
    std::vector<Pauli> letters(n, Pauli::I);
    letters[a] = Pauli::Z;
    letters[b] = Pauli::Z;
    out = DensityMatrix(pauli_mix(out, PauliString(std::move(letters)), spec.pair_dephasing_d));
  }

  if (spec.white_noise_v != 1.0) {
    const Eigen::Index dim = static_cast<Eigen::Index>(out.dim());
    out = DensityMatrix(Eigen::MatrixXcd(spec.white_noise_v * out.matrix() +
                                         (1.0 - spec.white_noise_v) / static_cast<double>(dim) *
                                             Eigen::MatrixXcd::Identity(dim, dim)));
  }
  return out;
}

}  // namespace losskit
