#pragma once

#include "losskit/state.hpp"

#include <utility>
#include <vector>

namespace losskit {

// Abstract imperfection knobs. The defaults are the noiseless channel.
struct NoiseSpec {
  double white_noise_v = 1.0;     // weight of the input state against I/2^n
  double pair_dephasing_d = 0.0;  // ZZ-flip probability per interfering pair
  double epr_visibility = 1.0;    // +/- basis visibility of a Bell-pair source

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  bool is_noiseless() const;
};

// Which qubits the pair dephasing and the visibility loss act on.
struct ChannelPlacement {
  std::vector<std::pair<std::size_t, std::size_t>> interfering_pairs;
  // One qubit of each imperfect Bell pair; receives Z with probability (1-V)/2.
  std::vector<std::size_t> epr_qubits;
};

// Visibility loss on each epr qubit, then ZZ dephasing on each listed pair in
// order, then white noise.
DensityMatrix apply_channel(const DensityMatrix& rho, const NoiseSpec& spec, const ChannelPlacement& placement = {});

}  // namespace losskit
