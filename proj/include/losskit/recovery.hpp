#pragma once

// Heralded loss on the block codes: erasure, recoverability, the
// measure-and-correct schedule, and branch sweeps.

#include "losskit/codes.hpp"
#include "losskit/noise.hpp"
#include "losskit/random.hpp"
#include "losskit/state.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace losskit {

struct LossPattern {
  std::set<std::size_t> lost;
};

// Indices in a plan always refer to the original (pre-erasure) code layout.
struct RecoveryPlan {
  CodeParams params;
  LossPattern pattern;
  std::vector<std::size_t> z_measurements;  // every survivor outside the target block
  std::vector<std::size_t> x_measurements;  // non-target qubits of the target block
  std::size_t target = 0;
  // One Z-measured qubit per non-target block; their outcome XOR is the z parity.
  std::vector<std::size_t> z_parity_qubits;
  // (z parity, x parity) -> operator word over {H, X, Z}, applied rightmost-first.
  std::map<std::pair<int, int>, std::string> correction_table;

  // Measurement order used by execute_recovery: z list then x list.
  std::vector<std::size_t> measurement_order() const;
  // Parities from outcomes given in measurement order.
  std::pair<int, int> parities(const std::vector<int>& outcomes) const;
};

struct RecoveryRecord {
  std::vector<std::size_t> measured;  // original indices, in measurement order
  std::vector<int> outcomes;          // aligned with `measured`
  std::string correction_applied;
  DensityMatrix output;  // single qubit
  double probability = 1.0;
  std::optional<double> fidelity_vs_input;

  std::string branch_label() const;
};

// Partial trace over the lost qubits; survivors keep ascending order.
DensityMatrix erase(const DensityMatrix& rho, const LossPattern& pattern);

// Every block keeps a survivor and at least one block is loss-free.
bool recoverable(const CodeParams& params, const LossPattern& pattern);

// Highest-index qubit of the lowest-index loss-free block.
std::optional<std::size_t> default_target(const CodeParams& params, const LossPattern& pattern);

// Throws std::invalid_argument when the pattern is not recoverable or the
// target sits in a damaged block.
RecoveryPlan plan_recovery(const CodeParams& params, const LossPattern& pattern,
                           std::optional<std::size_t> target = std::nullopt);

// Same schedule with fully lost blocks ignored and the target placed in the
// block with the most survivors. Defined for any pattern with a survivor.
RecoveryPlan plan_best_effort(const CodeParams& params, const LossPattern& pattern);

// `erased` holds the survivors of plan.pattern in ascending order.
RecoveryRecord execute_recovery(const DensityMatrix& erased, const RecoveryPlan& plan, OutcomeSource& source,
                                const std::optional<StateVector>& reference = std::nullopt);

// All outcome branches with nonzero probability, in lexicographic outcome order.
std::vector<RecoveryRecord> enumerate_branches(const DensityMatrix& erased, const RecoveryPlan& plan,
                                               const std::optional<StateVector>& reference = std::nullopt);

struct SweepConfig {
  std::vector<LogicalInput> inputs;
  CodeParams params;
  NoiseSpec noise;
  // Channel placement per input; empty function means no placement.
  std::function<ChannelPlacement(const LogicalInput&)> placement;
  // Loss patterns to sweep; empty means every single-qubit loss.
  std::vector<LossPattern> losses;
  std::uint64_t shots = 0;  // 0: exact values, sigma = 0
  Seed seed;
};

struct SweepRow {
  std::string input;
  LossPattern pattern;
  std::string branch;
  double probability = 0.0;
  double exact_fidelity = 0.0;
  double fidelity = 0.0;  // shot estimate, equal to exact_fidelity when shots = 0
  double sigma = 0.0;
};

// Rows ordered by input, loss pattern, branch. Row i samples from Stream(seed, i).
std::vector<SweepRow> recovery_sweep(const SweepConfig& config);

// Binomial shot estimate of a success probability `f`: (k/shots, sqrt(p(1-p)/shots)).
std::pair<double, double> shot_estimate(double f, std::uint64_t shots, Stream& stream);

}  // namespace losskit
