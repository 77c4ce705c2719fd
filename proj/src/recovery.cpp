#include "losskit/recovery.hpp"

#include "losskit/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace losskit {

namespace {

std::vector<std::size_t> survivors_of_block(const CodeParams& params, const LossPattern& pattern, std::size_t block) {
  std::vector<std::size_t> out;
  for (std::size_t q : params.block_qubits(block)) {
    if (!pattern.lost.count(q)) out.push_back(q);
  }
  return out;
}

void check_pattern(const CodeParams& params, const LossPattern& pattern) {
  for (std::size_t q : pattern.lost) {
    if (q >= params.total()) {
      throw std::out_of_range(fmt::format("lost qubit {} outside a {}-qubit code", q, params.total()));
    }
  }
}

// Z on survivors of the other blocks, X on the rest of the target block.
RecoveryPlan build_plan(const CodeParams& params, const LossPattern& pattern, std::size_t target) {
  RecoveryPlan plan;
  plan.params = params;
  plan.pattern = pattern;
  plan.target = target;
  const std::size_t target_block = params.block_of(target);
  for (std::size_t b = 0; b < params.m; ++b) {
    const auto alive = survivors_of_block(params, pattern, b);
    if (b == target_block) {
      for (std::size_t q : alive) {
        if (q != target) plan.x_measurements.push_back(q);
      }
    } else if (!alive.empty()) {
      plan.z_parity_qubits.push_back(alive.front());
      plan.z_measurements.insert(plan.z_measurements.end(), alive.begin(), alive.end());
    }
  }
  plan.correction_table = {{{0, 0}, "H"}, {{1, 0}, "HX"}, {{0, 1}, "HZ"}, {{1, 1}, "HXZ"}};
  return plan;
}

}  // namespace

std::vector<std::size_t> RecoveryPlan::measurement_order() const {
  std::vector<std::size_t> order = z_measurements;
  order.insert(order.end(), x_measurements.begin(), x_measurements.end());
  return order;
}

std::pair<int, int> RecoveryPlan::parities(const std::vector<int>& outcomes) const {
  const auto order = measurement_order();
  if (outcomes.size() != order.size()) {
    throw std::invalid_argument(fmt::format("expected {} outcomes, got {}", order.size(), outcomes.size()));
  }
  int z = 0, x = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i >= z_measurements.size()) {
      x ^= outcomes[i];
    } else if (std::find(z_parity_qubits.begin(), z_parity_qubits.end(), order[i]) != z_parity_qubits.end()) {
      z ^= outcomes[i];
    }
  }
  return {z, x};
}

std::string RecoveryRecord::branch_label() const {
  std::string s;
  for (int b : outcomes) s.push_back(b ? '1' : '0');
  return s.empty() ? "-" : s;
}

DensityMatrix erase(const DensityMatrix& rho, const LossPattern& pattern) {
  if (pattern.lost.empty()) return rho;
  return partial_trace(rho, std::vector<std::size_t>(pattern.lost.begin(), pattern.lost.end()));
}

bool recoverable(const CodeParams& params, const LossPattern& pattern) {
  check_pattern(params, pattern);
  bool any_intact = false;
  for (std::size_t b = 0; b < params.m; ++b) {
    const std::size_t alive = survivors_of_block(params, pattern, b).size();
    if (alive == 0) return false;
    any_intact = any_intact || alive == params.n;
  }
  return any_intact;
}

std::optional<std::size_t> default_target(const CodeParams& params, const LossPattern& pattern) {
  check_pattern(params, pattern);
  for (std::size_t b = 0; b < params.m; ++b) {
    if (survivors_of_block(params, pattern, b).size() == params.n) return (b + 1) * params.n - 1;
  }
  return std::nullopt;
}

RecoveryPlan plan_recovery(const CodeParams& params, const LossPattern& pattern, std::optional<std::size_t> target) {
  if (!recoverable(params, pattern)) throw std::invalid_argument("loss pattern is not recoverable");
  const std::size_t t = target ? *target : *default_target(params, pattern);
  const std::size_t block = params.block_of(t);
  if (survivors_of_block(params, pattern, block).size() != params.n) {
    throw std::invalid_argument(fmt::format("target qubit {} lies in a damaged block", t));
  }
  return build_plan(params, pattern, t);
}

RecoveryPlan plan_best_effort(const CodeParams& params, const LossPattern& pattern) {
  check_pattern(params, pattern);
  std::size_t best_block = params.m;
  std::size_t best_alive = 0;
  for (std::size_t b = 0; b < params.m; ++b) {
    const std::size_t alive = survivors_of_block(params, pattern, b).size();
    if (alive > best_alive) {
      best_alive = alive;
      best_block = b;
    }
  }
  if (best_alive == 0) throw std::invalid_argument("every qubit is lost");
  return build_plan(params, pattern, survivors_of_block(params, pattern, best_block).back());
}

RecoveryRecord execute_recovery(const DensityMatrix& erased, const RecoveryPlan& plan, OutcomeSource& source,
                                const std::optional<StateVector>& reference) {
  std::vector<std::size_t> alive;
  for (std::size_t q = 0; q < plan.params.total(); ++q) {
    if (!plan.pattern.lost.count(q)) alive.push_back(q);
  }
  if (erased.num_qubits() != alive.size()) {
    throw std::invalid_argument(
        fmt::format("state has {} qubits but the plan expects {} survivors", erased.num_qubits(), alive.size()));
  }

  const auto order = plan.measurement_order();
  const std::size_t n_z = plan.z_measurements.size();
  DensityMatrix rho = erased;
  std::vector<int> outcomes;
  double probability = 1.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto it = std::find(alive.begin(), alive.end(), order[i]);
    if (it == alive.end()) throw std::invalid_argument(fmt::format("qubit {} is not available to measure", order[i]));
    const auto pos = static_cast<std::size_t>(it - alive.begin());
    const auto basis = i < n_z ? MeasurementBasis::z() : MeasurementBasis::x();
    MeasureResult r = measure(rho, pos, basis, source);
    outcomes.push_back(r.outcome);
    probability *= r.probability;
    rho = std::move(r.collapsed);
    alive.erase(it);
  }
  if (alive.size() != 1 || alive.front() != plan.target) {
    throw std::logic_error("recovery plan does not leave exactly the target qubit");
  }

  const std::string word = plan.correction_table.at(plan.parities(outcomes));
  for (auto c = word.rbegin(); c != word.rend(); ++c) rho = apply_gate(rho, Gate::from_letter(*c), {0});

  RecoveryRecord rec{order, outcomes, word, rho, probability, std::nullopt};
  if (reference) rec.fidelity_vs_input = fidelity_pure(*reference, rho);
  return rec;
}

std::vector<RecoveryRecord> enumerate_branches(const DensityMatrix& erased, const RecoveryPlan& plan,
                                               const std::optional<StateVector>& reference) {
  const std::size_t k = plan.measurement_order().size();
  std::vector<RecoveryRecord> out;
  for (std::uint64_t branch = 0; branch < (std::uint64_t{1} << k); ++branch) {
    std::vector<int> bits(k);
    for (std::size_t i = 0; i < k; ++i) bits[i] = static_cast<int>((branch >> (k - 1 - i)) & 1U);
    auto source = OutcomeSource::forced(bits);
    try {
      out.push_back(execute_recovery(erased, plan, source, reference));
    } catch (const ZeroProbabilityOutcome&) {
      // Branch cannot occur.
    }
  }
  return out;
}

std::pair<double, double> shot_estimate(double f, std::uint64_t shots, Stream& stream) {
  if (shots == 0) return {f, 0.0};
  const double p = std::clamp(f, 0.0, 1.0);
  const double est = static_cast<double>(stream.binomial(shots, p)) / static_cast<double>(shots);
  return {est, std::sqrt(est * (1.0 - est) / static_cast<double>(shots))};
}

std::vector<SweepRow> recovery_sweep(const SweepConfig& config) {
  config.noise.validate();
  std::vector<LossPattern> losses = config.losses;
  if (losses.empty()) {
    for (std::size_t q = 0; q < config.params.total(); ++q) losses.push_back(LossPattern{{q}});
  }

  std::vector<SweepRow> rows;
  std::uint64_t row_index = 0;
  for (const LogicalInput& input : config.inputs) {
    const ChannelPlacement placement = config.placement ? config.placement(input) : ChannelPlacement{};
    const DensityMatrix noisy = apply_channel(DensityMatrix(encode(input, config.params)), config.noise, placement);
    const StateVector reference = input.state();
    for (const LossPattern& loss : losses) {
      const RecoveryPlan plan = plan_recovery(config.params, loss);
      for (const RecoveryRecord& rec : enumerate_branches(erase(noisy, loss), plan, reference)) {
        Stream stream(config.seed, row_index++);
        const double exact = *rec.fidelity_vs_input;
        const auto [est, sigma] = shot_estimate(exact, config.shots, stream);
        rows.push_back(SweepRow{input.name, loss, rec.branch_label(), rec.probability, exact, est, sigma});
      }
    }
  }
  return rows;
}

}  // namespace losskit
