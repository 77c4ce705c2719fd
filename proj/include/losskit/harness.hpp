#pragma once

// Experiment configuration, the four experiment drivers and their CSV/JSON
// serialization. Used by the `losskit` command-line tool.

#include "losskit/codes.hpp"
#include "losskit/noise.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace losskit {

struct ExperimentConfig {
  std::string experiment;  // encode | recover | cluster-fidelity | oneway
  std::vector<std::string> inputs{"V", "PLUS", "R"};
  std::size_t code_n = 2;
  std::size_t code_m = 2;
  NoiseSpec noise;
  std::uint64_t shots = 0;  // 0: exact values
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string out;  // empty: standard output
  // recover: lost qubit indices (default every single loss); oneway: lost
  // photons (default 2 and 4).
  std::vector<int> lost;
  std::vector<double> alphas;  // oneway only; default 0, -pi/2, -pi/3
  // "lost:bits", e.g. "0:10" selects one branch of one loss case.
  std::string force_branch;

  // Flat YAML mapping; unknown keys and ill-typed values raise ConfigError
  // naming the field.
  static ExperimentConfig from_yaml(std::string_view text);
  static ExperimentConfig from_yaml_file(const std::string& path);

  // Fills experiment-dependent defaults and rejects invalid combinations
  // with ConfigError.
  void resolve();
  // Compact JSON of every resolved field, keys sorted.
  std::string to_json() const;
};

struct ResultRow {
  std::string experiment;
  std::string input;
  std::optional<std::size_t> code_n;
  std::optional<std::size_t> code_m;
  std::string lost;
  std::string branch;
  std::optional<double> alpha;
  double fidelity = 0.0;
  double sigma = 0.0;
  std::optional<std::size_t> settings;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
};

// "pi", "-pi/2", "pi/3", "0.25", "2*pi/3".
double parse_angle(std::string_view text);

// Pairwise dephasing sites of the (2,2) encoder: pairs (0,2), (2,3), (0,1),
// with |V> using only the last two. One qubit of the first source pair (0)
// carries the visibility loss. Other codes get no pair dephasing.
ChannelPlacement code_placement(const LogicalInput& input, const CodeParams& params);

// `config` must be resolved.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

// Rows under a "# config: {...}" line and the fixed header.
std::string format_csv(const std::vector<ResultRow>& rows, const ExperimentConfig& config);
// Array of row objects, each carrying the resolved config.
std::string format_json(const std::vector<ResultRow>& rows, const ExperimentConfig& config);

}  // namespace losskit
