// losskit <encode|recover|cluster-fidelity|oneway> --config PATH [overrides]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "losskit/error.hpp"
#include "losskit/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loss-tolerant code and one-way computation experiments"};
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  std::optional<double> noise_v;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> force_branch;

  app.add_option("command", command, "encode | recover | cluster-fidelity | oneway")
      ->required()
      ->check(CLI::IsMember({"encode", "recover", "cluster-fidelity", "oneway"}));
  app.add_option("--config", config_path, "YAML experiment config")->required();
  app.add_option("--seed", seed, "master seed");
  app.add_option("--shots", shots, "shots per setting or per row (0 = exact)");
  app.add_option("--noise-v", noise_v, "white-noise weight v of the ideal state");
  app.add_option("--out", out, "output file (default: stdout)");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--force-branch", force_branch, "LOST:BITS, e.g. 0:10");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    losskit::ExperimentConfig config = losskit::ExperimentConfig::from_yaml_file(config_path);
    if (!config.experiment.empty() && config.experiment != command) {
      throw losskit::ConfigError("config field 'experiment' is '" + config.experiment + "' but the command is '" +
                                 command + "'");
    }
    config.experiment = command;
    if (seed) config.seed = *seed;
    if (shots) config.shots = *shots;
    if (noise_v) config.noise.white_noise_v = *noise_v;
    if (out) config.out = *out;
    if (format) config.format = *format;
    if (force_branch) config.force_branch = *force_branch;
    config.resolve();

    const auto rows = losskit::run_experiment(config);
    const std::string text =
        config.format == "json" ? losskit::format_json(rows, config) : losskit::format_csv(rows, config);
    if (config.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream file(config.out, std::ios::binary);
      if (!file) throw losskit::ConfigError("config field 'out': cannot write '" + config.out + "'");
      file << text;
    }
  } catch (const losskit::ConfigError& e) {
    std::cerr << "losskit: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const losskit::NumericalError& e) {
    std::cerr << "losskit: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "losskit: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
