#include "losskit/harness.hpp"

#include "losskit/cluster.hpp"
#include "losskit/error.hpp"
#include "losskit/random.hpp"
#include "losskit/recovery.hpp"
#include "losskit/tomography.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

namespace losskit {

namespace {

using nlohmann::json;

const std::set<std::string> kExperiments{"encode", "recover", "cluster-fidelity", "oneway"};

template <typename T>
T scalar_as(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("config field '{}': cannot read value '{}'", field, YAML::Dump(node)));
  }
}

// A scalar or a sequence of scalars.
template <typename T>
std::vector<T> list_as(const YAML::Node& node, const std::string& field) {
  std::vector<T> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(scalar_as<T>(item, field));
  } else if (node.IsScalar()) {
    out.push_back(scalar_as<T>(node, field));
  } else {
    throw ConfigError(fmt::format("config field '{}' must be a value or a list", field));
  }
  return out;
}

std::uint64_t unsigned_as(const YAML::Node& node, const std::string& field) {
  const auto v = scalar_as<long long>(node, field);
  if (v < 0) throw ConfigError(fmt::format("config field '{}' must be non-negative, got {}", field, v));
  return static_cast<std::uint64_t>(v);
}

std::string alpha_target_name(double alpha) {
  if (std::abs(alpha) < 1e-12) return "PLUS";
  if (std::abs(alpha + std::numbers::pi / 2) < 1e-12) return "R";
  if (std::abs(alpha + std::numbers::pi / 3) < 1e-12) return "S";
  return "custom";
}

struct ForcedBranch {
  int lost;
  std::string bits;
};

std::optional<ForcedBranch> parse_force_branch(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  static const std::regex re(R"(^\s*(\d+)\s*:\s*([01]+)\s*$)");
  std::smatch m;
  if (!std::regex_match(spec, m, re)) {
    throw ConfigError(fmt::format("config field 'force_branch': expected LOST:BITS such as 0:10, got '{}'", spec));
  }
  return ForcedBranch{std::stoi(m[1].str()), m[2].str()};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v) { return fmt::format("{:.10f}", v == 0.0 ? 0.0 : v); }

// Fidelity from tomography of `rho` against `ideal`; exact when shots = 0.
std::pair<FidelityEstimate, std::size_t> tomography_fidelity(const DensityMatrix& rho, const StateVector& ideal,
                                                             std::uint64_t shots, Seed seed, std::uint64_t row) {
  const PauliDecomposition d = decompose_projector(ideal);
  const std::vector<Setting> settings = group_settings(d);
  if (shots == 0) return {{settings_fidelity(rho, d), 0.0}, settings.size()};
  std::vector<CountsTable> tables;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    Stream stream(seed, (row << 16) | s);
    tables.push_back(simulate_counts(rho, settings[s], shots, stream));
  }
  return {estimate_fidelity(tables, d), settings.size()};
}

ResultRow base_row(const ExperimentConfig& c) {
  ResultRow r;
  r.experiment = c.experiment;
  r.shots = c.shots;
  r.seed = c.seed;
  return r;
}

std::vector<ResultRow> run_encode(const ExperimentConfig& c) {
  const CodeParams params(c.code_n, c.code_m);
  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < c.inputs.size(); ++i) {
    const LogicalInput input = LogicalInput::from_name(c.inputs[i]);
    const StateVector ideal = encode(input, params);
    const DensityMatrix rho = apply_channel(DensityMatrix(ideal), c.noise, code_placement(input, params));
    const auto [est, n_settings] = tomography_fidelity(rho, ideal, c.shots, Seed{c.seed}, i);
    ResultRow r = base_row(c);
    r.input = input.name;
    r.code_n = c.code_n;
    r.code_m = c.code_m;
    r.fidelity = est.fidelity;
    r.sigma = est.sigma;
    r.settings = n_settings;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> run_recover(const ExperimentConfig& c) {
  const auto forced = parse_force_branch(c.force_branch);
  SweepConfig sweep;
  for (const auto& name : c.inputs) sweep.inputs.push_back(LogicalInput::from_name(name));
  sweep.params = CodeParams(c.code_n, c.code_m);
  sweep.noise = c.noise;
  sweep.placement = [params = sweep.params](const LogicalInput& in) { return code_placement(in, params); };
  for (int q : c.lost) sweep.losses.push_back(LossPattern{{static_cast<std::size_t>(q)}});
  sweep.shots = c.shots;
  sweep.seed = Seed{c.seed};

  std::vector<ResultRow> rows;
  std::vector<ResultRow> averages;
  const std::vector<SweepRow> swept = recovery_sweep(sweep);
  for (const LogicalInput& input : sweep.inputs) {
    double avg = 0.0, var = 0.0;
    for (const SweepRow& s : swept) {
      if (s.input != input.name) continue;
      const auto lost = static_cast<int>(*s.pattern.lost.begin());
      if (forced && (lost != forced->lost || s.branch != forced->bits)) continue;
      ResultRow r = base_row(c);
      r.input = s.input;
      r.code_n = c.code_n;
      r.code_m = c.code_m;
      r.lost = std::to_string(lost);
      r.branch = s.branch;
      r.fidelity = s.fidelity;
      r.sigma = s.sigma;
      rows.push_back(std::move(r));
      const double w = s.probability / static_cast<double>(sweep.losses.size());
      avg += w * s.fidelity;
      var += w * w * s.sigma * s.sigma;
    }
    if (!forced) {
      ResultRow r = base_row(c);
      r.input = input.name;
      r.code_n = c.code_n;
      r.code_m = c.code_m;
      r.lost = "all";
      r.branch = "avg";
      r.fidelity = avg;
      r.sigma = std::sqrt(var);
      averages.push_back(std::move(r));
    }
  }
  if (forced && rows.empty()) {
    throw ConfigError(fmt::format("config field 'force_branch': branch '{}' does not occur", c.force_branch));
  }
  rows.insert(rows.end(), averages.begin(), averages.end());
  return rows;
}

std::vector<ResultRow> run_cluster(const ExperimentConfig& c) {
  const StateVector ideal = phi5();
  const DensityMatrix rho = apply_channel(DensityMatrix(ideal), c.noise, ChannelPlacement{{}, {0}});
  const auto [est, n_settings] = tomography_fidelity(rho, ideal, c.shots, Seed{c.seed}, 0);
  ResultRow r = base_row(c);
  r.input = "phi5";
  r.fidelity = est.fidelity;
  r.sigma = est.sigma;
  r.settings = n_settings;
  return {r};
}

std::vector<ResultRow> run_oneway(const ExperimentConfig& c) {
  const auto forced = parse_force_branch(c.force_branch);
  std::vector<ResultRow> rows;
  std::uint64_t row_index = 0;
  for (int lost : c.lost) {
    if (forced && forced->lost != lost) continue;
    for (double alpha : c.alphas) {
      for (const OneWayResult& res : loss_tolerant_branches(lost, alpha, c.noise, ChannelPlacement{{}, {0}})) {
        Stream stream(Seed{c.seed}, row_index++);
        if (forced && res.branch_label() != forced->bits) continue;
        const auto [f, sigma] = shot_estimate(*res.fidelity, c.shots, stream);
        ResultRow r = base_row(c);
        r.input = alpha_target_name(alpha);
        r.lost = fmt::format("photon{}", lost);
        r.branch = res.branch_label();
        r.alpha = alpha;
        r.fidelity = f;
        r.sigma = sigma;
        rows.push_back(std::move(r));
      }
    }
  }
  if (forced && rows.empty()) {
    throw ConfigError(fmt::format("config field 'force_branch': branch '{}' does not occur", c.force_branch));
  }
  return rows;
}

json config_object(const ExperimentConfig& c) {
  return json{{"experiment", c.experiment},
              {"inputs", c.inputs},
              {"code_n", c.code_n},
              {"code_m", c.code_m},
              {"noise_v", c.noise.white_noise_v},
              {"noise_d", c.noise.pair_dephasing_d},
              {"epr_visibility", c.noise.epr_visibility},
              {"shots", c.shots},
              {"seed", c.seed},
              {"format", c.format},
              {"lost", c.lost},
              {"alphas", c.alphas},
              {"force_branch", c.force_branch}};
}

}  // namespace

double parse_angle(std::string_view text) {
  const std::string s(text);
  static const std::regex number(R"(^\s*[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\s*$)");
  static const std::regex with_pi(R"(^\s*([+-]?)\s*(?:(\d+\.?\d*|\.\d+)\s*\*?\s*)?pi\s*(?:/\s*(\d+\.?\d*|\.\d+))?\s*$)");
  std::smatch m;
  if (std::regex_match(s, number)) return std::strtod(s.c_str(), nullptr);
  if (std::regex_match(s, m, with_pi)) {
    double v = std::numbers::pi;
    if (m[2].matched) v *= std::strtod(m[2].str().c_str(), nullptr);
    if (m[3].matched) {
      const double den = std::strtod(m[3].str().c_str(), nullptr);
      if (den == 0.0) throw std::invalid_argument(fmt::format("division by zero in angle '{}'", text));
      v /= den;
    }
    return m[1].str() == "-" ? -v : v;
  }
  throw std::invalid_argument(fmt::format("cannot parse angle '{}'", text));
}

ChannelPlacement code_placement(const LogicalInput& input, const CodeParams& params) {
  ChannelPlacement p;
  p.epr_qubits = {0};
  if (params.n == 2 && params.m == 2) {
    if (input.name != "V") p.interfering_pairs.emplace_back(0, 2);
    p.interfering_pairs.emplace_back(2, 3);
    p.interfering_pairs.emplace_back(0, 1);
  }
  return p;
}

ExperimentConfig ExperimentConfig::from_yaml(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("config is not valid YAML: {}", e.what()));
  }
  ExperimentConfig c;
  if (root.IsNull()) return c;
  if (!root.IsMap()) throw ConfigError("config must be a mapping of flat keys");
  for (const auto& kv : root) {
    const std::string key = scalar_as<std::string>(kv.first, "<key>");
    const YAML::Node& v = kv.second;
    if (key == "experiment") {
      c.experiment = scalar_as<std::string>(v, key);
    } else if (key == "inputs" || key == "input") {
      c.inputs = list_as<std::string>(v, key);
    } else if (key == "code_n") {
      c.code_n = unsigned_as(v, key);
    } else if (key == "code_m") {
      c.code_m = unsigned_as(v, key);
    } else if (key == "noise_v") {
      c.noise.white_noise_v = scalar_as<double>(v, key);
    } else if (key == "noise_d") {
      c.noise.pair_dephasing_d = scalar_as<double>(v, key);
    } else if (key == "epr_visibility") {
      c.noise.epr_visibility = scalar_as<double>(v, key);
    } else if (key == "shots") {
      c.shots = unsigned_as(v, key);
    } else if (key == "seed") {
      c.seed = unsigned_as(v, key);
    } else if (key == "format") {
      c.format = scalar_as<std::string>(v, key);
    } else if (key == "out") {
      c.out = scalar_as<std::string>(v, key);
    } else if (key == "lost") {
      c.lost.clear();
      for (const std::string& item : list_as<std::string>(v, key)) {
        std::string digits = item.rfind("photon", 0) == 0 ? item.substr(6) : item;
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
          throw ConfigError(fmt::format("config field 'lost': '{}' is not a qubit or photon number", item));
        }
        c.lost.push_back(std::stoi(digits));
      }
    } else if (key == "alphas" || key == "alpha") {
      c.alphas.clear();
      for (const std::string& item : list_as<std::string>(v, key)) {
        try {
          c.alphas.push_back(parse_angle(item));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(fmt::format("config field '{}': {}", key, e.what()));
        }
      }
    } else if (key == "force_branch") {
      c.force_branch = scalar_as<std::string>(v, key);
    } else {
      throw ConfigError(fmt::format("unknown config field '{}'", key));
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_yaml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return from_yaml(ss.str());
}

void ExperimentConfig::resolve() {
  if (!kExperiments.count(experiment)) {
    throw ConfigError(fmt::format("config field 'experiment': unknown experiment '{}'", experiment));
  }
  if (format != "csv" && format != "json") {
    throw ConfigError(fmt::format("config field 'format': expected csv or json, got '{}'", format));
  }
  const std::pair<const char*, double> knobs[] = {{"noise_v", noise.white_noise_v},
                                                  {"noise_d", noise.pair_dephasing_d},
                                                  {"epr_visibility", noise.epr_visibility}};
  for (const auto& [name, value] : knobs) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw ConfigError(fmt::format("config field '{}' must lie in [0, 1], got {}", name, value));
    }
  }
  if (experiment == "encode" || experiment == "recover") {
    if (code_n < 2) throw ConfigError(fmt::format("config field 'code_n' must be >= 2, got {}", code_n));
    if (code_m < 1) throw ConfigError(fmt::format("config field 'code_m' must be >= 1, got {}", code_m));
    if (code_n * code_m > kMaxQubits) {
      throw ConfigError(fmt::format("config fields 'code_n'/'code_m': {} qubits exceeds the limit of {}",
                                    code_n * code_m, kMaxQubits));
    }
    if (inputs.empty()) throw ConfigError("config field 'inputs' must not be empty");
    for (std::string& name : inputs) {
      try {
        name = LogicalInput::from_name(name).name;
      } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("config field 'inputs': {}", e.what()));
      }
    }
  } else {
    inputs.clear();
  }

  if (experiment == "encode" && code_n * code_m > kMaxDecompositionQubits) {
    throw ConfigError(fmt::format("config fields 'code_n'/'code_m': tomography supports at most {} qubits",
                                  kMaxDecompositionQubits));
  }
  if (experiment == "recover") {
    if (code_m < 2) throw ConfigError("config field 'code_m' must be >= 2 for recover (single losses must be recoverable)");
    if (lost.empty()) {
      for (std::size_t q = 0; q < code_n * code_m; ++q) lost.push_back(static_cast<int>(q));
    }
    for (int q : lost) {
      if (q < 0 || static_cast<std::size_t>(q) >= code_n * code_m) {
        throw ConfigError(fmt::format("config field 'lost': qubit {} outside the {}-qubit code", q, code_n * code_m));
      }
    }
    std::sort(lost.begin(), lost.end());
    lost.erase(std::unique(lost.begin(), lost.end()), lost.end());
  } else if (experiment == "oneway") {
    if (lost.empty()) lost = {2, 4};
    for (int p : lost) {
      if (p != 2 && p != 4) throw ConfigError(fmt::format("config field 'lost': photon {} unsupported; use 2 or 4", p));
    }
    if (alphas.empty()) alphas = {0.0, -std::numbers::pi / 2, -std::numbers::pi / 3};
  } else {
    lost.clear();
  }
  if (experiment != "oneway") alphas.clear();
  if (experiment != "encode" && experiment != "recover") code_n = 0, code_m = 0;

  if (!force_branch.empty()) {
    if (experiment != "recover" && experiment != "oneway") {
      throw ConfigError(fmt::format("config field 'force_branch' does not apply to '{}'", experiment));
    }
    const auto fb = parse_force_branch(force_branch);
    if (std::find(lost.begin(), lost.end(), fb->lost) == lost.end()) {
      throw ConfigError(fmt::format("config field 'force_branch': loss {} is not in 'lost'", fb->lost));
    }
  }
}

std::string ExperimentConfig::to_json() const { return config_object(*this).dump(); }

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  try {
    if (config.experiment == "encode") return run_encode(config);
    if (config.experiment == "recover") return run_recover(config);
    if (config.experiment == "cluster-fidelity") return run_cluster(config);
    if (config.experiment == "oneway") return run_oneway(config);
  } catch (const ConfigError&) {
    throw;
  } catch (const NumericalError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError(fmt::format("config field 'experiment': unknown experiment '{}'", config.experiment));
}

std::string format_csv(const std::vector<ResultRow>& rows, const ExperimentConfig& config) {
  std::string out = "# config: " + config.to_json() + "\n";
  out += "experiment,input,code_n,code_m,lost,branch,alpha,fidelity,sigma,settings,shots,seed\n";
  for (const ResultRow& r : rows) {
    const std::vector<std::string> cells{
        csv_field(r.experiment),
        csv_field(r.input),
        r.code_n ? std::to_string(*r.code_n) : "",
        r.code_m ? std::to_string(*r.code_m) : "",
        csv_field(r.lost),
        csv_field(r.branch),
        r.alpha ? fixed(*r.alpha) : "",
        fixed(r.fidelity),
        fixed(r.sigma),
        r.settings ? std::to_string(*r.settings) : "",
        std::to_string(r.shots),
        std::to_string(r.seed)};
    out += fmt::format("{}\n", fmt::join(cells, ","));
  }
  return out;
}

std::string format_json(const std::vector<ResultRow>& rows, const ExperimentConfig& config) {
  const json cfg = config_object(config);
  json arr = json::array();
  for (const ResultRow& r : rows) {
    json o{{"experiment", r.experiment},
           {"input", r.input},
           {"lost", r.lost},
           {"branch", r.branch},
           {"fidelity", r.fidelity},
           {"sigma", r.sigma},
           {"shots", r.shots},
           {"seed", r.seed},
           {"config", cfg}};
    o["code_n"] = r.code_n ? json(*r.code_n) : json(nullptr);
    o["code_m"] = r.code_m ? json(*r.code_m) : json(nullptr);
    o["alpha"] = r.alpha ? json(*r.alpha) : json(nullptr);
    o["settings"] = r.settings ? json(*r.settings) : json(nullptr);
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

}  // namespace losskit
