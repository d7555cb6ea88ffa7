#include "sgp/config.hpp"

#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sgp/error.hpp"
#include "sgp/io.hpp"
#include "sgp/rng.hpp"

namespace sgp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& v) {
  std::size_t used = 0;
  const double out = std::stod(v, &used);
  if (used != v.size()) throw ConfigError("trailing characters in number '" + v + "'");
  return out;
}

long parse_long(const std::string& v) {
  std::size_t used = 0;
  const long out = std::stol(v, &used);
  if (used != v.size()) throw ConfigError("trailing characters in integer '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& v) {
  std::size_t used = 0;
  const unsigned long long out = std::stoull(v, &used);
  if (used != v.size()) throw ConfigError("trailing characters in integer '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("expected true/false, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
  return out;
}

std::vector<std::pair<long, double>> parse_decay(const std::string& v) {
  std::vector<std::pair<long, double>> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("lr_decay entries must look like iteration:factor");
    }
    out.emplace_back(parse_long(trim(item.substr(0, colon))),
                     parse_double(trim(item.substr(colon + 1))));
  }
  return out;
}

std::string decay_to_string(const std::vector<std::pair<long, double>>& decay) {
  std::string out;
  for (std::size_t i = 0; i < decay.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(decay[i].first) + ":" + format_double(decay[i].second);
  }
  return out;
}

std::string slowdown_to_string(const std::vector<double>& slowdown) {
  std::string out;
  for (std::size_t i = 0; i < slowdown.size(); ++i) {
    if (i) out += ',';
    out += format_double(slowdown[i]);
  }
  return out;
}

void set_topology(RunConfig& cfg, const std::string& value) {
  if (value.rfind("static:", 0) == 0) {
    cfg.sim.algorithm.topology = TopologyKind::StaticCustom;
    cfg.static_topology_path = value.substr(7);
    cfg.sim.algorithm.static_topology = read_matrix_csv(cfg.static_topology_path);
  } else {
    cfg.sim.algorithm.topology = topology_kind_from_string(value);
  }
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"algorithm",
       [](RunConfig& c, const std::string& v) {
         c.sim.algorithm.algorithm = algorithm_from_string(v);
       }},
      {"topology", [](RunConfig& c, const std::string& v) { set_topology(c, v); }},
      {"nodes",
       [](RunConfig& c, const std::string& v) {
         c.sim.algorithm.nodes = static_cast<int>(parse_long(v));
       }},
      {"iters", [](RunConfig& c, const std::string& v) { c.sim.algorithm.iters = parse_long(v); }},
      {"gamma", [](RunConfig& c, const std::string& v) { c.sim.algorithm.gamma = parse_double(v); }},
      {"momentum",
       [](RunConfig& c, const std::string& v) { c.sim.algorithm.momentum = parse_double(v); }},
      {"tau",
       [](RunConfig& c, const std::string& v) {
         c.sim.algorithm.tau = static_cast<int>(parse_long(v));
       }},
      {"osgp_cadence",
       [](RunConfig& c, const std::string& v) {
         if (v == "dense") {
           c.sim.algorithm.cadence = OsgpCadence::EveryIteration;
         } else if (v == "sparse") {
           c.sim.algorithm.cadence = OsgpCadence::EveryTau;
         } else {
           throw ConfigError("osgp_cadence must be dense or sparse");
         }
       }},
      {"delay_mode",
       [](RunConfig& c, const std::string& v) {
         if (v == "none") {
           c.sim.algorithm.delay_mode = DelayMode::None;
         } else if (v == "fixed") {
           c.sim.algorithm.delay_mode = DelayMode::Fixed;
         } else if (v == "uniform") {
           c.sim.algorithm.delay_mode = DelayMode::Uniform;
         } else {
           throw ConfigError("delay_mode must be none, fixed or uniform");
         }
       }},
      {"seed", [](RunConfig& c, const std::string& v) { c.sim.algorithm.seed = parse_u64(v); }},
      {"record_every",
       [](RunConfig& c, const std::string& v) { c.sim.algorithm.record_every = parse_long(v); }},
      {"lr_decay",
       [](RunConfig& c, const std::string& v) { c.sim.algorithm.lr_decay = parse_decay(v); }},
      {"objective",
       [](RunConfig& c, const std::string& v) {
         if (v != "quadratic" && v != "logistic") {
           throw ConfigError("objective must be quadratic or logistic");
         }
         c.objective.kind = v;
       }},
      {"dimension",
       [](RunConfig& c, const std::string& v) {
         c.objective.dimension = static_cast<int>(parse_long(v));
       }},
      {"samples",
       [](RunConfig& c, const std::string& v) {
         c.objective.samples = static_cast<int>(parse_long(v));
       }},
      {"heterogeneity",
       [](RunConfig& c, const std::string& v) { c.objective.heterogeneity = parse_double(v); }},
      {"noise", [](RunConfig& c, const std::string& v) { c.objective.noise = parse_double(v); }},
      {"compute_time",
       [](RunConfig& c, const std::string& v) { c.sim.cost.compute_time = parse_double(v); }},
      {"transfer_time",
       [](RunConfig& c, const std::string& v) { c.sim.cost.transfer_time = parse_double(v); }},
      {"allreduce_beta",
       [](RunConfig& c, const std::string& v) { c.sim.cost.allreduce_beta = parse_double(v); }},
      {"slowdown",
       [](RunConfig& c, const std::string& v) {
         c.sim.straggler.slowdown = trim(v).empty() ? std::vector<double>{} : parse_double_list(v);
       }},
      {"spike_prob",
       [](RunConfig& c, const std::string& v) { c.sim.straggler.spike_prob = parse_double(v); }},
      {"spike_magnitude",
       [](RunConfig& c, const std::string& v) {
         c.sim.straggler.spike_magnitude = parse_double(v);
       }},
      {"save_problem",
       [](RunConfig& c, const std::string& v) { c.save_problem = parse_bool(v); }},
  };
  return table;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value,
               const std::string& where) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError(where + ": unknown key '" + key + "'");
  try {
    it->second(cfg, value);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(where + ": invalid value for '" + key + "': " + e.what());
  }
}

RunConfig parse_json_config(const std::string& text) {
  RunConfig cfg;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid JSON config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("JSON config must be an object");
  for (const auto& [key, value] : doc.items()) {
    std::string v;
    if (value.is_string()) {
      v = value.get<std::string>();
    } else if (value.is_boolean()) {
      v = value.get<bool>() ? "true" : "false";
    } else {
      v = value.dump();
    }
    apply_key(cfg, key, v, "key '" + key + "'");
  }
  cfg.sim.validate();
  return cfg;
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json_config(text);

  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    apply_key(cfg, key, value, where);
  }
  cfg.sim.validate();
  return cfg;
}

RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config_text(buffer.str());
}

std::string resolved_config_json(const RunConfig& config) {
  const AlgorithmConfig& a = config.sim.algorithm;
  nlohmann::ordered_json doc;
  doc["algorithm"] = to_string(a.algorithm);
  doc["topology"] = a.topology == TopologyKind::StaticCustom
                        ? "static:" + config.static_topology_path
                        : to_string(a.topology);
  doc["nodes"] = a.nodes;
  doc["iters"] = a.iters;
  doc["gamma"] = a.resolved_gamma();
  doc["momentum"] = a.momentum;
  doc["tau"] = a.tau;
  doc["osgp_cadence"] = a.cadence == OsgpCadence::EveryIteration ? "dense" : "sparse";
  doc["delay_mode"] = a.delay_mode == DelayMode::None
                          ? "none"
                          : (a.delay_mode == DelayMode::Fixed ? "fixed" : "uniform");
  doc["seed"] = a.seed;
  doc["record_every"] = a.record_every;
  doc["lr_decay"] = decay_to_string(a.lr_decay);
  doc["objective"] = config.objective.kind;
  doc["dimension"] = config.objective.dimension;
  doc["samples"] = config.objective.samples;
  doc["heterogeneity"] = config.objective.heterogeneity;
  doc["noise"] = config.objective.noise;
  doc["compute_time"] = config.sim.cost.compute_time;
  doc["transfer_time"] = config.sim.cost.transfer_time;
  doc["allreduce_beta"] = config.sim.cost.allreduce_beta;
  doc["slowdown"] = slowdown_to_string(config.sim.straggler.slowdown);
  doc["spike_prob"] = config.sim.straggler.spike_prob;
  doc["spike_magnitude"] = config.sim.straggler.spike_magnitude;
  doc["save_problem"] = config.save_problem;
  return doc.dump(2) + "\n";
}

std::unique_ptr<Objective> make_objective(const ObjectiveSpec& spec, int nodes,
                                          std::uint64_t seed) {
  const std::uint64_t problem_seed = mix64(seed, 0x0B7EC7ull);
  if (spec.kind == "quadratic") {
    return make_quadratic(nodes, spec.dimension, spec.samples, spec.heterogeneity, spec.noise,
                          problem_seed);
  }
  if (spec.kind == "logistic") {
    return logistic_problem(nodes, spec.dimension, spec.samples, spec.heterogeneity, problem_seed,
                            spec.noise);
  }
  throw ConfigError("unknown objective kind '" + spec.kind + "'");
}

}  // namespace sgp
