#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "genet/cli/cli.hpp"
#include "genet/tasks/tasks.hpp"

namespace genet::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw UsageError("field '" + where + "': expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw UsageError("unknown field '" + (where.empty() ? key : where + "." + key) + "'");
}

template <class T>
void read(const json& j, const std::string& key, const std::string& path, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError("field '" + path + "': wrong type");
  }
}

// Counts must be non-negative integers; nlohmann would wrap -1 around.
void read_count(const json& j, const std::string& key, const std::string& path, std::size_t& dst) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw UsageError("field '" + path + "': expected a non-negative integer");
  dst = v.get<std::size_t>();
}

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
  return s;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  reject_unknown(j, "", {"schema_version", "kind", "use_case", "preset", "space_file", "env_config", "mode", "baseline",
                         "train", "curriculum", "seed", "output_dir", "trace_dir", "trace_weight", "init_checkpoint"});
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
    throw UsageError("field 'schema_version': expected " + std::to_string(kSchemaVersion));
  if (j.contains("kind") && j.at("kind") != "run_config") throw UsageError("field 'kind': expected \"run_config\"");

  RunConfig rc;
  if (!j.contains("use_case")) throw UsageError("field 'use_case' missing");
  std::string s;
  read(j, "use_case", "use_case", s);
  try {
    rc.use_case = parse_use_case(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("field 'use_case': ") + e.what());
  }

  int sources = 0;
  for (const char* k : {"preset", "space_file", "env_config"}) sources += j.contains(k);
  if (sources > 1) throw UsageError("fields 'preset', 'space_file' and 'env_config' are mutually exclusive");
  read(j, "preset", "preset", rc.preset);
  try {
    parse_preset(rc.preset);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("field 'preset': ") + e.what());
  }
  read(j, "space_file", "space_file", rc.space_file);
  read(j, "env_config", "env_config", rc.env_config);

  if (j.contains("mode")) {
    read(j, "mode", "mode", s);
    try {
      rc.mode = curriculum::parse_mode(s);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("field 'mode': ") + e.what());
    }
  }

  const auto task = tasks::task_for(rc.use_case);
  read(j, "baseline", "baseline", rc.baseline);
  if (!rc.baseline.empty() && std::find(task.rule_names.begin(), task.rule_names.end(), rc.baseline) == task.rule_names.end())
    throw UsageError("field 'baseline': unknown baseline '" + rc.baseline + "' for " + std::string(to_string(rc.use_case)) +
                     " (expected one of: " + join(task.rule_names) + ")");

  if (j.contains("train")) {
    const auto& t = j.at("train");
    reject_unknown(t, "train", {"configs_per_iteration", "envs_per_config", "iterations", "learning_rate",
                                "entropy_weight", "value_weight"});
    read_count(t, "configs_per_iteration", "train.configs_per_iteration", rc.train.configs_per_iteration);
    read_count(t, "envs_per_config", "train.envs_per_config", rc.train.envs_per_config);
    read_count(t, "iterations", "train.iterations", rc.train.iterations);
    read(t, "learning_rate", "train.learning_rate", rc.train.learning_rate);
    read(t, "entropy_weight", "train.entropy_weight", rc.train.entropy_weight);
    read(t, "value_weight", "train.value_weight", rc.train.value_weight);
  }
  if (j.contains("curriculum")) {
    const auto& c = j.at("curriculum");
    reject_unknown(c, "curriculum", {"rounds", "iters_per_round", "weight", "search_trials", "gap_episodes", "search"});
    auto& cs = rc.curriculum;
    read_count(c, "rounds", "curriculum.rounds", cs.rounds);
    read_count(c, "iters_per_round", "curriculum.iters_per_round", cs.iters_per_round);
    read(c, "weight", "curriculum.weight", cs.weight);
    read_count(c, "search_trials", "curriculum.search_trials", cs.search_trials);
    read_count(c, "gap_episodes", "curriculum.gap_episodes", cs.gap_episodes);
    if (c.contains("search")) {
      read(c, "search", "curriculum.search", s);
      try {
        cs.search = curriculum::parse_search_method(s);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("field 'curriculum.search': ") + e.what());
      }
    }
  }
  if (j.contains("seed") && !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0))
    throw UsageError("field 'seed': expected a non-negative integer");
  read(j, "seed", "seed", rc.seed);
  read(j, "output_dir", "output_dir", rc.output_dir);
  read(j, "trace_dir", "trace_dir", rc.trace_dir);
  read(j, "trace_weight", "trace_weight", rc.trace_weight);
  read(j, "init_checkpoint", "init_checkpoint", rc.init_checkpoint);

  if (!(rc.trace_weight >= 0.0 && rc.trace_weight <= 1.0)) throw UsageError("field 'trace_weight': must lie in [0, 1]");
  if (!rc.trace_dir.empty() && rc.use_case == UseCase::kLb)
    throw UsageError("field 'trace_dir': recorded bandwidth traces apply to abr and cc only");
  if (rc.mode == curriculum::Mode::kCl3 && rc.use_case != UseCase::kAbr)
    throw UsageError("field 'mode': cl3 needs an optimum oracle, available for abr only");
  if (rc.mode == curriculum::Mode::kCl1 && rc.use_case == UseCase::kLb)
    throw UsageError("field 'mode': cl1 schedules the bandwidth-change interval, which lb does not have");
  try {
    rc.train.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("field 'train': ") + e.what());
  }
  if (rc.mode != curriculum::Mode::kUniform) {
    auto cs = rc.curriculum;
    cs.train = rc.train;
    try {
      cs.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("field 'curriculum': ") + e.what());
    }
  }
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  json j;
  try {
    j = read_json_file(path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& rc) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "run_config";
  j["use_case"] = std::string(to_string(rc.use_case));
  if (!rc.space_file.empty()) j["space_file"] = rc.space_file;
  else if (!rc.env_config.empty()) j["env_config"] = rc.env_config;
  else j["preset"] = rc.preset;
  j["mode"] = std::string(curriculum::to_string(rc.mode));
  if (!rc.baseline.empty()) j["baseline"] = rc.baseline;
  j["train"] = {{"configs_per_iteration", rc.train.configs_per_iteration},
                {"envs_per_config", rc.train.envs_per_config},
                {"iterations", rc.train.iterations},
                {"learning_rate", rc.train.learning_rate},
                {"entropy_weight", rc.train.entropy_weight},
                {"value_weight", rc.train.value_weight}};
  const auto& cs = rc.curriculum;
  j["curriculum"] = {{"rounds", cs.rounds},
                     {"iters_per_round", cs.iters_per_round},
                     {"weight", cs.weight},
                     {"search_trials", cs.search_trials},
                     {"gap_episodes", cs.gap_episodes},
                     {"search", std::string(curriculum::to_string(cs.search))}};
  j["seed"] = rc.seed;
  if (!rc.output_dir.empty()) j["output_dir"] = rc.output_dir;
  if (!rc.trace_dir.empty()) {
    j["trace_dir"] = rc.trace_dir;
    j["trace_weight"] = rc.trace_weight;
  }
  if (!rc.init_checkpoint.empty()) j["init_checkpoint"] = rc.init_checkpoint;
  return j;
}

EnvSpace point_space(const EnvConfig& cfg) {
  auto params = preset_space(cfg.use_case, Preset::kRL3).params();
  if (params.size() != cfg.values.size()) throw std::invalid_argument("point_space: dimension mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) params[i].lo = params[i].hi = params[i].default_value = cfg.values[i];
  return EnvSpace(cfg.use_case, std::move(params));
}

EnvConfig load_point_config(const std::string& path) {
  const json j = read_json_file(path);
  try {
    const auto u = parse_use_case(j.at("use_case").get<std::string>());
    const auto names = preset_space(u, Preset::kRL3);
    EnvConfig cfg{u, std::vector<double>(names.dims())};
    const auto& values = j.at("values");
    for (const auto& [key, _] : values.items()) names.index_of(key);  // throws on unknown names
    for (std::size_t i = 0; i < names.dims(); ++i) {
      const auto& n = names.param(i).name;
      if (!values.contains(n)) throw std::invalid_argument("field 'values." + n + "' missing");
      cfg.values[i] = values.at(n).get<double>();
    }
    return config_from_json(j, point_space(cfg));
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

EnvSpace training_space(const RunConfig& rc) {
  EnvSpace space = [&] {
    if (!rc.space_file.empty()) return load_space_file(rc.space_file);
    if (!rc.env_config.empty()) return point_space(load_point_config(rc.env_config));
    return preset_space(rc.use_case, parse_preset(rc.preset));
  }();
  if (space.use_case() != rc.use_case)
    throw UsageError("field 'use_case': " + std::string(to_string(rc.use_case)) + " does not match the space (" +
                     std::string(to_string(space.use_case())) + ")");
  return space;
}

}  // namespace genet::cli
