#include "genet/envspace/space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace genet {

using nlohmann::json;

std::string_view to_string(UseCase u) {
  switch (u) {
    case UseCase::kAbr: return "abr";
    case UseCase::kCc: return "cc";
    case UseCase::kLb: return "lb";
  }
  return "?";
}

UseCase parse_use_case(std::string_view s) {
  if (s == "abr" || s == "ABR") return UseCase::kAbr;
  if (s == "cc" || s == "CC") return UseCase::kCc;
  if (s == "lb" || s == "LB") return UseCase::kLb;
  throw std::invalid_argument("unknown use case '" + std::string(s) + "' (expected abr, cc or lb)");
}

std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::kRL1: return "RL1";
    case Preset::kRL2: return "RL2";
    case Preset::kRL3: return "RL3";
  }
  return "?";
}

Preset parse_preset(std::string_view s) {
  if (s == "RL1" || s == "rl1") return Preset::kRL1;
  if (s == "RL2" || s == "rl2") return Preset::kRL2;
  if (s == "RL3" || s == "rl3") return Preset::kRL3;
  throw std::invalid_argument("unknown preset '" + std::string(s) + "' (expected RL1, RL2 or RL3)");
}

void ParamSpec::validate() const {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || lo > hi)
    throw std::invalid_argument("parameter '" + name + "': need finite lo <= hi");
  if (scale == Scale::kLog && lo <= 0.0)
    throw std::invalid_argument("parameter '" + name + "': log scale needs lo > 0");
}

EnvSpace::EnvSpace(UseCase use_case, std::vector<ParamSpec> params)
    : use_case_(use_case), params_(std::move(params)) {
  if (params_.empty()) throw std::invalid_argument("environment space has no parameters");
  for (const auto& p : params_) p.validate();
}

std::size_t EnvSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].name == name) return i;
  throw std::invalid_argument("no parameter named '" + std::string(name) + "'");
}

EnvConfig EnvSpace::defaults() const {
  EnvConfig cfg{use_case_, {}};
  for (const auto& p : params_) cfg.values.push_back(p.default_value);
  return cfg;
}

bool EnvSpace::contains(const EnvConfig& cfg) const {
  if (cfg.use_case != use_case_ || cfg.values.size() != params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (!(cfg.values[i] >= params_[i].lo && cfg.values[i] <= params_[i].hi)) return false;
  return true;
}

void EnvSpace::check(const EnvConfig& cfg) const {
  if (cfg.use_case != use_case_)
    throw std::invalid_argument("config use case does not match space");
  if (cfg.values.size() != params_.size())
    throw std::invalid_argument("config has " + std::to_string(cfg.values.size()) +
                                " values, space has " + std::to_string(params_.size()));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& p = params_[i];
    if (!(cfg.values[i] >= p.lo && cfg.values[i] <= p.hi))
      throw std::invalid_argument("parameter '" + p.name + "' = " + std::to_string(cfg.values[i]) +
                                  " outside [" + std::to_string(p.lo) + ", " +
                                  std::to_string(p.hi) + "]");
  }
}

std::vector<double> EnvSpace::to_unit(const EnvConfig& cfg) const {
  std::vector<double> u(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& p = params_[i];
    if (p.degenerate()) {
      u[i] = 0.5;
    } else if (p.scale == Scale::kLog) {
      u[i] = (std::log(cfg.values.at(i)) - std::log(p.lo)) / (std::log(p.hi) - std::log(p.lo));
    } else {
      u[i] = (cfg.values.at(i) - p.lo) / (p.hi - p.lo);
    }
  }
  return u;
}

EnvConfig EnvSpace::from_unit(std::span<const double> u) const {
  if (u.size() != params_.size()) throw std::invalid_argument("unit point has wrong dimension");
  EnvConfig cfg{use_case_, std::vector<double>(params_.size())};
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& p = params_[i];
    const double t = std::clamp(u[i], 0.0, 1.0);
    double v;
    if (p.degenerate()) {
      v = p.lo;
    } else if (p.scale == Scale::kLog) {
      v = std::exp(std::log(p.lo) + t * (std::log(p.hi) - std::log(p.lo)));
    } else {
      v = p.lo + t * (p.hi - p.lo);
    }
    cfg.values[i] = std::clamp(v, p.lo, p.hi);
  }
  return cfg;
}

EnvConfig EnvSpace::clamp(EnvConfig cfg) const {
  for (std::size_t i = 0; i < params_.size() && i < cfg.values.size(); ++i)
    cfg.values[i] = std::clamp(cfg.values[i], params_[i].lo, params_[i].hi);
  return cfg;
}

EnvSpace EnvSpace::with_range(std::string_view name, double lo, double hi) const {
  auto params = params_;
  auto& p = params[index_of(name)];
  p.lo = lo;
  p.hi = hi;
  return EnvSpace(use_case_, std::move(params));
}

bool EnvSpace::operator==(const EnvSpace& o) const {
  if (use_case_ != o.use_case_ || params_.size() != o.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto &a = params_[i], &b = o.params_[i];
    if (a.name != b.name || a.unit != b.unit || a.lo != b.lo || a.hi != b.hi ||
        a.scale != b.scale || a.default_value != b.default_value)
      return false;
  }
  return true;
}

namespace {

struct Row {
  const char* name;
  const char* unit;
  Scale scale;
  double box[3][2];
  double default_value;
};

// Boxes per preset (RL1, RL2, RL3) and the Default column.
const Row kAbrRows[] = {
    {"max_buffer", "s", Scale::kLinear, {{2, 10}, {2, 50}, {2, 100}}, 60},
    {"chunk_length", "s", Scale::kLinear, {{1, 4}, {1, 6}, {1, 10}}, 4},
    {"min_rtt", "ms", Scale::kLinear, {{20, 30}, {20, 220}, {20, 1000}}, 80},
    {"video_length", "s", Scale::kLinear, {{40, 45}, {40, 200}, {40, 400}}, 196},
    {"bw_change_interval", "s", Scale::kLinear, {{2, 2}, {2, 20}, {2, 100}}, 5},
    {"max_bandwidth", "Mbps", Scale::kLog, {{2, 5}, {2, 100}, {2, 1000}}, 5},
};

// The published RL2 change-interval row reads [8, 3]; it is stored sorted.
// delay_noise is pinned at 0 in every preset and enabled by widening its box.
const Row kCcRows[] = {
    {"max_bandwidth", "Mbps", Scale::kLog, {{0.5, 7}, {0.4, 14}, {0.1, 100}}, 3.16},
    {"min_rtt", "ms", Scale::kLinear, {{205, 250}, {156, 288}, {10, 400}}, 100},
    {"bw_change_interval", "s", Scale::kLinear, {{11, 13}, {3, 8}, {0, 30}}, 7.5},
    {"loss_rate", "fraction", Scale::kLinear, {{0.01, 0.014}, {0.007, 0.02}, {0, 0.05}}, 0},
    {"queue", "packets", Scale::kLinear, {{2, 6}, {2, 11}, {2, 200}}, 10},
    {"delay_noise", "ms", Scale::kLinear, {{0, 0}, {0, 0}, {0, 0}}, 0},
};

// service_rate multiplies the default per-server profile {0.5, 1, 2}.
const Row kLbRows[] = {
    {"service_rate", "work units/ms", Scale::kLog, {{0.1, 2}, {0.1, 5}, {0.1, 10}}, 1.0},
    {"job_size", "bytes", Scale::kLog, {{100, 200}, {100, 1000}, {1, 10000}}, 2000},
    {"job_interval", "ms", Scale::kLinear, {{0.01, 0.05}, {0.01, 0.1}, {0.1, 1}}, 0.1},
    {"num_jobs", "jobs", Scale::kLinear, {{10, 100}, {10, 1000}, {10, 5000}}, 2000},
    {"shuffle_prob", "probability", Scale::kLinear, {{0.1, 0.2}, {0.1, 0.5}, {0.1, 1}}, 0.5},
};

template <std::size_t N>
EnvSpace build(UseCase u, const Row (&rows)[N], Preset preset) {
  const auto k = static_cast<std::size_t>(preset);
  std::vector<ParamSpec> params;
  for (const auto& r : rows)
    params.push_back({r.name, r.unit, r.box[k][0], r.box[k][1], r.scale, r.default_value});
  return EnvSpace(u, std::move(params));
}

}  // namespace

EnvSpace preset_space(UseCase use_case, Preset preset) {
  switch (use_case) {
    case UseCase::kAbr: return build(use_case, kAbrRows, preset);
    case UseCase::kCc: return build(use_case, kCcRows, preset);
    case UseCase::kLb: return build(use_case, kLbRows, preset);
  }
  throw std::invalid_argument("bad use case");
}

json to_json(const EnvSpace& space) {
  json params = json::array();
  for (const auto& p : space.params()) {
    params.push_back({{"name", p.name},
                      {"unit", p.unit},
                      {"lo", p.lo},
                      {"hi", p.hi},
                      {"scale", p.scale == Scale::kLog ? "log" : "linear"},
                      {"default", p.default_value}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "env_space"},
          {"use_case", std::string(to_string(space.use_case()))},
          {"params", params}};
}

namespace {
void check_schema(const json& j, std::string_view kind) {
  if (!j.is_object()) throw std::invalid_argument("expected a JSON object");
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kSchemaVersion)
    throw std::invalid_argument("field 'schema_version': expected " + std::to_string(kSchemaVersion));
  if (j.contains("kind") && j.at("kind").get<std::string>() != kind)
    throw std::invalid_argument("field 'kind': expected '" + std::string(kind) + "'");
}
}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

EnvSpace space_from_json(const json& j) {
  check_schema(j, "env_space");
  try {
    const auto use_case = parse_use_case(j.at("use_case").get<std::string>());
    std::vector<ParamSpec> params;
    for (const auto& p : j.at("params")) {
      const auto scale = p.value("scale", std::string("linear"));
      if (scale != "linear" && scale != "log")
        throw std::invalid_argument("field 'scale': expected linear or log");
      params.push_back({p.at("name").get<std::string>(), p.value("unit", std::string()),
                        p.at("lo").get<double>(), p.at("hi").get<double>(),
                        scale == "log" ? Scale::kLog : Scale::kLinear,
                        p.value("default", p.at("lo").get<double>())});
    }
    return EnvSpace(use_case, std::move(params));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("env space: ") + e.what());
  }
}

json to_json(const EnvConfig& cfg, const EnvSpace& space) {
  space.check(cfg);
  json values = json::object();
  for (std::size_t i = 0; i < space.dims(); ++i) values[space.param(i).name] = cfg.values[i];
  return {{"schema_version", kSchemaVersion},
          {"kind", "env_config"},
          {"use_case", std::string(to_string(cfg.use_case))},
          {"values", values}};
}

EnvConfig config_from_json(const json& j, const EnvSpace& space) {
  check_schema(j, "env_config");
  try {
    const auto use_case = parse_use_case(j.at("use_case").get<std::string>());
    if (use_case != space.use_case()) throw std::invalid_argument("field 'use_case' does not match space");
    EnvConfig cfg{use_case, std::vector<double>(space.dims())};
    const auto& values = j.at("values");
    for (std::size_t i = 0; i < space.dims(); ++i) {
      const auto& name = space.param(i).name;
      if (!values.contains(name)) throw std::invalid_argument("field 'values." + name + "' missing");
      cfg.values[i] = values.at(name).get<double>();
    }
    space.check(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("env config: ") + e.what());
  }
}

EnvSpace load_space_file(const std::string& path) { return space_from_json(read_json_file(path)); }

void save_space_file(const std::string& path, const EnvSpace& space) {
  write_json_file(path, to_json(space));
}

EnvConfig load_config_file(const std::string& path, const EnvSpace& space) {
  return config_from_json(read_json_file(path), space);
}

void save_config_file(const std::string& path, const EnvConfig& cfg, const EnvSpace& space) {
  write_json_file(path, to_json(cfg, space));
}

}  // namespace genet
