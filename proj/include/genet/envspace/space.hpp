#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace genet {

enum class UseCase { kAbr, kCc, kLb };

std::string_view to_string(UseCase u);
UseCase parse_use_case(std::string_view s);

enum class Scale { kLinear, kLog };

/// One environment dimension. lo == hi is allowed and pins the dimension
/// (several preset boxes contain such rows).
struct ParamSpec {
  std::string name;
  std::string unit;
  double lo = 0.0;
  double hi = 0.0;
  Scale scale = Scale::kLinear;
  double default_value = 0.0;

  bool degenerate() const { return lo == hi; }
  void validate() const;
};

/// A point in an environment space: one scalar per ParamSpec.
struct EnvConfig {
  UseCase use_case = UseCase::kAbr;
  std::vector<double> values;

  double operator[](std::size_t i) const { return values.at(i); }
  bool operator==(const EnvConfig&) const = default;
};

class EnvSpace {
 public:
  EnvSpace(UseCase use_case, std::vector<ParamSpec> params);

  UseCase use_case() const { return use_case_; }
  std::size_t dims() const { return params_.size(); }
  const ParamSpec& param(std::size_t i) const { return params_.at(i); }
  const std::vector<ParamSpec>& params() const { return params_; }
  std::size_t index_of(std::string_view name) const;

  /// Default column values, regardless of whether they fall inside the box.
  EnvConfig defaults() const;
  bool contains(const EnvConfig& cfg) const;
  /// Throws std::invalid_argument naming the first offending dimension.
  void check(const EnvConfig& cfg) const;

  /// Unit-cube coordinates; log dimensions are mapped in log space.
  /// Degenerate dimensions map to 0.5 and ignore their coordinate.
  std::vector<double> to_unit(const EnvConfig& cfg) const;
  EnvConfig from_unit(std::span<const double> u) const;
  EnvConfig clamp(EnvConfig cfg) const;

  /// Copy with one dimension's box replaced.
  EnvSpace with_range(std::string_view name, double lo, double hi) const;

  bool operator==(const EnvSpace&) const;

 private:
  UseCase use_case_;
  std::vector<ParamSpec> params_;
};

enum class Preset { kRL1, kRL2, kRL3 };

std::string_view to_string(Preset p);
Preset parse_preset(std::string_view s);

/// Built-in parameter boxes for each use case.
EnvSpace preset_space(UseCase use_case, Preset preset);

// Dimension indices of the built-in spaces.
namespace abr_param {
enum : std::size_t { kMaxBuffer, kChunkLength, kMinRtt, kVideoLength, kBwChangeInterval, kMaxBandwidth };
}
namespace cc_param {
enum : std::size_t { kMaxBandwidth, kMinRtt, kBwChangeInterval, kLossRate, kQueue, kDelayNoise };
}
namespace lb_param {
enum : std::size_t { kServiceRate, kJobSize, kJobInterval, kNumJobs, kShuffleProb };
}

// Structured (JSON) forms. Every document carries "schema_version".
inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const EnvSpace& space);
EnvSpace space_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EnvConfig& cfg, const EnvSpace& space);
EnvConfig config_from_json(const nlohmann::json& j, const EnvSpace& space);

/// Parse errors become std::invalid_argument naming the file.
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

EnvSpace load_space_file(const std::string& path);
void save_space_file(const std::string& path, const EnvSpace& space);
EnvConfig load_config_file(const std::string& path, const EnvSpace& space);
void save_config_file(const std::string& path, const EnvConfig& cfg, const EnvSpace& space);

}  // namespace genet
