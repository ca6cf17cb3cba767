#pragma once

#include <vector>

#include "genet/common/rng.hpp"
#include "genet/envspace/space.hpp"

namespace genet {

struct WeightedConfig {
  EnvConfig config;
  double weight = 0.0;
};

/// Mixture of a uniform box (the base space) and a list of promoted point
/// configurations. Weights always sum to one.
class ConfigDistribution {
 public:
  explicit ConfigDistribution(EnvSpace base);

  const EnvSpace& base_space() const { return base_; }
  double base_weight() const { return base_weight_; }
  const std::vector<WeightedConfig>& promoted() const { return promoted_; }
  double total_weight() const;

  /// Uniform draw from the base box; log dimensions are uniform in log space.
  EnvConfig sample_base(Rng& rng) const;
  EnvConfig sample(Rng& rng) const;

  /// Scales every existing weight (base included) by 1-w and appends
  /// (p_new, w). Throws std::invalid_argument unless 0 < w < 1.
  ConfigDistribution promote(const EnvConfig& p_new, double w) const;

  nlohmann::json to_json() const;
  static ConfigDistribution from_json(const nlohmann::json& j);

 private:
  EnvSpace base_;
  double base_weight_ = 1.0;
  std::vector<WeightedConfig> promoted_;
};

inline EnvConfig sample_config(const ConfigDistribution& dist, Rng& rng) { return dist.sample(rng); }

inline ConfigDistribution promote(const ConfigDistribution& dist, const EnvConfig& p_new, double w) {
  return dist.promote(p_new, w);
}

}  // namespace genet
