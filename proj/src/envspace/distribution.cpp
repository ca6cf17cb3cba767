#include "genet/envspace/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace genet {

ConfigDistribution::ConfigDistribution(EnvSpace base) : base_(std::move(base)) {}

double ConfigDistribution::total_weight() const {
  double s = base_weight_;
  for (const auto& p : promoted_) s += p.weight;
  return s;
}

EnvConfig ConfigDistribution::sample_base(Rng& rng) const {
  EnvConfig cfg{base_.use_case(), std::vector<double>(base_.dims())};
  for (std::size_t i = 0; i < base_.dims(); ++i) {
    const auto& p = base_.param(i);
    const double u = uniform01(rng);
    if (p.degenerate()) {
      cfg.values[i] = p.lo;
    } else if (p.scale == Scale::kLog) {
      const double l = std::log(p.lo), h = std::log(p.hi);
      cfg.values[i] = std::clamp(std::exp(l + u * (h - l)), p.lo, p.hi);
    } else {
      cfg.values[i] = std::clamp(p.lo + u * (p.hi - p.lo), p.lo, p.hi);
    }
  }
  return cfg;
}

EnvConfig ConfigDistribution::sample(Rng& rng) const {
  const double u = uniform01(rng);
  if (promoted_.empty() || u < base_weight_) return sample_base(rng);
  double acc = base_weight_;
  for (const auto& p : promoted_) {
    acc += p.weight;
    if (u < acc) return p.config;
  }
  return promoted_.back().config;
}

ConfigDistribution ConfigDistribution::promote(const EnvConfig& p_new, double w) const {
  if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument("promotion weight must lie in (0, 1)");
  if (p_new.use_case != base_.use_case() || p_new.values.size() != base_.dims())
    throw std::invalid_argument("promoted config does not belong to the base space");
  ConfigDistribution next = *this;
  next.base_weight_ *= (1.0 - w);
  for (auto& p : next.promoted_) p.weight *= (1.0 - w);
  next.promoted_.push_back({p_new, w});
  // Remove rounding drift so the weights stay a probability vector.
  const double total = next.total_weight();
  next.base_weight_ /= total;
  for (auto& p : next.promoted_) p.weight /= total;
  return next;
}

nlohmann::json ConfigDistribution::to_json() const {
  nlohmann::json promoted = nlohmann::json::array();
  for (const auto& p : promoted_) {
    promoted.push_back({{"weight", p.weight}, {"values", p.config.values}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "config_distribution"},
          {"base_space", genet::to_json(base_)},
          {"base_weight", base_weight_},
          {"promoted", promoted}};
}

ConfigDistribution ConfigDistribution::from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != kSchemaVersion)
    throw std::invalid_argument("field 'schema_version': unsupported");
  ConfigDistribution d(space_from_json(j.at("base_space")));
  d.base_weight_ = j.at("base_weight").get<double>();
  for (const auto& p : j.at("promoted")) {
    EnvConfig cfg{d.base_.use_case(), p.at("values").get<std::vector<double>>()};
    d.promoted_.push_back({cfg, p.at("weight").get<double>()});
  }
  if (d.base_weight_ < 0.0 || std::abs(d.total_weight() - 1.0) > 1e-9)
    throw std::invalid_argument("distribution weights must be nonnegative and sum to 1");
  for (const auto& p : d.promoted_)
    if (p.weight < 0.0) throw std::invalid_argument("distribution weights must be nonnegative");
  return d;
}

}  // namespace genet
