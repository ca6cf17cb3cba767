#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "genet/envspace/distribution.hpp"
#include "genet/policy/task.hpp"

namespace genet::policy {

struct TrainSpec {
  std::size_t configs_per_iteration = 10;  // K
  std::size_t envs_per_config = 3;         // N
  std::size_t iterations = 100;
  double learning_rate = 1e-3;
  double entropy_weight = 0.01;
  double value_weight = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CurveRow {
  std::uint64_t iteration = 0;
  double mean_reward = 0.0;
  double std_reward = 0.0;
};

struct TrainResult {
  PolicySnapshot snapshot;
  std::vector<CurveRow> curve;
};

/// Policy-gradient training on configurations drawn from `dist`. Each
/// iteration samples K configurations, N environments each, rolls out the
/// stochastic policy, and applies one Adam step on the REINFORCE loss with
/// a learned value baseline (advantages standardized per configuration) and an entropy
/// bonus. Seeds derive from (spec.seed, snapshot iteration), so continuing
/// from a snapshot reproduces an uninterrupted run. Throws
/// std::runtime_error if a gradient becomes non-finite.
TrainResult train_uniform(const ConfigDistribution& dist, PolicySnapshot theta, const TrainSpec& spec,
                          const Task& task);

/// Mean reward of `policy` over k environments of each configuration.
/// Environment seeds depend only on (seed, config index, episode index), so
/// two policies evaluated with the same seed see identical instances.
std::vector<double> evaluate(const RewardFn& policy, std::span<const EnvConfig> configs, std::size_t k,
                             std::uint64_t seed);
std::uint64_t eval_env_seed(std::uint64_t seed, std::size_t config_index, std::size_t episode);

/// Adds weight * d log pi(action | features) / d actor-params into `grad`.
void accumulate_logprob_grad(const PolicySnapshot& snap, std::span<const double> features, std::size_t action,
                             double weight, std::span<double> grad);

void write_curve(std::ostream& out, std::span<const CurveRow> curve);

}  // namespace genet::policy
