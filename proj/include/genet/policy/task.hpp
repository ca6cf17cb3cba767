#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "genet/envspace/space.hpp"
#include "genet/policy/snapshot.hpp"

namespace genet::policy {

/// One environment instance as seen by a learning agent.
class Episode {
 public:
  virtual ~Episode() = default;
  virtual bool done() const = 0;
  /// Writes the current state features (size Task::feature_dim).
  virtual void features(std::span<double> out) const = 0;
  /// Applies an action and returns the per-step reward.
  virtual double step(std::size_t action) = 0;
  /// Episode reward under the use case's reward formula (valid once done).
  virtual double score() const = 0;
};

/// Reward of some policy on the environment instance identified by
/// (configuration, environment seed). Equal seeds mean identical instances,
/// which is what pairs comparisons between policies.
using RewardFn = std::function<double(const EnvConfig&, std::uint64_t env_seed)>;

/// Binds a use case's simulator, state features, action set and rule-based
/// baselines to the generic trainer.
struct Task {
  std::string name;
  UseCase use_case = UseCase::kAbr;
  std::size_t feature_dim = 0;
  std::size_t action_count = 0;
  /// Multiplies returns before they become value-network targets.
  double value_scale = 1.0;
  double gamma = 0.99;
  std::function<std::unique_ptr<Episode>(const EnvConfig&, std::uint64_t env_seed)> make_episode;
  std::vector<std::string> rule_names;
  std::string default_rule;
  std::function<double(const std::string& rule, const EnvConfig&, std::uint64_t env_seed)> run_rule;
  /// Offline optimum on the same instance; empty when intractable.
  RewardFn optimal;

  Architecture architecture() const;
  /// Throws std::invalid_argument naming the valid alternatives when `rule`
  /// is not one of this task's baselines.
  RewardFn rule(const std::string& rule) const;
  PolicySnapshot init_policy(std::uint64_t seed) const;
};

/// Greedy rollout of `snap` (copied into the returned function).
RewardFn rl_reward_fn(const Task& task, const PolicySnapshot& snap);

/// Runs one episode; samples actions from `rng` unless greedy.
double rollout_score(const Task& task, const PolicySnapshot& snap, const EnvConfig& cfg, std::uint64_t env_seed,
                     bool greedy, Rng& rng);

}  // namespace genet::policy
