#include "genet/policy/task.hpp"

#include <algorithm>
#include <stdexcept>

namespace genet::policy {

Architecture Task::architecture() const {
  Architecture a;
  a.inputs = feature_dim;
  a.outputs = action_count;
  return a;
}

RewardFn Task::rule(const std::string& rule) const {
  if (std::find(rule_names.begin(), rule_names.end(), rule) == rule_names.end()) {
    std::string alts;
    for (const auto& r : rule_names) alts += (alts.empty() ? "" : ", ") + r;
    throw std::invalid_argument("unknown baseline '" + rule + "' for " + name + " (available: " + alts + ")");
  }
  auto run = run_rule;
  return [run, rule](const EnvConfig& cfg, std::uint64_t seed) { return run(rule, cfg, seed); };
}

PolicySnapshot Task::init_policy(std::uint64_t seed) const { return init_snapshot(use_case, architecture(), seed); }

double rollout_score(const Task& task, const PolicySnapshot& snap, const EnvConfig& cfg, std::uint64_t env_seed,
                     bool greedy, Rng& rng) {
  auto ep = task.make_episode(cfg, env_seed);
  const Mlp net(snap.arch);
  MlpWorkspace ws;
  Eigen::VectorXd logits;
  std::vector<double> f(task.feature_dim);
  while (!ep->done()) {
    ep->features(f);
    net.forward(snap.actor, f, ws, logits);
    std::size_t a = 0;
    if (greedy) {
      Eigen::Index best = 0;
      logits.maxCoeff(&best);
      a = static_cast<std::size_t>(best);
    } else {
      a = sample_categorical(softmax(logits), uniform01(rng));
    }
    ep->step(a);
  }
  return ep->score();
}

RewardFn rl_reward_fn(const Task& task, const PolicySnapshot& snap) {
  return [task, snap](const EnvConfig& cfg, std::uint64_t seed) {
    Rng unused(0);
    return rollout_score(task, snap, cfg, seed, true, unused);
  };
}

}  // namespace genet::policy
