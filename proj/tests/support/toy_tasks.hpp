#pragma once

// Small synthetic tasks shared by the unit and acceptance suites.

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "genet/envspace/space.hpp"
#include "genet/policy/task.hpp"
#include "genet/policy/trainer.hpp"

namespace genet::toy {

/// One-dimensional unit space used by the toy tasks.
inline EnvSpace unit_space(std::size_t dims = 1) {
  std::vector<ParamSpec> params;
  for (std::size_t i = 0; i < dims; ++i)
    params.push_back({"x" + std::to_string(i), "", 0.0, 1.0, Scale::kLinear, 0.5});
  return EnvSpace(UseCase::kAbr, std::move(params));
}

/// Contextual bandit: the context bit is drawn from the env seed and the arm
/// matching it pays 1.
class BanditEpisode final : public policy::Episode {
 public:
  explicit BanditEpisode(std::uint64_t seed) {
    Rng g(seed);
    s_ = uniform01(g) < 0.5 ? 1 : 0;
  }
  bool done() const override { return done_; }
  void features(std::span<double> out) const override {
    out[0] = s_;
    out[1] = 1 - s_;
  }
  double step(std::size_t a) override {
    done_ = true;
    r_ = static_cast<int>(a) == s_ ? 1.0 : 0.0;
    return r_;
  }
  double score() const override { return r_; }

 private:
  int s_ = 0;
  bool done_ = false;
  double r_ = 0.0;
};

inline policy::Task bandit_task() {
  policy::Task t;
  t.name = "bandit";
  t.feature_dim = 2;
  t.action_count = 2;
  t.make_episode = [](const EnvConfig&, std::uint64_t s) -> std::unique_ptr<policy::Episode> {
    return std::make_unique<BanditEpisode>(s);
  };
  t.rule_names = {"oracle"};
  t.default_rule = "oracle";
  t.run_rule = [](const std::string&, const EnvConfig&, std::uint64_t) { return 1.0; };
  return t;
}

/// Two decisions, deterministic transitions. The second state depends on the
/// first action; total reward is a fixed table entry.
struct TwoStepMdp {
  static constexpr std::size_t kActions = 2;
  std::vector<double> s0{0.3, -0.7, 1.0};
  // Second-step features per first action.
  std::vector<std::vector<double>> s1{{1.1, 0.4, 1.0}, {-0.5, 0.9, 1.0}};
  // reward[a0][a1]
  double reward[2][2] = {{1.0, -0.5}, {0.25, 2.0}};

  /// Expected return under the policy, by full enumeration.
  double value(const policy::PolicySnapshot& snap) const {
    const auto p0 = policy::policy_probs(snap, s0);
    double j = 0.0;
    for (std::size_t a0 = 0; a0 < kActions; ++a0) {
      const auto p1 = policy::policy_probs(snap, s1[a0]);
      for (std::size_t a1 = 0; a1 < kActions; ++a1) j += p0[a0] * p1[a1] * reward[a0][a1];
    }
    return j;
  }

  /// Likelihood-ratio gradient sum_tau P(tau) R(tau) sum_t grad log pi(a_t|s_t).
  std::vector<double> policy_gradient(const policy::PolicySnapshot& snap) const {
    std::vector<double> g(snap.actor.size(), 0.0);
    const auto p0 = policy::policy_probs(snap, s0);
    for (std::size_t a0 = 0; a0 < kActions; ++a0) {
      const auto p1 = policy::policy_probs(snap, s1[a0]);
      for (std::size_t a1 = 0; a1 < kActions; ++a1) {
        const double w = p0[a0] * p1[a1] * reward[a0][a1];
        policy::accumulate_logprob_grad(snap, s0, a0, w, g);
        policy::accumulate_logprob_grad(snap, s1[a0], a1, w, g);
      }
    }
    return g;
  }

  /// Central finite differences of value() in every actor parameter.
  std::vector<double> finite_difference(policy::PolicySnapshot snap, double h = 1e-5) const {
    std::vector<double> g(snap.actor.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = snap.actor[i];
      snap.actor[i] = x + h;
      const double up = value(snap);
      snap.actor[i] = x - h;
      const double down = value(snap);
      snap.actor[i] = x;
      g[i] = (up - down) / (2 * h);
    }
    return g;
  }
};

inline policy::PolicySnapshot two_step_policy(std::uint64_t seed) {
  policy::Architecture arch;
  arch.inputs = 3;
  arch.hidden = {8, 8};
  arch.outputs = TwoStepMdp::kActions;
  auto snap = policy::init_snapshot(UseCase::kAbr, arch, seed);
  // Larger output weights so the gradient is not dominated by the near-uniform start.
  for (double& v : snap.actor) v *= 3.0;
  return snap;
}

/// Relative error max|a-b| / max(max|b|, tiny).
inline double relative_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / std::max(den, 1e-300);
}

/// Family indexed by x in [0, 1]: for x below the threshold any action pays
/// 1, above it only action 1 does. The rule baseline always earns 1, so the
/// gap is concentrated in the rare region.
class RareRegionEpisode final : public policy::Episode {
 public:
  RareRegionEpisode(double x, double threshold) : x_(x), hard_(x >= threshold) {}
  bool done() const override { return done_; }
  void features(std::span<double> out) const override {
    out[0] = x_;
    out[1] = 1.0;
  }
  double step(std::size_t a) override {
    done_ = true;
    r_ = (!hard_ || a == 1) ? 1.0 : 0.0;
    return r_;
  }
  double score() const override { return r_; }

 private:
  double x_;
  bool hard_;
  bool done_ = false;
  double r_ = 0.0;
};

inline policy::Task rare_region_task(double threshold = 0.9) {
  policy::Task t;
  t.name = "rare";
  t.feature_dim = 2;
  t.action_count = 2;
  t.make_episode = [threshold](const EnvConfig& c, std::uint64_t) -> std::unique_ptr<policy::Episode> {
    return std::make_unique<RareRegionEpisode>(c[0], threshold);
  };
  t.rule_names = {"oracle"};
  t.default_rule = "oracle";
  t.run_rule = [](const std::string&, const EnvConfig&, std::uint64_t) { return 1.0; };
  return t;
}

}  // namespace genet::toy
