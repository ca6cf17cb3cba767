#include "genet/policy/trainer.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "genet/common/parallel.hpp"
#include "genet/common/stats.hpp"
#include "genet/envspace/trace.hpp"

namespace genet::policy {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

struct Rollout {
  std::vector<double> features;  // steps x feature_dim, row-major
  std::vector<std::size_t> actions;
  std::vector<double> rewards;
  std::vector<double> returns;   // scaled discounted returns
  std::vector<double> values;
  double score = 0.0;
};

bool all_finite(std::span<const double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

void TrainSpec::validate() const {
  if (configs_per_iteration < 1 || envs_per_config < 1)
    throw std::invalid_argument("train spec: K and N must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("train spec: learning rate must be finite and nonnegative");
  if (!(entropy_weight >= 0.0) || !(value_weight >= 0.0))
    throw std::invalid_argument("train spec: loss weights must be nonnegative");
}

void accumulate_logprob_grad(const PolicySnapshot& snap, std::span<const double> features, std::size_t action,
                             double weight, std::span<double> grad) {
  Mlp net(snap.arch);
  MlpWorkspace ws;
  Eigen::VectorXd logits;
  net.forward(snap.actor, features, ws, logits);
  Eigen::VectorXd g = -softmax(logits) * weight;
  g[static_cast<Eigen::Index>(action)] += weight;
  net.backward(snap.actor, g, ws, grad);
}

TrainResult train_uniform(const ConfigDistribution& dist, PolicySnapshot theta, const TrainSpec& spec,
                          const Task& task) {
  spec.validate();
  theta.validate();
  if (theta.arch.inputs != task.feature_dim || theta.arch.outputs != task.action_count)
    throw std::invalid_argument("train_uniform: snapshot architecture does not match task " + task.name);
  if (!(task.gamma >= 0.0 && task.gamma <= 1.0)) throw std::invalid_argument("train_uniform: task discount outside [0,1]");

  const Mlp actor(theta.arch);
  const Mlp critic(theta.critic_arch());
  const std::size_t na = theta.actor.size();
  const std::size_t nc = theta.critic.size();
  if (theta.optimizer.m.empty()) {
    theta.optimizer.m.assign(na + nc, 0.0);
    theta.optimizer.v.assign(na + nc, 0.0);
  }
  const std::size_t K = spec.configs_per_iteration;
  const std::size_t N = spec.envs_per_config;
  const std::size_t F = task.feature_dim;

  TrainResult result;
  for (std::size_t local = 0; local < spec.iterations; ++local) {
    const std::uint64_t it = theta.iteration;
    Rng cfg_rng(derive_seed(spec.seed, {1, it}));
    std::vector<EnvConfig> configs;
    for (std::size_t k = 0; k < K; ++k) configs.push_back(dist.sample(cfg_rng));

    std::vector<Rollout> rollouts(K * N);
    parallel_for(K * N, global_jobs(), [&](std::size_t idx) {
      const std::size_t k = idx / N, n = idx % N;
      Rng act_rng(derive_seed(spec.seed, {3, it, k, n}));
      auto ep = task.make_episode(configs[k], derive_seed(spec.seed, {2, it, k, n}));
      Rollout& r = rollouts[idx];
      std::vector<double> f(F);
      MlpWorkspace ws;
      Eigen::VectorXd logits, value;
      while (!ep->done()) {
        ep->features(f);
        actor.forward(theta.actor, f, ws, logits);
        const std::size_t a = sample_categorical(softmax(logits), uniform01(act_rng));
        r.features.insert(r.features.end(), f.begin(), f.end());
        r.actions.push_back(a);
        r.rewards.push_back(ep->step(a));
      }
      r.score = ep->score();
      const std::size_t T = r.actions.size();
      r.returns.assign(T, 0.0);
      r.values.assign(T, 0.0);
      double g = 0.0;
      for (std::size_t t = T; t-- > 0;) {
        g = r.rewards[t] + task.gamma * g;
        r.returns[t] = g * task.value_scale;
      }
      for (std::size_t t = 0; t < T; ++t) {
        critic.forward(theta.critic, std::span<const double>(r.features.data() + t * F, F), ws, value);
        r.values[t] = value[0];
      }
    });

    // Advantages are standardized within each configuration's N rollouts so
    // configurations with large reward magnitudes do not swamp the rest.
    std::vector<double> adv_mean(K, 0.0), adv_std(K, 1.0);
    for (std::size_t k = 0; k < K; ++k) {
      double sum = 0.0, sq = 0.0;
      std::size_t count = 0;
      for (std::size_t n = 0; n < N; ++n) {
        const Rollout& r = rollouts[k * N + n];
        for (std::size_t t = 0; t < r.actions.size(); ++t) {
          const double a = r.returns[t] - r.values[t];
          sum += a;
          sq += a * a;
          ++count;
        }
      }
      if (count == 0) continue;
      adv_mean[k] = sum / static_cast<double>(count);
      adv_std[k] = std::sqrt(std::max(sq / static_cast<double>(count) - adv_mean[k] * adv_mean[k], 0.0)) + 1e-8;
    }

    std::vector<std::vector<double>> grads(rollouts.size());
    parallel_for(rollouts.size(), global_jobs(), [&](std::size_t idx) {
      const Rollout& r = rollouts[idx];
      std::vector<double>& g = grads[idx];
      g.assign(na + nc, 0.0);
      const std::size_t T = r.actions.size();
      if (T == 0) return;
      const double inv_t = 1.0 / (static_cast<double>(T) * static_cast<double>(rollouts.size()));
      std::span<double> ga(g.data(), na), gc(g.data() + na, nc);
      MlpWorkspace ws;
      Eigen::VectorXd logits, value;
      for (std::size_t t = 0; t < T; ++t) {
        std::span<const double> f(r.features.data() + t * F, F);
        actor.forward(theta.actor, f, ws, logits);
        const Eigen::VectorXd lp = log_softmax(logits);
        const Eigen::VectorXd p = lp.array().exp();
        const double entropy = -(p.array() * lp.array()).sum();
        const double adv = (r.returns[t] - r.values[t] - adv_mean[idx / N]) / adv_std[idx / N];
        // d loss / d logits for loss = -adv log p(a) - beta H
        Eigen::VectorXd dz = p * adv;
        dz[static_cast<Eigen::Index>(r.actions[t])] -= adv;
        dz += spec.entropy_weight * (p.array() * (lp.array() + entropy)).matrix();
        actor.backward(theta.actor, dz * inv_t, ws, ga);

        critic.forward(theta.critic, f, ws, value);
        Eigen::VectorXd dv(1);
        dv[0] = 2.0 * spec.value_weight * (value[0] - r.returns[t]) * inv_t;
        critic.backward(theta.critic, dv, ws, gc);
      }
    });

    std::vector<double> grad(na + nc, 0.0);
    for (std::size_t idx = 0; idx < grads.size(); ++idx) {
      if (!all_finite(grads[idx]))
        throw std::runtime_error("train_uniform: non-finite gradient at iteration " + std::to_string(it) +
                                 ", config " + std::to_string(idx / N) + ", env " + std::to_string(idx % N));
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += grads[idx][i];
    }

    auto& opt = theta.optimizer;
    ++opt.step;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(opt.step));
    for (std::size_t i = 0; i < grad.size(); ++i) {
      opt.m[i] = kAdamBeta1 * opt.m[i] + (1.0 - kAdamBeta1) * grad[i];
      opt.v[i] = kAdamBeta2 * opt.v[i] + (1.0 - kAdamBeta2) * grad[i] * grad[i];
      const double delta = spec.learning_rate * (opt.m[i] / bc1) / (std::sqrt(opt.v[i] / bc2) + kAdamEps);
      double& p = i < na ? theta.actor[i] : theta.critic[i - na];
      p -= delta;
    }

    std::vector<double> scores;
    for (const auto& r : rollouts) scores.push_back(r.score);
    result.curve.push_back({it, stats::mean(scores), stats::stddev(scores)});
    ++theta.iteration;
  }
  result.snapshot = std::move(theta);
  return result;
}

std::uint64_t eval_env_seed(std::uint64_t seed, std::size_t config_index, std::size_t episode) {
  return derive_seed(seed, {0xe7a1, config_index, episode});
}

std::vector<double> evaluate(const RewardFn& policy, std::span<const EnvConfig> configs, std::size_t k,
                             std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("evaluate: k must be at least 1");
  std::vector<double> rewards(configs.size() * k);
  parallel_for(rewards.size(), global_jobs(), [&](std::size_t idx) {
    rewards[idx] = policy(configs[idx / k], eval_env_seed(seed, idx / k, idx % k));
  });
  std::vector<double> means(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += rewards[c * k + i];
    means[c] = s / static_cast<double>(k);
  }
  return means;
}

void write_curve(std::ostream& out, std::span<const CurveRow> curve) {
  out << "iteration,mean_reward,std_reward\n";
  for (const auto& r : curve)
    out << r.iteration << ',' << format_double(r.mean_reward) << ',' << format_double(r.std_reward) << '\n';
}

}  // namespace genet::policy
