#include "genet/tasks/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "genet/abr/abr_optimal.hpp"
#include "genet/abr/abr_policies.hpp"
#include "genet/cc/cc_policies.hpp"

namespace genet::tasks {

namespace {

std::uint64_t trace_seed(std::uint64_t env_seed) { return derive_seed(env_seed, {1}); }

class AbrEpisode final : public policy::Episode {
 public:
  explicit AbrEpisode(abr::AbrEnv env) : env_(std::move(env)), state_(abr::initial_state(env_)) {}
  bool done() const override { return state_.chunks_remaining == 0 || state_.truncated; }
  void features(std::span<double> out) const override {
    const auto f = abr::abr_features(env_, state_);
    std::copy(f.begin(), f.end(), out.begin());
  }
  double step(std::size_t a) override {
    const auto r = abr::abr_step(env_, state_, a);
    if (r.truncated) return 0.0;
    chunks_.push_back({r.bitrate_mbps, r.rebuffer_s, r.bitrate_change_mbps});
    return r.reward;
  }
  double score() const override { return abr::abr_reward(chunks_); }

 private:
  abr::AbrEnv env_;
  abr::AbrState state_;
  std::vector<abr::ChunkOutcome> chunks_;
};

class CcEpisode final : public policy::Episode {
 public:
  CcEpisode(cc::CcEnv env, std::uint64_t seed)
      : env_(std::make_unique<cc::CcEnv>(std::move(env))), sim_(*env_, seed), rate_(env_->initial_rate_pps()) {
    // The first interval runs at the initial rate before any decision.
    advance();
  }
  bool done() const override { return sim_.done() || sim_.next_interval() < 1e-6; }
  void features(std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t h = 0; h < kCcHistory && h < reports_.size(); ++h) {
      const auto& r = reports_[reports_.size() - 1 - h];
      const double prev_rtt = reports_.size() - 1 - h > 0 ? reports_[reports_.size() - 2 - h].avg_rtt_s : r.avg_rtt_s;
      const double send_ratio = r.recv_rate_pps > 0.0 ? r.send_rate_pps / r.recv_rate_pps : (r.sent > 0 ? 10.0 : 1.0);
      double* f = out.data() + h * kCcPerMiFeatures;
      f[0] = std::min(r.rtt_inflation, 10.0) / 2.0;
      f[1] = std::clamp((r.avg_rtt_s - prev_rtt) / r.duration_s, -2.0, 2.0);
      f[2] = std::min(send_ratio, 10.0) - 1.0;
      f[3] = std::min(r.loss_rate * 10.0, 5.0);
    }
    out[kCcHistory * kCcPerMiFeatures] = std::log10(rate_) / 5.0;
    out[kCcHistory * kCcPerMiFeatures + 1] = std::log10(1.0 + reports_.back().throughput_pps) / 5.0;
  }
  double step(std::size_t a) override {
    rate_ = cc::apply_rate_delta(rate_, kCcActionDeltas.at(a));
    advance();
    return cc::cc_mi_reward(reports_.back());
  }
  double score() const override { return cc::cc_reward(reports_); }

 private:
  void advance() { reports_.push_back(sim_.step(rate_, sim_.next_interval())); }

  std::unique_ptr<cc::CcEnv> env_;  // stable address for the simulator
  cc::CcSimulator sim_;
  double rate_;
  std::vector<cc::MonitorReport> reports_;
};

class LbEpisode final : public policy::Episode {
 public:
  LbEpisode(lb::LbEnv env, std::uint64_t seed)
      : env_(std::make_unique<lb::LbEnv>(std::move(env))), sim_(*env_, seed) {}
  bool done() const override { return sim_.done(); }
  void features(std::span<double> out) const override { lb_features(sim_.observe(), out); }
  double step(std::size_t a) override {
    const double d = sim_.step(a);
    delays_.push_back(d);
    return -d;
  }
  double score() const override { return lb::lb_reward(delays_); }

 private:
  std::unique_ptr<lb::LbEnv> env_;
  lb::LbSimulator sim_;
  std::vector<double> delays_;
};

BandwidthTrace mixed_trace(const EnvConfig& cfg, Rng& rng, const TraceMix& mix) {
  if (mix.fixed_bandwidth) return *mix.fixed_bandwidth;
  return mix_recorded_trace(cfg, *mix.corpus, mix.weight, rng);
}

}  // namespace

std::uint64_t sim_seed(std::uint64_t env_seed) { return derive_seed(env_seed, {2}); }

abr::AbrEnv make_abr_instance(const EnvConfig& cfg, std::uint64_t env_seed, const TraceMix& mix) {
  Rng rng(trace_seed(env_seed));
  if (mix.corpus || mix.fixed_bandwidth) return abr::make_abr_env(cfg, mixed_trace(cfg, rng, mix));
  return abr::make_abr_env(cfg, rng);
}

cc::CcEnv make_cc_instance(const EnvConfig& cfg, std::uint64_t env_seed, const TraceMix& mix) {
  Rng rng(trace_seed(env_seed));
  if (mix.corpus || mix.fixed_bandwidth) return cc::make_cc_env(cfg, mixed_trace(cfg, rng, mix));
  return cc::make_cc_env(cfg, rng);
}

lb::LbEnv make_lb_instance(const EnvConfig& cfg, std::uint64_t env_seed, const TraceMix& mix) {
  if (mix.fixed_jobs) return lb::make_lb_env(cfg, *mix.fixed_jobs);
  Rng rng(trace_seed(env_seed));
  return lb::make_lb_env(cfg, rng);
}

void lb_features(const lb::LbObservation& obs, std::span<double> out) {
  const std::size_t m = obs.rates.size();
  if (out.size() != 3 * m + 1 + lb::kGapHistory) throw std::invalid_argument("lb_features: wrong output width");
  std::vector<double> finish(m);
  for (std::size_t i = 0; i < m; ++i) finish[i] = (obs.outstanding[i] + obs.job_units) / obs.rates[i];
  const double best = *std::min_element(finish.begin(), finish.end());
  for (std::size_t i = 0; i < m; ++i) {
    out[3 * i] = std::log1p(obs.outstanding[i] / obs.rates[i]) / 5.0;
    out[3 * i + 1] = std::log1p(finish[i]) / 5.0;
    out[3 * i + 2] = std::min(finish[i] / best - 1.0, 4.0);
  }
  out[3 * m] = std::log1p(obs.job_units * 100.0) / 5.0;
  for (std::size_t g = 0; g < lb::kGapHistory; ++g) out[3 * m + 1 + g] = std::log1p(obs.gaps_ms[g] * 10.0) / 3.0;
}

policy::Task abr_task(const TraceMix& mix) {
  policy::Task t;
  t.name = "abr";
  t.use_case = UseCase::kAbr;
  t.feature_dim = abr::kAbrFeatureDim;
  t.action_count = abr::kDefaultLadderMbps.size();
  t.value_scale = 0.1;
  t.make_episode = [mix](const EnvConfig& cfg, std::uint64_t seed) -> std::unique_ptr<policy::Episode> {
    return std::make_unique<AbrEpisode>(make_abr_instance(cfg, seed, mix));
  };
  t.rule_names = {"mpc", "bba"};
  t.default_rule = "mpc";
  t.run_rule = [mix](const std::string& rule, const EnvConfig& cfg, std::uint64_t seed) {
    const auto env = make_abr_instance(cfg, seed, mix);
    if (rule == "bba") return abr::run_abr_episode(env, [](const auto& s, const auto& e) { return abr::bba_decide(s, e); }).reward;
    abr::RobustMpc mpc;
    return abr::run_abr_episode(env, [&](const auto& s, const auto& e) { return mpc.decide(s, e); }).reward;
  };
  t.optimal = [mix](const EnvConfig& cfg, std::uint64_t seed) {
    return abr::abr_optimal(make_abr_instance(cfg, seed, mix)).realized_mean_reward;
  };
  return t;
}

policy::Task cc_task(const TraceMix& mix) {
  policy::Task t;
  t.name = "cc";
  t.use_case = UseCase::kCc;
  t.feature_dim = kCcFeatureDim;
  t.action_count = kCcActionDeltas.size();
  t.value_scale = 1e-5;
  t.make_episode = [mix](const EnvConfig& cfg, std::uint64_t seed) -> std::unique_ptr<policy::Episode> {
    return std::make_unique<CcEpisode>(make_cc_instance(cfg, seed, mix), sim_seed(seed));
  };
  t.rule_names = {"bbr", "cubic"};
  t.default_rule = "bbr";
  t.run_rule = [mix](const std::string& rule, const EnvConfig& cfg, std::uint64_t seed) {
    const auto env = make_cc_instance(cfg, seed, mix);
    if (rule == "cubic") {
      cc::Cubic c;
      return cc::run_cc_episode(env, c, sim_seed(seed)).reward;
    }
    cc::Bbr b;
    return cc::run_cc_episode(env, b, sim_seed(seed)).reward;
  };
  return t;
}

policy::Task lb_task(const TraceMix& mix) {
  policy::Task t;
  t.name = "lb";
  t.use_case = UseCase::kLb;
  t.feature_dim = kLbFeatureDim;
  t.action_count = lb::kServerProfile.size();
  t.value_scale = 1e-2;
  t.make_episode = [mix](const EnvConfig& cfg, std::uint64_t seed) -> std::unique_ptr<policy::Episode> {
    return std::make_unique<LbEpisode>(make_lb_instance(cfg, seed, mix), sim_seed(seed));
  };
  t.rule_names = {"llf", "sjf"};
  t.default_rule = "llf";
  t.run_rule = [mix](const std::string& rule, const EnvConfig& cfg, std::uint64_t seed) {
    const auto env = make_lb_instance(cfg, seed, mix);
    const lb::LbDecider d = rule == "sjf" ? lb::LbDecider(lb::sjf_decide) : lb::LbDecider(lb::llf_decide);
    return lb::run_lb_episode(env, d, sim_seed(seed)).reward;
  };
  return t;
}

policy::Task task_for(UseCase u, const TraceMix& mix) {
  switch (u) {
    case UseCase::kAbr: return abr_task(mix);
    case UseCase::kCc: return cc_task(mix);
    case UseCase::kLb: return lb_task(mix);
  }
  throw std::invalid_argument("task_for: unknown use case");
}

}  // namespace genet::tasks
