#include "genet/lb/lb_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "genet/envspace/generators.hpp"

namespace genet::lb {

void LbEnv::validate() const {
  if (rates.size() < 2) throw std::invalid_argument("lb env: need at least 2 servers");
  for (double r : rates)
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("lb env: service rates must be positive");
  if (!(shuffle_prob >= 0.0 && shuffle_prob <= 1.0)) throw std::invalid_argument("lb env: shuffle probability outside [0,1]");
  jobs.validate();
}

namespace {

std::vector<double> scaled_rates(const EnvConfig& cfg) {
  std::vector<double> r;
  for (double p : kServerProfile) r.push_back(p * cfg[lb_param::kServiceRate]);
  return r;
}

std::size_t argmin_cost(const LbObservation& obs, bool include_job) {
  std::size_t best = 0;
  double best_cost = 0.0;
  for (std::size_t i = 0; i < obs.rates.size(); ++i) {
    const double cost = (obs.outstanding[i] + (include_job ? obs.job_units : 0.0)) / obs.rates[i];
    if (i == 0 || cost < best_cost) {
      best = i;
      best_cost = cost;
    }
  }
  return best;
}

}  // namespace

LbEnv make_lb_env(const EnvConfig& cfg, Rng& rng) {
  return make_lb_env(cfg, gen_lb_trace(cfg, rng));
}

LbEnv make_lb_env(const EnvConfig& cfg, JobTrace jobs) {
  if (cfg.use_case != UseCase::kLb) throw std::invalid_argument("make_lb_env: not an lb configuration");
  LbEnv env{scaled_rates(cfg), std::move(jobs), cfg[lb_param::kShuffleProb]};
  env.validate();
  return env;
}

double job_units(const Job& j) { return j.size_bytes / kBytesPerWorkUnit; }

LbSimulator::LbSimulator(const LbEnv& env, std::uint64_t seed)
    : env_(&env), rng_(seed), work_(env.servers(), 0.0) {
  obs_.rates = env.rates;
  if (!env.jobs.jobs.empty()) now_ = env.jobs.jobs.front().arrival_ms;
  prepare_observation();
}

void LbSimulator::prepare_observation() {
  if (done()) return;
  obs_.job_index = next_;
  obs_.job_units = job_units(env_->jobs.jobs[next_]);
  obs_.outstanding = work_;
  obs_.shuffled = env_->shuffle_prob > 0.0 && uniform01(rng_) < env_->shuffle_prob;
  if (obs_.shuffled) std::shuffle(obs_.outstanding.begin(), obs_.outstanding.end(), rng_);
}

double LbSimulator::step(std::size_t server) {
  if (done()) throw std::logic_error("lb step: episode already finished");
  if (server >= work_.size()) throw std::out_of_range("lb step: server index out of range");
  const double units = job_units(env_->jobs.jobs[next_]);
  work_[server] += units;
  const double delay = work_[server] / env_->rates[server];

  const double prev_arrival = env_->jobs.jobs[next_].arrival_ms;
  ++next_;
  if (!done()) {
    const double t = env_->jobs.jobs[next_].arrival_ms;
    const double dt = t - prev_arrival;
    for (std::size_t i = 0; i < work_.size(); ++i) work_[i] = std::max(0.0, work_[i] - env_->rates[i] * dt);
    now_ = t;
    std::copy_backward(obs_.gaps_ms.begin(), obs_.gaps_ms.end() - 1, obs_.gaps_ms.end());
    obs_.gaps_ms[0] = dt;
    prepare_observation();
  }
  return delay;
}

double lb_reward(std::span<const double> delays) {
  if (delays.empty()) throw std::invalid_argument("lb_reward: no jobs");
  return -std::accumulate(delays.begin(), delays.end(), 0.0) / static_cast<double>(delays.size());
}

std::size_t llf_decide(const LbObservation& obs) { return argmin_cost(obs, false); }
std::size_t sjf_decide(const LbObservation& obs) { return argmin_cost(obs, true); }

LbEpisode run_lb_episode(const LbEnv& env, const LbDecider& decide, std::uint64_t seed,
                         std::vector<LbLogRow>* log) {
  LbSimulator sim(env, seed);
  LbEpisode ep;
  while (!sim.done()) {
    const std::size_t job = sim.observe().job_index;
    const std::size_t s = decide(sim.observe());
    const double d = sim.step(s);
    ep.delays.push_back(d);
    ep.assignments.push_back(s);
    if (log) log->push_back({job, s, d});
  }
  ep.reward = lb_reward(ep.delays);
  return ep;
}

void write_lb_log(std::ostream& out, std::span<const LbLogRow> rows) {
  out << "job,server,delay_ms\n";
  for (const auto& r : rows) out << r.job << ',' << r.server << ',' << format_double(r.delay_ms) << '\n';
}

}  // namespace genet::lb
