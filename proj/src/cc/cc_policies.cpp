#include "genet/cc/cc_policies.hpp"

#include <algorithm>
#include <cmath>

namespace genet::cc {

double Cubic::initial_rate(const CcEnv& env) {
  rtt_ = std::max(env.base_rtt_s(), 1e-3);
  return std::clamp(cwnd_ / rtt_, kMinRatePps, kMaxRatePps);
}

double Cubic::next_rate(const MonitorReport& r, double, double now_s) {
  if (r.acked > 0) rtt_ = std::max(r.avg_rtt_s, 1e-3);
  if (r.lost > 0) {
    w_max_ = cwnd_;
    cwnd_ = std::max(cwnd_ * kBeta, kMinWindow);
    ssthresh_ = cwnd_;
    epoch_start_ = now_s;
    k_ = std::cbrt(w_max_ * (1.0 - kBeta) / kC);
  } else if (cwnd_ < ssthresh_) {
    cwnd_ += static_cast<double>(r.acked);
  } else {
    if (epoch_start_ < 0.0) {
      epoch_start_ = now_s;
      w_max_ = cwnd_;
      k_ = 0.0;
    }
    const double t = now_s - epoch_start_;
    const double target = kC * std::pow(t - k_, 3.0) + w_max_;
    // Growth per RTT is bounded by the acknowledged packets (ack clocking).
    cwnd_ = std::max(kMinWindow, std::min(target, cwnd_ + static_cast<double>(r.acked)));
  }
  return std::clamp(cwnd_ / rtt_, kMinRatePps, kMaxRatePps);
}

double Bbr::initial_rate(const CcEnv& env) {
  initial_rate_ = env.initial_rate_pps();
  return std::clamp(kStartupGain * initial_rate_, kMinRatePps, kMaxRatePps);
}

double Bbr::btl_bw() const {
  double m = 0.0;
  for (double b : bw_samples_) m = std::max(m, b);
  return m;
}

double Bbr::pacing_gain() const {
  switch (mode_) {
    case Mode::kStartup: return kStartupGain;
    case Mode::kDrain: return 1.0 / kStartupGain;
    case Mode::kProbeBw: return kCycle[cycle_index_];
    case Mode::kProbeRtt: return 1.0;
  }
  return 1.0;
}

double Bbr::next_rate(const MonitorReport& r, double, double now_s) {
  bool rtt_expired = false;
  if (r.acked > 0) {
    bw_samples_.push_back(r.recv_rate_pps);
    if (bw_samples_.size() > kBwWindowRounds) bw_samples_.pop_front();
    rtt_expired = have_rtt_ && now_s - min_rtt_stamp_ > kMinRttWindowS;
    if (!have_rtt_ || r.avg_rtt_s <= min_rtt_ || rtt_expired) {
      min_rtt_ = r.avg_rtt_s;
      min_rtt_stamp_ = now_s;
      have_rtt_ = true;
    }
  }
  const double bw = btl_bw();
  if (bw <= 0.0) {
    // No delivery feedback yet: keep probing at the startup gain.
    return std::clamp(kStartupGain * std::max(initial_rate_, kMinRatePps), kMinRatePps, kMaxRatePps);
  }

  switch (mode_) {
    case Mode::kStartup:
      if (bw >= full_bw_ * 1.25) {
        full_bw_ = bw;
        full_bw_rounds_ = 0;
      } else if (++full_bw_rounds_ >= 3) {
        mode_ = Mode::kDrain;
      }
      break;
    case Mode::kDrain:
      mode_ = Mode::kProbeBw;
      cycle_index_ = 0;
      break;
    case Mode::kProbeBw:
      cycle_index_ = (cycle_index_ + 1) % kCycle.size();
      break;
    case Mode::kProbeRtt:
      if (now_s >= probe_rtt_until_) {
        mode_ = Mode::kProbeBw;
        cycle_index_ = 0;
      }
      break;
  }
  if (rtt_expired && mode_ != Mode::kProbeRtt) {
    mode_ = Mode::kProbeRtt;
    probe_rtt_until_ = now_s + std::max(kProbeRttDurationS, min_rtt_);
  }
  if (mode_ == Mode::kProbeRtt) {
    return std::clamp(kProbeRttPackets / std::max(min_rtt_, 1e-3), kMinRatePps, kMaxRatePps);
  }
  return std::clamp(pacing_gain() * bw, kMinRatePps, kMaxRatePps);
}

CcEpisode run_cc_episode(const CcEnv& env, CcController& controller, std::uint64_t seed) {
  CcSimulator sim(env, seed);
  CcEpisode ep;
  double rate = controller.initial_rate(env);
  while (!sim.done()) {
    const double mi = sim.next_interval();
    if (mi < 1e-6) break;
    ep.reports.push_back(sim.step(rate, mi));
    rate = controller.next_rate(ep.reports.back(), rate, sim.now());
  }
  ep.reward = ep.reports.empty() ? 0.0 : cc_reward(ep.reports);
  ep.counters = sim.counters();
  return ep;
}

}  // namespace genet::cc
