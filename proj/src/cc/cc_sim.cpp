#include "genet/cc/cc_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "genet/envspace/generators.hpp"

namespace genet::cc {

double mbps_to_pps(double mbps) { return mbps * 1e6 / (8.0 * kPacketBytes); }
double pps_to_mbps(double pps) { return pps * 8.0 * kPacketBytes / 1e6; }

double CcEnv::initial_rate_pps() const {
  return std::clamp(10.0 / std::max(base_rtt_s(), 1e-3), kMinRatePps, kMaxRatePps);
}

void CcEnv::validate() const {
  trace.validate();
  if (!(link.queue_packets >= 1.0)) throw std::invalid_argument("cc env: queue must hold >= 1 packet");
  if (!(link.loss_rate >= 0.0 && link.loss_rate <= 1.0)) throw std::invalid_argument("cc env: loss rate outside [0,1]");
  if (!(link.one_way_ms >= 0.0) || !(link.delay_noise_ms >= 0.0)) throw std::invalid_argument("cc env: negative delay");
  if (!(duration_s > 0.0)) throw std::invalid_argument("cc env: duration must be positive");
}

CcEnv make_cc_env(const EnvConfig& cfg, Rng& rng) {
  auto t = gen_cc_trace(cfg, rng);
  CcEnv env{std::move(t.bandwidth), t.link, kCcTraceDurationS};
  env.duration_s = env.trace.duration_s;
  env.validate();
  return env;
}

CcEnv make_cc_env(const EnvConfig& cfg, BandwidthTrace trace) {
  CcEnv env{std::move(trace), cc_link_params(cfg), 0.0};
  env.duration_s = env.trace.duration_s - env.trace.points.front().time_s;
  env.validate();
  return env;
}

CcSimulator::CcSimulator(const CcEnv& env, std::uint64_t seed)
    : env_(&env), rng_(seed), clock_(env.trace, true), srtt_(std::max(env.base_rtt_s(), 1e-3)) {}

double CcSimulator::next_interval() const {
  const double mi = std::max(kMonitorIntervalRttFactor * srtt_, kMinMonitorIntervalS);
  return std::min(mi, std::max(env_->duration_s - now_, 0.0));
}

void CcSimulator::send_packet(double t) {
  ++counters_.sent;
  ++counters_.in_flight;
  const double base_rtt = env_->base_rtt_s();
  const std::uint64_t seq = counters_.sent;
  if (env_->link.loss_rate > 0.0 && uniform01(rng_) < env_->link.loss_rate) {
    pending_.push({t + base_rtt, seq, 0.0, Fate::kDroppedRandom});
    return;
  }
  while (!queue_.empty() && queue_.front() <= t) queue_.pop_front();
  max_queue_seen_ = std::max(max_queue_seen_, queue_.size());
  if (static_cast<double>(queue_.size()) >= env_->link.queue_packets) {
    pending_.push({t + base_rtt, seq, 0.0, Fate::kDroppedQueue});
    return;
  }
  const double start = std::max(t, link_free_);
  clock_.advance(start - clock_.elapsed());
  const double tx = *clock_.transfer(kPacketBytes * 8.0 / 1e6);
  link_free_ = start + tx;
  queue_.push_back(start);
  if (record_starts_) service_starts_.push_back(start);
  double noise = 0.0;
  if (env_->link.delay_noise_ms > 0.0) {
    noise = std::max(0.0, std::normal_distribution<double>(0.0, env_->link.delay_noise_ms / 1000.0)(rng_));
  }
  const double latency = (start - t) + base_rtt + noise;
  pending_.push({t + latency, seq, latency, Fate::kAcked});
}

MonitorReport CcSimulator::step(double rate_pps, double mi_s) {
  if (!(mi_s > 0.0)) throw std::invalid_argument("cc_step: monitor interval must be positive");
  rate_pps = std::clamp(rate_pps, kMinRatePps, kMaxRatePps);
  MonitorReport r;
  r.index = mi_index_++;
  r.start_s = now_;
  r.duration_s = mi_s;
  const double end = now_ + mi_s;
  const double gap = 1.0 / rate_pps;
  next_send_ = std::max(now_, std::min(next_send_, now_ + gap));
  while (next_send_ < end) {
    send_packet(next_send_);
    ++r.sent;
    next_send_ += gap;
  }
  double latency_sum = 0.0;
  double min_in_mi = 0.0;
  while (!pending_.empty() && pending_.top().time <= end) {
    const Event e = pending_.top();
    pending_.pop();
    --counters_.in_flight;
    switch (e.fate) {
      case Fate::kAcked:
        ++counters_.delivered;
        ++r.acked;
        latency_sum += e.latency;
        min_in_mi = r.acked == 1 ? e.latency : std::min(min_in_mi, e.latency);
        break;
      case Fate::kDroppedQueue:
        ++counters_.dropped_queue;
        ++r.lost;
        break;
      case Fate::kDroppedRandom:
        ++counters_.dropped_random;
        ++r.lost;
        break;
    }
  }
  now_ = end;
  r.send_rate_pps = static_cast<double>(r.sent) / mi_s;
  r.throughput_pps = static_cast<double>(r.acked) / mi_s;
  r.recv_rate_pps = r.throughput_pps;
  if (r.acked > 0) {
    r.avg_latency_s = latency_sum / static_cast<double>(r.acked);
    min_in_mi = std::min(min_in_mi, r.avg_latency_s);  // rounding can put the mean an ulp below
    min_rtt_ = have_rtt_ ? std::min(min_rtt_, min_in_mi) : min_in_mi;
    have_rtt_ = true;
    srtt_ = 0.875 * srtt_ + 0.125 * r.avg_latency_s;
  } else {
    r.avg_latency_s = srtt_;
    if (!have_rtt_) {
      min_rtt_ = srtt_;
      have_rtt_ = true;
    }
    min_rtt_ = std::min(min_rtt_, srtt_);
  }
  r.avg_rtt_s = r.avg_latency_s;
  r.min_rtt_s = min_rtt_;
  r.rtt_inflation = min_rtt_ > 0.0 ? (r.avg_rtt_s - min_rtt_) / min_rtt_ : 0.0;
  const std::size_t resolved = r.acked + r.lost;
  r.loss_rate = resolved > 0 ? static_cast<double>(r.lost) / static_cast<double>(resolved) : 0.0;
  return r;
}

double cc_mi_reward(const MonitorReport& r) {
  return kThroughputCoef * r.throughput_pps + kLatencyCoef * r.avg_latency_s + kLossCoef * r.loss_rate;
}

double cc_reward(std::span<const MonitorReport> reports) {
  if (reports.empty()) throw std::invalid_argument("cc_reward: no monitor intervals");
  double s = 0.0;
  for (const auto& r : reports) s += cc_mi_reward(r);
  return s / static_cast<double>(reports.size());
}

double apply_rate_delta(double rate_pps, double delta) {
  delta = std::clamp(delta, -0.5, 0.5);
  const double next = delta >= 0.0 ? rate_pps * (1.0 + delta) : rate_pps / (1.0 - delta);
  return std::clamp(next, kMinRatePps, kMaxRatePps);
}

void write_cc_log(std::ostream& out, std::span<const MonitorReport> reports) {
  out << "mi,send_rate_pps,throughput_pps,latency_s,loss_rate,reward\n";
  for (const auto& r : reports) {
    out << r.index << ',' << format_double(r.send_rate_pps) << ',' << format_double(r.throughput_pps) << ','
        << format_double(r.avg_latency_s) << ',' << format_double(r.loss_rate) << ','
        << format_double(cc_mi_reward(r)) << '\n';
  }
}

}  // namespace genet::cc
