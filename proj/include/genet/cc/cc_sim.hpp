#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <queue>
#include <span>
#include <vector>

#include "genet/common/rng.hpp"
#include "genet/envspace/space.hpp"
#include "genet/envspace/trace.hpp"
#include "genet/envspace/trace_clock.hpp"

namespace genet::cc {

inline constexpr double kPacketBytes = 1500.0;
// Reward coefficients: throughput (packets/s), latency (s), loss (fraction).
inline constexpr double kThroughputCoef = 120.0;
inline constexpr double kLatencyCoef = -1000.0;
inline constexpr double kLossCoef = -2000.0;

inline constexpr double kMinRatePps = 1.0;
inline constexpr double kMaxRatePps = 1e5;
inline constexpr double kMinMonitorIntervalS = 0.01;
/// Monitor interval length as a multiple of the smoothed RTT.
inline constexpr double kMonitorIntervalRttFactor = 1.0;

double mbps_to_pps(double mbps);
double pps_to_mbps(double pps);

struct CcEnv {
  BandwidthTrace trace;
  LinkParams link;
  double duration_s = 10.0;

  double base_rtt_s() const { return 2.0 * link.one_way_ms / 1000.0; }
  /// Starting send rate shared by every controller: ten packets per base RTT.
  double initial_rate_pps() const;
  void validate() const;
};

CcEnv make_cc_env(const EnvConfig& cfg, Rng& rng);
/// Recorded bandwidth with side-channel link parameters taken from cfg.
CcEnv make_cc_env(const EnvConfig& cfg, BandwidthTrace trace);

struct MonitorReport {
  std::size_t index = 0;
  double start_s = 0.0;
  double duration_s = 0.0;
  double send_rate_pps = 0.0;
  double throughput_pps = 0.0;  // packets acknowledged per second
  double recv_rate_pps = 0.0;
  double avg_latency_s = 0.0;   // mean RTT of packets acknowledged in the MI
  double avg_rtt_s = 0.0;
  double min_rtt_s = 0.0;       // connection minimum so far
  double rtt_inflation = 0.0;   // (avg - min) / min
  double loss_rate = 0.0;       // lost / (lost + acked) among resolved packets
  std::size_t sent = 0;
  std::size_t acked = 0;
  std::size_t lost = 0;
};

/// Cumulative packet accounting; every sent packet is in exactly one bucket.
struct PacketCounters {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_queue = 0;
  std::uint64_t dropped_random = 0;
  std::uint64_t in_flight = 0;
};

/// Packet-level single-bottleneck simulator. Packets leave the sender at the
/// configured rate, are lost at random with the link's loss rate, wait in a
/// drop-tail FIFO of `queue_packets`, and are served at the trace bandwidth.
/// A packet's RTT is 2 x one-way latency + queueing wait + truncated Gaussian
/// noise; losses are detected one base RTT after sending.
class CcSimulator {
 public:
  CcSimulator(const CcEnv& env, std::uint64_t seed);

  MonitorReport step(double rate_pps, double mi_s);

  double now() const { return now_; }
  bool done() const { return now_ >= env_->duration_s - 1e-9; }
  double srtt_s() const { return srtt_; }
  /// Next monitor interval length (proportional to smoothed RTT), clipped to
  /// the remaining episode time.
  double next_interval() const;
  const PacketCounters& counters() const { return counters_; }
  std::size_t queue_occupancy() const { return queue_.size(); }
  /// Largest occupancy seen by any arriving packet.
  std::size_t max_queue_seen() const { return max_queue_seen_; }
  /// Service start times of accepted packets, for fluid-bound checks.
  const std::vector<double>& service_starts() const { return service_starts_; }
  void record_service_starts(bool on) { record_starts_ = on; }

 private:
  enum class Fate : std::uint8_t { kAcked, kDroppedQueue, kDroppedRandom };
  struct Event {
    double time;
    std::uint64_t seq;
    double latency;
    Fate fate;
    bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
  };

  void send_packet(double t);

  const CcEnv* env_;
  Rng rng_;
  TraceClock clock_;
  double now_ = 0.0;
  double next_send_ = 0.0;
  double link_free_ = 0.0;
  double srtt_;
  double min_rtt_ = 0.0;
  bool have_rtt_ = false;
  std::size_t mi_index_ = 0;
  std::deque<double> queue_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> pending_;
  PacketCounters counters_;
  std::size_t max_queue_seen_ = 0;
  bool record_starts_ = false;
  std::vector<double> service_starts_;
};

inline MonitorReport cc_step(CcSimulator& sim, double rate_pps, double mi_s) { return sim.step(rate_pps, mi_s); }

double cc_mi_reward(const MonitorReport& r);
/// Mean per-MI reward. Throws std::invalid_argument on an empty list.
double cc_reward(std::span<const MonitorReport> reports);

/// Multiplicative rate action: r(1+d) for d >= 0, r/(1-d) for d < 0, with d
/// clamped to [-0.5, 0.5] and the result clamped to the rate limits.
double apply_rate_delta(double rate_pps, double delta);

void write_cc_log(std::ostream& out, std::span<const MonitorReport> reports);

}  // namespace genet::cc
