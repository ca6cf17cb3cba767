#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "genet/cc/cc_sim.hpp"

namespace genet::cc {

/// Rate-based congestion controller, consulted once per monitor interval.
class CcController {
 public:
  virtual ~CcController() = default;
  virtual double initial_rate(const CcEnv& env) { return env.initial_rate_pps(); }
  /// New sending rate (packets/s) given the report of the interval just ended.
  virtual double next_rate(const MonitorReport& report, double current_rate, double now_s) = 0;
};

/// Window-based Cubic driven at monitor-interval granularity: the window
/// grows by the packets acknowledged while in slow start, follows the cubic
/// curve afterwards, and is cut multiplicatively once per interval that saw
/// a loss. The sending rate is cwnd / RTT.
class Cubic final : public CcController {
 public:
  static constexpr double kC = 0.4;
  static constexpr double kBeta = 0.7;
  static constexpr double kInitialWindow = 10.0;
  static constexpr double kMinWindow = 2.0;

  double initial_rate(const CcEnv& env) override;
  double next_rate(const MonitorReport& report, double current_rate, double now_s) override;
  double cwnd() const { return cwnd_; }
  bool in_slow_start() const { return cwnd_ < ssthresh_; }

 private:
  double cwnd_ = kInitialWindow;
  double ssthresh_ = 1e18;
  double w_max_ = 0.0;
  double epoch_start_ = -1.0;
  double k_ = 0.0;
  double rtt_ = 0.1;
};

/// Model-based BBR: windowed-max bottleneck bandwidth over ten rounds,
/// min-RTT refreshed by ProbeRTT every ten seconds, and the usual
/// Startup / Drain / ProbeBW gain schedule.
class Bbr final : public CcController {
 public:
  enum class Mode { kStartup, kDrain, kProbeBw, kProbeRtt };
  static constexpr double kStartupGain = 2.885;
  static constexpr std::array<double, 8> kCycle{1.25, 0.75, 1, 1, 1, 1, 1, 1};
  static constexpr std::size_t kBwWindowRounds = 10;
  static constexpr double kMinRttWindowS = 10.0;
  static constexpr double kProbeRttDurationS = 0.2;
  static constexpr double kProbeRttPackets = 4.0;

  double initial_rate(const CcEnv& env) override;
  double next_rate(const MonitorReport& report, double current_rate, double now_s) override;
  Mode mode() const { return mode_; }
  double btl_bw() const;
  double pacing_gain() const;

 private:
  Mode mode_ = Mode::kStartup;
  std::deque<double> bw_samples_;
  double min_rtt_ = 0.0;
  double min_rtt_stamp_ = 0.0;
  bool have_rtt_ = false;
  double full_bw_ = 0.0;
  int full_bw_rounds_ = 0;
  std::size_t cycle_index_ = 0;
  double probe_rtt_until_ = 0.0;
  double initial_rate_ = 0.0;
};

/// Fixed-rate sender, used for tests and as a trivial reference.
class ConstantRate final : public CcController {
 public:
  explicit ConstantRate(double rate_pps) : rate_(rate_pps) {}
  double initial_rate(const CcEnv&) override { return rate_; }
  double next_rate(const MonitorReport&, double, double) override { return rate_; }

 private:
  double rate_;
};

struct CcEpisode {
  double reward = 0.0;
  std::vector<MonitorReport> reports;
  PacketCounters counters;
};

/// Runs monitor intervals until the trace is used up; reward 0 and no
/// reports when the episode has no time in it.
CcEpisode run_cc_episode(const CcEnv& env, CcController& controller, std::uint64_t seed);

}  // namespace genet::cc
