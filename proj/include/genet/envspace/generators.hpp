#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "genet/common/rng.hpp"
#include "genet/envspace/space.hpp"
#include "genet/envspace/trace.hpp"

namespace genet {

/// Bandwidth floor of the synthetic ABR generator (Mbps).
inline constexpr double kAbrMinBandwidthMbps = 0.2;
/// Shape of the Pareto job-size distribution; the scale is solved from the
/// configured mean.
inline constexpr double kJobSizeParetoShape = 1.5;
/// Length of a synthetic congestion-control environment.
inline constexpr double kCcTraceDurationS = 10.0;
/// Grid step of congestion-control traces.
inline constexpr double kCcTraceStepS = 0.1;

struct AbrTraceParams {
  double min_mbps = kAbrMinBandwidthMbps;
  double max_mbps = 5.0;
  double change_interval_s = 5.0;
  double duration_s = 196.0;
};

/// ~1 s timestamps with U[-0.5, 0.5] jitter; bandwidth redrawn from
/// U[min, max] every change interval plus U[1, 3] seconds.
BandwidthTrace generate_abr_bandwidth(const AbrTraceParams& params, Rng& rng);

struct CcTraceParams {
  double max_mbps = 3.16;
  double change_interval_s = 7.5;
  double duration_s = kCcTraceDurationS;
};

/// 0.1 s grid; bandwidth ~ U[min(1, max), max] Mbps redrawn every change
/// interval (every step when the interval is not positive).
BandwidthTrace generate_cc_bandwidth(const CcTraceParams& params, Rng& rng);

BandwidthTrace gen_abr_trace(const EnvConfig& cfg, Rng& rng);
CcTrace gen_cc_trace(const EnvConfig& cfg, Rng& rng);
JobTrace gen_lb_trace(const EnvConfig& cfg, Rng& rng);

/// Side-channel link parameters of a CC configuration.
LinkParams cc_link_params(const EnvConfig& cfg);

/// Regular files of `dir` sorted by path, skipping *.json (manifests).
std::vector<std::string> list_trace_files(const std::string& dir);

/// Recorded bandwidth traces indexed by their maximum bandwidth.
class TraceCorpus {
 public:
  TraceCorpus() = default;

  void add(BandwidthTrace trace, std::string name = {});
  /// Loads every file of list_trace_files(dir).
  static TraceCorpus load_directory(const std::string& dir);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const BandwidthTrace& trace(std::size_t i) const { return entries_.at(i).trace; }
  const std::string& name(std::size_t i) const { return entries_.at(i).name; }

  /// Indices of traces whose max bandwidth lies within
  /// target * (1 +/- tolerance), in insertion order.
  std::vector<std::size_t> matching(double target_max_mbps, double tolerance) const;

 private:
  struct Entry {
    BandwidthTrace trace;
    std::string name;
    double max_mbps;
    double stddev_mbps;
  };
  std::vector<Entry> entries_;
};

inline constexpr double kTraceMatchTolerance = 0.2;

/// With probability w_trace, replaces the synthetic bandwidth of an ABR or
/// CC configuration with a recorded trace whose max bandwidth matches the
/// configuration's bandwidth parameter; otherwise (or when nothing matches)
/// falls through to the synthetic generator. The coin is always drawn first
/// so the synthetic stream is identical whether or not a corpus is present.
BandwidthTrace mix_recorded_trace(const EnvConfig& cfg, const TraceCorpus& corpus, double w_trace,
                                  Rng& rng, std::optional<std::size_t>* chosen = nullptr);

}  // namespace genet
