#pragma once

#include <cstddef>
#include <optional>

#include "genet/envspace/trace.hpp"

namespace genet {

/// Walks a bandwidth trace forward in time. `elapsed()` is unwrapped time
/// since the clock started; when looping, the trace position wraps to the
/// first timestamp after `duration_s`.
class TraceClock {
 public:
  TraceClock(const BandwidthTrace& trace, bool loop, double start_elapsed = 0.0);

  double elapsed() const { return elapsed_; }
  bool exhausted() const { return exhausted_; }
  double bandwidth_mbps() const { return trace_->points[seg_].mbps; }

  /// Idles for dt seconds.
  void advance(double dt);
  /// Sends `megabits` starting now; returns the transfer time, or nullopt if
  /// a non-looping trace ran out (the clock then stays exhausted).
  std::optional<double> transfer(double megabits);

 private:
  double segment_end() const;
  void next_segment();

  const BandwidthTrace* trace_;
  bool loop_;
  std::size_t seg_ = 0;
  double pos_ = 0.0;      // absolute trace time within [t0, duration)
  double elapsed_ = 0.0;
  bool exhausted_ = false;
};

}  // namespace genet
