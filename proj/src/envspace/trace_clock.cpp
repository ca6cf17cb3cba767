#include "genet/envspace/trace_clock.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

namespace genet {

TraceClock::TraceClock(const BandwidthTrace& trace, bool loop, double start_elapsed)
    : trace_(&trace), loop_(loop) {
  if (trace.points.empty()) throw std::invalid_argument("trace clock needs a nonempty trace");
  const double t0 = trace.points.front().time_s;
  pos_ = t0;
  if (start_elapsed <= 0.0) return;
  const double period = trace.duration_s - t0;
  double offset = start_elapsed;
  if (loop_) {
    offset = std::fmod(start_elapsed, period);
  } else if (offset >= period) {
    exhausted_ = true;
    pos_ = trace.duration_s;
    seg_ = trace.points.size() - 1;
    elapsed_ = start_elapsed;
    return;
  }
  pos_ = t0 + offset;
  auto it = std::upper_bound(trace.points.begin(), trace.points.end(), pos_,
                             [](double t, const BandwidthPoint& p) { return t < p.time_s; });
  seg_ = static_cast<std::size_t>(std::distance(trace.points.begin(), it)) - 1;
  if (pos_ >= segment_end()) next_segment();
  elapsed_ = start_elapsed;
}

double TraceClock::segment_end() const {
  return seg_ + 1 < trace_->points.size() ? trace_->points[seg_ + 1].time_s : trace_->duration_s;
}

void TraceClock::next_segment() {
  if (seg_ + 1 < trace_->points.size()) {
    ++seg_;
    pos_ = trace_->points[seg_].time_s;
  } else if (loop_) {
    seg_ = 0;
    pos_ = trace_->points.front().time_s;
  } else {
    exhausted_ = true;
    pos_ = trace_->duration_s;
  }
}

void TraceClock::advance(double dt) {
  if (dt <= 0.0) return;
  const double period = trace_->duration_s - trace_->points.front().time_s;
  if (loop_ && period > 0.0 && dt > period) {
    // Whole periods leave the position unchanged.
    const double whole = std::floor(dt / period);
    elapsed_ += whole * period;
    dt -= whole * period;
  }
  while (dt > 0.0 && !exhausted_) {
    const double room = segment_end() - pos_;
    if (dt < room) {
      pos_ += dt;
      elapsed_ += dt;
      return;
    }
    dt -= room;
    elapsed_ += room;
    next_segment();
  }
  if (exhausted_) elapsed_ += std::max(dt, 0.0);
}

std::optional<double> TraceClock::transfer(double megabits) {
  double taken = 0.0;
  while (megabits > 0.0) {
    if (exhausted_) return std::nullopt;
    const double bw = trace_->points[seg_].mbps;
    const double room = segment_end() - pos_;
    const double capacity = bw * room;
    if (megabits <= capacity) {
      const double dt = megabits / bw;
      pos_ += dt;
      if (pos_ >= segment_end()) next_segment();
      elapsed_ += dt;
      return taken + dt;
    }
    megabits -= capacity;
    taken += room;
    elapsed_ += room;
    next_segment();
  }
  return taken;
}

}  // namespace genet
