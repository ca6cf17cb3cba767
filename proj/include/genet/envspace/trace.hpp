#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace genet {

struct BandwidthPoint {
  double time_s = 0.0;
  double mbps = 0.0;
};

/// Piecewise-constant bandwidth: points[i].mbps holds on
/// [points[i].time_s, points[i+1].time_s); the last point holds until
/// duration_s.
struct BandwidthTrace {
  std::vector<BandwidthPoint> points;
  double duration_s = 0.0;

  /// Throws std::invalid_argument on empty traces, non-increasing
  /// timestamps, nonpositive bandwidth, or a duration not past the last point.
  void validate() const;
  double max_mbps() const;
  double mean_mbps() const;  // time-weighted
  double stddev_mbps() const;  // time-weighted
};

/// Link parameters that travel with a congestion-control trace. They come
/// from the environment configuration, never from a recorded trace.
struct LinkParams {
  double one_way_ms = 50.0;
  double queue_packets = 10.0;
  double loss_rate = 0.0;
  double delay_noise_ms = 0.0;
};

struct CcTrace {
  BandwidthTrace bandwidth;
  LinkParams link;
};

struct Job {
  double arrival_ms = 0.0;
  double size_bytes = 0.0;
};

struct JobTrace {
  std::vector<Job> jobs;

  void validate() const;
};

// Plain-text formats: one "timestamp_s,bandwidth_mbps" (or
// "arrival_ms,job_size_bytes") pair per line; an optional non-numeric header
// line is skipped. Numbers are written in shortest round-trip form.
void write_bandwidth_trace(std::ostream& out, const BandwidthTrace& trace);
BandwidthTrace read_bandwidth_trace(std::istream& in);
void write_job_trace(std::ostream& out, const JobTrace& trace);
JobTrace read_job_trace(std::istream& in);

void save_bandwidth_trace(const std::string& path, const BandwidthTrace& trace);
BandwidthTrace load_bandwidth_trace(const std::string& path);
void save_job_trace(const std::string& path, const JobTrace& trace);
JobTrace load_job_trace(const std::string& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace genet
