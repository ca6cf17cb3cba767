#include "genet/envspace/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace genet {

void BandwidthTrace::validate() const {
  if (points.empty()) throw std::invalid_argument("bandwidth trace is empty");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].mbps > 0.0) || !std::isfinite(points[i].mbps))
      throw std::invalid_argument("bandwidth trace: nonpositive bandwidth at row " + std::to_string(i));
    if (i > 0 && !(points[i].time_s > points[i - 1].time_s))
      throw std::invalid_argument("bandwidth trace: timestamps not strictly increasing at row " +
                                  std::to_string(i));
  }
  if (!(duration_s > points.back().time_s))
    throw std::invalid_argument("bandwidth trace: duration must exceed the last timestamp");
}

double BandwidthTrace::max_mbps() const {
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, p.mbps);
  return m;
}

namespace {
template <class F>
void for_each_segment(const BandwidthTrace& t, F&& f) {
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    const double end = i + 1 < t.points.size() ? t.points[i + 1].time_s : t.duration_s;
    f(end - t.points[i].time_s, t.points[i].mbps);
  }
}
}  // namespace

double BandwidthTrace::mean_mbps() const {
  double area = 0.0, len = 0.0;
  for_each_segment(*this, [&](double dt, double bw) {
    area += dt * bw;
    len += dt;
  });
  return len > 0.0 ? area / len : 0.0;
}

double BandwidthTrace::stddev_mbps() const {
  const double m = mean_mbps();
  double acc = 0.0, len = 0.0;
  for_each_segment(*this, [&](double dt, double bw) {
    acc += dt * (bw - m) * (bw - m);
    len += dt;
  });
  return len > 0.0 ? std::sqrt(acc / len) : 0.0;
}

void JobTrace::validate() const {
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!(jobs[i].size_bytes > 0.0))
      throw std::invalid_argument("job trace: nonpositive size at row " + std::to_string(i));
    if (i > 0 && jobs[i].arrival_ms < jobs[i - 1].arrival_ms)
      throw std::invalid_argument("job trace: arrivals decrease at row " + std::to_string(i));
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

namespace {

std::vector<std::pair<double, double>> read_pairs(std::istream& in, const char* what) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    double a = 0, b = 0;
    bool ok = comma != std::string::npos;
    if (ok) {
      auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
        return s;
      };
      auto sa = trim(std::string_view(line).substr(0, comma));
      auto sb = trim(std::string_view(line).substr(comma + 1));
      auto ra = std::from_chars(sa.data(), sa.data() + sa.size(), a);
      auto rb = std::from_chars(sb.data(), sb.data() + sb.size(), b);
      ok = ra.ec == std::errc() && ra.ptr == sa.data() + sa.size() && rb.ec == std::errc() &&
           rb.ptr == sb.data() + sb.size();
    }
    if (!ok) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw std::invalid_argument(std::string(what) + ": malformed line " + std::to_string(lineno));
    }
    rows.emplace_back(a, b);
  }
  return rows;
}

}  // namespace

void write_bandwidth_trace(std::ostream& out, const BandwidthTrace& trace) {
  out << "timestamp_s,bandwidth_mbps\n";
  for (const auto& p : trace.points) out << format_double(p.time_s) << ',' << format_double(p.mbps) << '\n';
}

BandwidthTrace read_bandwidth_trace(std::istream& in) {
  BandwidthTrace t;
  for (auto [ts, bw] : read_pairs(in, "bandwidth trace")) t.points.push_back({ts, bw});
  if (t.points.empty()) throw std::invalid_argument("bandwidth trace is empty");
  // The file carries no duration; the last row is given the preceding step
  // (or one second for single-row traces).
  const double step = t.points.size() > 1
                          ? t.points.back().time_s - t.points[t.points.size() - 2].time_s
                          : 1.0;
  t.duration_s = t.points.back().time_s + (step > 0.0 ? step : 1.0);
  t.validate();
  return t;
}

void write_job_trace(std::ostream& out, const JobTrace& trace) {
  out << "arrival_ms,job_size_bytes\n";
  for (const auto& j : trace.jobs) out << format_double(j.arrival_ms) << ',' << format_double(j.size_bytes) << '\n';
}

JobTrace read_job_trace(std::istream& in) {
  JobTrace t;
  for (auto [arrival, size] : read_pairs(in, "job trace")) t.jobs.push_back({arrival, size});
  t.validate();
  return t;
}

void save_bandwidth_trace(const std::string& path, const BandwidthTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_bandwidth_trace(out, trace);
}

BandwidthTrace load_bandwidth_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_bandwidth_trace(in);
}

void save_job_trace(const std::string& path, const JobTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_job_trace(out, trace);
}

JobTrace load_job_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_job_trace(in);
}

}  // namespace genet
