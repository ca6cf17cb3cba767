#include "genet/envspace/generators.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

namespace genet {

BandwidthTrace generate_abr_bandwidth(const AbrTraceParams& p, Rng& rng) {
  if (!(p.min_mbps > 0.0 && p.max_mbps >= p.min_mbps && p.duration_s > 0.0))
    throw std::invalid_argument("abr trace params: need 0 < min <= max and duration > 0");
  BandwidthTrace trace;
  trace.duration_s = p.duration_s;
  double t = 0.0;
  double bw = uniform(rng, p.min_mbps, p.max_mbps);
  double next_change = p.change_interval_s + uniform(rng, 1.0, 3.0);
  while (t < p.duration_s) {
    if (t >= next_change) {
      bw = uniform(rng, p.min_mbps, p.max_mbps);
      next_change = t + p.change_interval_s + uniform(rng, 1.0, 3.0);
    }
    trace.points.push_back({t, bw});
    t += 1.0 + uniform(rng, -0.5, 0.5);
  }
  return trace;
}

BandwidthTrace generate_cc_bandwidth(const CcTraceParams& p, Rng& rng) {
  if (!(p.max_mbps > 0.0 && p.duration_s > 0.0))
    throw std::invalid_argument("cc trace params: need max > 0 and duration > 0");
  const double lo = std::min(1.0, p.max_mbps);
  BandwidthTrace trace;
  trace.duration_s = p.duration_s;
  const auto steps = static_cast<std::size_t>(std::ceil(p.duration_s / kCcTraceStepS - 1e-9));
  double bw = uniform(rng, lo, p.max_mbps);
  double next_change = p.change_interval_s;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * kCcTraceStepS;
    if (i > 0 && t + 1e-9 >= next_change) {
      bw = uniform(rng, lo, p.max_mbps);
      next_change = p.change_interval_s > 0.0 ? t + p.change_interval_s : t;
    }
    trace.points.push_back({t, bw});
  }
  return trace;
}

namespace {
void require(const EnvConfig& cfg, UseCase u, std::size_t dims) {
  if (cfg.use_case != u || cfg.values.size() != dims)
    throw std::invalid_argument("config does not belong to the " + std::string(to_string(u)) + " space");
}
}  // namespace

BandwidthTrace gen_abr_trace(const EnvConfig& cfg, Rng& rng) {
  require(cfg, UseCase::kAbr, 6);
  AbrTraceParams p;
  p.max_mbps = cfg[abr_param::kMaxBandwidth];
  p.min_mbps = std::min(kAbrMinBandwidthMbps, p.max_mbps);
  p.change_interval_s = cfg[abr_param::kBwChangeInterval];
  p.duration_s = cfg[abr_param::kVideoLength];
  return generate_abr_bandwidth(p, rng);
}

LinkParams cc_link_params(const EnvConfig& cfg) {
  require(cfg, UseCase::kCc, 6);
  LinkParams link;
  link.one_way_ms = 0.5 * cfg[cc_param::kMinRtt];
  link.queue_packets = std::max(1.0, std::round(cfg[cc_param::kQueue]));
  link.loss_rate = std::clamp(cfg[cc_param::kLossRate], 0.0, 1.0);
  link.delay_noise_ms = std::max(0.0, cfg[cc_param::kDelayNoise]);
  return link;
}

CcTrace gen_cc_trace(const EnvConfig& cfg, Rng& rng) {
  require(cfg, UseCase::kCc, 6);
  CcTraceParams p;
  p.max_mbps = cfg[cc_param::kMaxBandwidth];
  p.change_interval_s = cfg[cc_param::kBwChangeInterval];
  return {generate_cc_bandwidth(p, rng), cc_link_params(cfg)};
}

JobTrace gen_lb_trace(const EnvConfig& cfg, Rng& rng) {
  require(cfg, UseCase::kLb, 5);
  const double mean_interval = cfg[lb_param::kJobInterval];
  const double mean_size = cfg[lb_param::kJobSize];
  const auto count = static_cast<std::size_t>(std::max(1.0, std::round(cfg[lb_param::kNumJobs])));
  if (!(mean_interval > 0.0 && mean_size > 0.0))
    throw std::invalid_argument("lb config: job interval and size must be positive");
  const double scale = mean_size * (kJobSizeParetoShape - 1.0) / kJobSizeParetoShape;
  std::exponential_distribution<double> gap(1.0 / mean_interval);
  JobTrace trace;
  trace.jobs.reserve(count);
  double t = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    t += gap(rng);
    // Inverse-CDF Pareto draw; 1-u keeps the base strictly positive.
    const double u = 1.0 - uniform01(rng);
    trace.jobs.push_back({t, scale / std::pow(u, 1.0 / kJobSizeParetoShape)});
  }
  return trace;
}

void TraceCorpus::add(BandwidthTrace trace, std::string name) {
  trace.validate();
  const double mx = trace.max_mbps();
  const double sd = trace.stddev_mbps();
  entries_.push_back({std::move(trace), std::move(name), mx, sd});
}

std::vector<std::string> list_trace_files(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error("trace directory not found: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() != ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

TraceCorpus TraceCorpus::load_directory(const std::string& dir) {
  TraceCorpus corpus;
  for (const auto& f : list_trace_files(dir))
    corpus.add(load_bandwidth_trace(f), std::filesystem::path(f).filename().string());
  return corpus;
}

std::vector<std::size_t> TraceCorpus::matching(double target, double tolerance) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (std::abs(entries_[i].max_mbps - target) <= tolerance * target) out.push_back(i);
  return out;
}

BandwidthTrace mix_recorded_trace(const EnvConfig& cfg, const TraceCorpus& corpus, double w_trace,
                                  Rng& rng, std::optional<std::size_t>* chosen) {
  if (chosen) chosen->reset();
  const bool use_recorded = uniform01(rng) < w_trace;
  double target = 0.0;
  switch (cfg.use_case) {
    case UseCase::kAbr: target = cfg.values.at(abr_param::kMaxBandwidth); break;
    case UseCase::kCc: target = cfg.values.at(cc_param::kMaxBandwidth); break;
    case UseCase::kLb: throw std::invalid_argument("load balancing has no bandwidth traces");
  }
  if (use_recorded && !corpus.empty()) {
    const auto matches = corpus.matching(target, kTraceMatchTolerance);
    if (!matches.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, matches.size() - 1);
      const std::size_t idx = matches[pick(rng)];
      if (chosen) *chosen = idx;
      return corpus.trace(idx);
    }
  }
  if (cfg.use_case == UseCase::kAbr) return gen_abr_trace(cfg, rng);
  return gen_cc_trace(cfg, rng).bandwidth;
}

}  // namespace genet
