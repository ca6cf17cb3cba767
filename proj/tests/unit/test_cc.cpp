#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "genet/cc/cc_policies.hpp"
#include "genet/envspace/distribution.hpp"

using namespace genet;
using namespace genet::cc;

namespace {

CcEnv flat(double mbps, double one_way_ms, double queue, double loss, double duration, double noise = 0.0) {
  CcEnv e;
  e.trace = {{{0.0, mbps}}, duration};
  e.link = {one_way_ms, queue, loss, noise};
  e.duration_s = duration;
  return e;
}

// Packets/s delivered and sent over the second half of an episode.
struct Tail {
  double goodput = 0.0;
  double send = 0.0;
};

Tail tail(const CcEpisode& ep, double from_s, double to_s) {
  Tail t;
  for (const auto& r : ep.reports) {
    if (r.start_s < from_s || r.start_s >= to_s) continue;
    t.goodput += r.throughput_pps * r.duration_s;
    t.send += r.send_rate_pps * r.duration_s;
  }
  t.goodput /= (to_s - from_s);
  t.send /= (to_s - from_s);
  return t;
}

// Exact integral of a looping piecewise-constant trace over [a, b].
double megabits_between(const BandwidthTrace& tr, double a, double b) {
  const double t0 = tr.points.front().time_s, period = tr.duration_s - t0;
  double total = 0.0;
  const double base = std::floor(a / period) * period;
  for (double off = base; off < b; off += period) {
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      const double s0 = off + tr.points[k].time_s - t0;
      const double s1 = off + (k + 1 < tr.points.size() ? tr.points[k + 1].time_s : tr.duration_s) - t0;
      const double lo = std::max(s0, a), hi = std::min(s1, b);
      if (hi > lo) total += (hi - lo) * tr.points[k].mbps;
    }
  }
  return total;
}

double reference_reward(const std::vector<MonitorReport>& rs) {
  double s = 0.0;
  for (const auto& r : rs) s += 120.0 * r.throughput_pps - 1000.0 * r.avg_latency_s - 2000.0 * r.loss_rate;
  return s / rs.size();
}

}  // namespace

TEST_SUITE("sim-cc") {

TEST_CASE("reward formula") {
  CHECK(kThroughputCoef == 120.0);
  CHECK(kLatencyCoef == -1000.0);
  CHECK(kLossCoef == -2000.0);
  CHECK(cc_reward(std::vector<MonitorReport>(1)) == 0.0);
  MonitorReport r;
  r.throughput_pps = 100;
  r.avg_latency_s = 0.05;
  r.loss_rate = 0.01;
  CHECK(cc_reward(std::vector<MonitorReport>{r}) == doctest::Approx(11930.0));
  CHECK_THROWS_AS(cc_reward(std::vector<MonitorReport>{}), std::invalid_argument);
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    std::vector<MonitorReport> a(1 + t % 5), b(1 + t % 3);
    for (auto* v : {&a, &b})
      for (auto& x : *v) {
        x.throughput_pps = uniform(rng, 0, 5000);
        x.avg_latency_s = uniform(rng, 0, 2);
        x.loss_rate = uniform(rng, 0, 1);
      }
    CHECK(cc_reward(a) == doctest::Approx(reference_reward(a)));
    auto ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    CHECK(cc_reward(ab) * ab.size() == doctest::Approx(cc_reward(a) * a.size() + cc_reward(b) * b.size()));
  }
}

TEST_CASE("unit conversions and rate action") {
  CHECK(mbps_to_pps(12.0) == doctest::Approx(1000.0));
  CHECK(pps_to_mbps(1000.0) == doctest::Approx(12.0));
  CHECK(apply_rate_delta(100, 0.5) == doctest::Approx(150));
  CHECK(apply_rate_delta(100, -0.5) == doctest::Approx(100 / 1.5));
  CHECK(apply_rate_delta(100, 3.0) == doctest::Approx(150));
  CHECK(apply_rate_delta(100, 0.0) == 100);
  CHECK(apply_rate_delta(kMaxRatePps, 0.5) == kMaxRatePps);
  CHECK(apply_rate_delta(kMinRatePps, -0.5) == kMinRatePps);
  // Symmetric: +d then -d returns to the start.
  CHECK(apply_rate_delta(apply_rate_delta(77, 0.3), -0.3) == doctest::Approx(77));
}

TEST_CASE("under-capacity sending has no loss and base latency") {
  const auto env = flat(12, 40, 50, 0, 5);
  CcSimulator sim(env, 1);
  for (int i = 0; i < 30; ++i) {
    const auto r = sim.step(500, 0.1);
    CHECK(r.loss_rate == 0.0);
    if (r.acked > 0) {
      CHECK(r.avg_latency_s == doctest::Approx(0.08));
      CHECK(r.min_rtt_s <= r.avg_rtt_s);
    }
  }
  CHECK(sim.counters().dropped_queue == 0);
}

TEST_CASE("sending at twice the link rate loses half the packets") {
  const auto env = flat(12, 25, 200, 0, 30);
  ConstantRate c(2 * mbps_to_pps(12));
  const auto ep = run_cc_episode(env, c, 1);
  double acked = 0, lost = 0;
  for (const auto& r : ep.reports)
    if (r.start_s > 15) acked += r.acked, lost += r.lost;
  CHECK(lost / (acked + lost) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("full random loss delivers nothing") {
  const auto env = flat(12, 25, 50, 1.0, 3);
  ConstantRate c(300);
  const auto ep = run_cc_episode(env, c, 3);
  for (const auto& r : ep.reports) CHECK(r.throughput_pps == 0.0);
  CHECK(ep.counters.delivered == 0);
}

TEST_CASE("constant-rate episode by hand") {
  // 100 pps on an idle 12 Mbps link with a 100 ms RTT: every MI lasts 0.1 s,
  // every packet sees exactly the base RTT.
  const auto env = flat(12, 50, 100, 0, 10);
  ConstantRate c(100);
  const auto ep = run_cc_episode(env, c, 5);
  const double n = static_cast<double>(ep.reports.size());
  CHECK(n == doctest::Approx(100).epsilon(0.02));
  for (const auto& r : ep.reports) {
    CHECK(r.avg_latency_s == doctest::Approx(0.1));
    CHECK(r.duration_s == doctest::Approx(0.1));
  }
  CHECK(ep.reports.front().acked <= 1);
  const double delivered = static_cast<double>(ep.counters.delivered);
  CHECK(delivered >= 985);
  CHECK(ep.reward == doctest::Approx(120.0 * delivered / (0.1 * n) - 100.0).epsilon(1e-9));
}

TEST_CASE("zero-length episode is empty") {
  auto env = flat(12, 50, 100, 0, 10);
  env.duration_s = 0.0;
  ConstantRate c(100);
  const auto ep = run_cc_episode(env, c, 5);
  CHECK(ep.reports.empty());
  CHECK(ep.reward == 0.0);
}

TEST_CASE("episodes are deterministic given the seed") {
  const auto env = flat(5, 30, 20, 0.02, 10, 5.0);
  Bbr a, b;
  const auto ea = run_cc_episode(env, a, 11), eb = run_cc_episode(env, b, 11);
  std::ostringstream oa, ob;
  write_cc_log(oa, ea.reports);
  write_cc_log(ob, eb.reports);
  CHECK(oa.str() == ob.str());
  CHECK(oa.str().rfind("mi,send_rate_pps,throughput_pps,latency_s,loss_rate,reward\n", 0) == 0);
}

TEST_CASE("cubic fills a deep clean link") {
  const auto env = flat(12, 25, 200, 0, 30);
  Cubic c;
  const auto ep = run_cc_episode(env, c, 7);
  CHECK(tail(ep, 15, 30).goodput / mbps_to_pps(12) > 0.9);
}

TEST_CASE("cubic cuts its window by beta on loss") {
  Cubic c;
  CcEnv env = flat(12, 25, 200, 0, 30);
  c.initial_rate(env);
  MonitorReport r;
  r.acked = 40;
  r.avg_rtt_s = r.min_rtt_s = 0.05;
  r.duration_s = 0.05;
  double now = 0.05;
  c.next_rate(r, 0, now);
  const double before = c.cwnd();
  r.lost = 1;
  c.next_rate(r, 0, now += 0.05);
  CHECK(c.cwnd() == doctest::Approx(Cubic::kBeta * before));
  CHECK_FALSE(c.in_slow_start());
}

TEST_CASE("cubic starves under random loss on a high-BDP link") {
  const auto env = flat(50, 50, 200, 0.05, 30);
  Cubic c;
  const auto ep = run_cc_episode(env, c, 7);
  CHECK(tail(ep, 15, 30).goodput / mbps_to_pps(50) < 0.1);
}

TEST_CASE("bbr paces near capacity on a stable link") {
  const auto env = flat(12, 25, 200, 0, 30);
  Bbr b;
  const auto ep = run_cc_episode(env, b, 7);
  const auto t = tail(ep, 15, 30);
  CHECK(t.send == doctest::Approx(mbps_to_pps(12)).epsilon(0.1));
  CHECK(t.goodput == doctest::Approx(mbps_to_pps(12)).epsilon(0.1));
}

TEST_CASE("bbr tracks a bandwidth halving within two gain cycles") {
  CcEnv env = flat(12, 25, 200, 0, 30);
  env.trace.points = {{0.0, 12.0}, {15.0, 6.0}};
  Bbr b;
  const auto ep = run_cc_episode(env, b, 7);
  // One gain cycle is eight rounds of ~50 ms; start measuring after two.
  const double settle = 15.0 + 2 * 8 * 0.05 * 1.5;
  const auto t = tail(ep, settle, 30);
  CHECK(t.send == doctest::Approx(mbps_to_pps(6)).epsilon(0.1));
}

TEST_CASE("bbr applies the startup gain before any feedback") {
  const auto env = flat(12, 25, 200, 0, 30);
  Bbr b;
  CHECK(b.initial_rate(env) == doctest::Approx(Bbr::kStartupGain * env.initial_rate_pps()));
  CHECK(b.mode() == Bbr::Mode::kStartup);
}

TEST_CASE("bbr probes min rtt every ten seconds") {
  const auto env = flat(12, 25, 200, 0, 30);
  Bbr b;
  CcSimulator sim(env, 3);
  double rate = b.initial_rate(env);
  int probes = 0;
  bool in_probe = false;
  while (!sim.done()) {
    const auto r = sim.step(rate, sim.next_interval());
    rate = b.next_rate(r, rate, sim.now());
    const bool p = b.mode() == Bbr::Mode::kProbeRtt;
    probes += p && !in_probe;
    in_probe = p;
  }
  CHECK(probes >= 2);
  CHECK(probes <= 3);
}

TEST_CASE("packet conservation, queue bound and fluid bound under fuzzing") {
  ConfigDistribution dist(preset_space(UseCase::kCc, Preset::kRL3).with_range("delay_noise", 0, 20));
  Rng rng(19);
  for (int e = 0; e < 200; ++e) {
    const auto cfg = dist.sample_base(rng);
    const auto env = make_cc_env(cfg, rng);
    CcSimulator sim(env, e);
    sim.record_service_starts(true);
    double rate = env.initial_rate_pps();
    while (!sim.done()) {
      sim.step(rate, sim.next_interval());
      rate = apply_rate_delta(rate, uniform(rng, -0.5, 0.5));
      const auto& c = sim.counters();
      REQUIRE(c.sent == c.delivered + c.dropped_queue + c.dropped_random + c.in_flight);
      REQUIRE(sim.queue_occupancy() <= env.link.queue_packets);
    }
    REQUIRE(sim.max_queue_seen() <= env.link.queue_packets);
    // Services starting in any window fit the window's capacity plus one packet.
    const auto& starts = sim.service_starts();
    for (std::size_t i = 0; i + 1 < starts.size(); i += 1 + starts.size() / 40) {
      const std::size_t j = std::min(starts.size() - 1, i + 50);
      const double capacity_pkts = megabits_between(env.trace, starts[i], starts[j]) * 1e6 / (8 * kPacketBytes);
      REQUIRE(static_cast<double>(j - i) <= capacity_pkts + 1.0 + 1e-6);
    }
  }
}

TEST_CASE("next interval follows the smoothed rtt and the clock") {
  const auto env = flat(12, 100, 50, 0, 1);
  CcSimulator sim(env, 1);
  CHECK(sim.next_interval() == doctest::Approx(0.2));
  sim.step(10, 0.9);
  CHECK(sim.next_interval() == doctest::Approx(0.1));
  CHECK_THROWS_AS(sim.step(10, 0.0), std::invalid_argument);
}

}  // TEST_SUITE
