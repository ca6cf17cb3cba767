#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "genet/envspace/distribution.hpp"
#include "genet/envspace/generators.hpp"
#include "genet/envspace/trace_clock.hpp"

using namespace genet;

namespace {

EnvSpace point_space(const EnvSpace& s) {
  std::vector<ParamSpec> params = s.params();
  for (auto& p : params) p.lo = p.hi = std::clamp(p.default_value, p.lo, p.hi);
  return EnvSpace(s.use_case(), params);
}

// Asymptotic Kolmogorov distribution tail, Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double ks_pvalue(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max(d, std::abs((i + 1) / n - u[i]));
    d = std::max(d, std::abs(u[i] - i / n));
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) q += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(q, 0.0, 1.0);
}

std::string dump(const BandwidthTrace& t) {
  std::ostringstream os;
  write_bandwidth_trace(os, t);
  return os.str();
}

}  // namespace

TEST_SUITE("envspace") {

TEST_CASE("presets carry the published boxes and defaults") {
  const auto abr = preset_space(UseCase::kAbr, Preset::kRL3);
  CHECK(abr.dims() == 6);
  CHECK(abr.param(abr_param::kMaxBandwidth).hi == 1000);
  CHECK(abr.param(abr_param::kMaxBandwidth).default_value == 5);
  CHECK(abr.param(abr_param::kMaxBuffer).default_value == 60);
  const auto cc = preset_space(UseCase::kCc, Preset::kRL2);
  CHECK(cc.param(cc_param::kBwChangeInterval).lo == 3);
  CHECK(cc.param(cc_param::kBwChangeInterval).hi == 8);
  CHECK(cc.param(cc_param::kDelayNoise).degenerate());
  const auto lb = preset_space(UseCase::kLb, Preset::kRL1);
  CHECK(lb.param(lb_param::kShuffleProb).lo == doctest::Approx(0.1));
  CHECK_THROWS_AS(parse_preset("RL4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_use_case("video"), std::invalid_argument);
}

TEST_CASE("unit-cube mapping round trips, log dims in log space") {
  const auto s = preset_space(UseCase::kAbr, Preset::kRL3);
  std::vector<double> u{0.1, 0.2, 0.3, 0.4, 0.5, 0.5};
  const auto cfg = s.from_unit(u);
  CHECK(s.contains(cfg));
  // log-scale midpoint of [2, 1000] is the geometric mean
  CHECK(cfg[abr_param::kMaxBandwidth] == doctest::Approx(std::sqrt(2.0 * 1000.0)));
  const auto back = s.to_unit(cfg);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(back[i] == doctest::Approx(u[i]));
  const auto rl1 = preset_space(UseCase::kAbr, Preset::kRL1);
  CHECK(rl1.to_unit(rl1.from_unit(u))[abr_param::kBwChangeInterval] == 0.5);
}

TEST_CASE("config checks name the offending dimension") {
  const auto s = preset_space(UseCase::kCc, Preset::kRL1);
  auto cfg = s.from_unit(std::vector<double>(6, 0.5));
  cfg.values[cc_param::kQueue] = 1000;
  try {
    s.check(cfg);
    FAIL("expected throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("queue") != std::string::npos);
  }
}

TEST_CASE("space and config JSON round trip") {
  const auto s = preset_space(UseCase::kLb, Preset::kRL2);
  CHECK(space_from_json(to_json(s)) == s);
  const auto cfg = s.from_unit(std::vector<double>(5, 0.25));
  CHECK(config_from_json(to_json(cfg, s), s) == cfg);
  auto j = to_json(cfg, s);
  j["values"].erase("job_size");
  CHECK_THROWS_WITH_AS(config_from_json(j, s), doctest::Contains("job_size"), std::invalid_argument);
  auto bad = to_json(s);
  bad["schema_version"] = 99;
  CHECK_THROWS_AS(space_from_json(bad), std::invalid_argument);
}

TEST_CASE("sampling a degenerate box returns its unique point") {
  const auto s = point_space(preset_space(UseCase::kAbr, Preset::kRL3));
  ConfigDistribution d(s);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) CHECK(d.sample(rng) == s.defaults());
}

TEST_CASE("a distribution whose whole mass is promoted returns that point") {
  const auto s = preset_space(UseCase::kAbr, Preset::kRL1);
  auto p = s.from_unit(std::vector<double>(6, 0.9));
  auto j = ConfigDistribution(s).to_json();
  j["base_weight"] = 0.0;
  j["promoted"] = nlohmann::json::array({{{"weight", 1.0}, {"values", p.values}}});
  const auto d = ConfigDistribution::from_json(j);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) CHECK(d.sample(rng) == p);
}

TEST_CASE("promotion arithmetic") {
  const auto s = preset_space(UseCase::kAbr, Preset::kRL3);
  const auto p1 = s.from_unit(std::vector<double>(6, 0.1));
  const auto p2 = s.from_unit(std::vector<double>(6, 0.2));
  ConfigDistribution d(s);
  auto d1 = promote(d, p1, 0.3);
  CHECK(d1.base_weight() == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(d1.promoted().at(0).weight == doctest::Approx(0.3).epsilon(1e-12));
  auto d2 = promote(d1, p2, 0.3);
  CHECK(d2.base_weight() == doctest::Approx(0.49).epsilon(1e-12));
  CHECK(d2.promoted().at(0).weight == doctest::Approx(0.21).epsilon(1e-12));
  CHECK(d2.promoted().at(1).weight == doctest::Approx(0.30).epsilon(1e-12));
  auto d9 = d;
  for (int r = 0; r < 9; ++r) d9 = promote(d9, p1, 0.3);
  CHECK(std::abs(d9.base_weight() - std::pow(0.7, 9)) < 1e-9);
  CHECK(d9.base_weight() == doctest::Approx(0.040).epsilon(0.01));
  CHECK_THROWS_AS(promote(d, p1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(promote(d, p1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(promote(d, p1, -0.2), std::invalid_argument);
}

TEST_CASE("weights stay normalized under arbitrary promotion sequences") {
  const auto s = preset_space(UseCase::kCc, Preset::kRL3);
  ConfigDistribution d(s);
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    d = promote(d, d.sample_base(rng), uniform(rng, 0.001, 0.999));
    REQUIRE(std::abs(d.total_weight() - 1.0) < 1e-9);
  }
  const auto back = ConfigDistribution::from_json(d.to_json());
  CHECK(back.promoted().size() == d.promoted().size());
  CHECK(back.base_weight() == d.base_weight());
}

TEST_CASE("promoted configs are drawn at their weight") {
  const auto s = preset_space(UseCase::kAbr, Preset::kRL3);
  const auto p = s.from_unit(std::vector<double>(6, 0.123));
  const auto d = promote(ConfigDistribution(s), p, 0.3);
  Rng rng(17);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += d.sample(rng) == p;
  CHECK(std::abs(hits / double(n) - 0.3) < 0.01);
}

TEST_CASE("sampling is reproducible bit for bit") {
  const auto d = promote(ConfigDistribution(preset_space(UseCase::kLb, Preset::kRL3)),
                         preset_space(UseCase::kLb, Preset::kRL3).from_unit(std::vector<double>(5, 0.5)), 0.4);
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(d.sample(a).values == d.sample(b).values);
}

TEST_CASE("log dimensions are uniform in log space") {
  const auto s = preset_space(UseCase::kAbr, Preset::kRL3);
  ConfigDistribution d(s);
  Rng rng(23);
  const auto& p = s.param(abr_param::kMaxBandwidth);
  std::vector<double> logu, linu;
  for (int i = 0; i < 10000; ++i) {
    const double v = d.sample_base(rng)[abr_param::kMaxBandwidth];
    logu.push_back((std::log(v) - std::log(p.lo)) / (std::log(p.hi) - std::log(p.lo)));
    linu.push_back((v - p.lo) / (p.hi - p.lo));
  }
  CHECK(ks_pvalue(logu) > 0.01);
  CHECK(ks_pvalue(linu) < 0.01);
}

TEST_CASE("abr generator") {
  Rng rng(1);
  AbrTraceParams p;
  p.min_mbps = p.max_mbps = 5.0;
  const auto flat = generate_abr_bandwidth(p, rng);
  for (const auto& pt : flat.points) CHECK(pt.mbps == 5.0);
  CHECK(flat.duration_s == p.duration_s);
  for (std::size_t i = 1; i < flat.points.size(); ++i) {
    const double gap = flat.points[i].time_s - flat.points[i - 1].time_s;
    CHECK(gap >= 0.5);
    CHECK(gap <= 1.5);
  }

  p.min_mbps = 0.2;
  p.change_interval_s = 500.0;
  const auto single = generate_abr_bandwidth(p, rng);
  std::vector<double> levels;
  for (const auto& pt : single.points)
    if (levels.empty() || levels.back() != pt.mbps) levels.push_back(pt.mbps);
  CHECK(levels.size() <= 2);

  const auto cfg = preset_space(UseCase::kAbr, Preset::kRL3).defaults();
  Rng a(7), b(7);
  CHECK(dump(gen_abr_trace(cfg, a)) == dump(gen_abr_trace(cfg, b)));
  Rng c(7);
  const auto t = gen_abr_trace(cfg, c);
  CHECK(t.max_mbps() <= 5.0);
  CHECK(t.duration_s == cfg[abr_param::kVideoLength]);
}

TEST_CASE("cc generator") {
  Rng rng(2);
  CcTraceParams p;
  p.max_mbps = 1.0;
  const auto flat = generate_cc_bandwidth(p, rng);
  for (const auto& pt : flat.points) CHECK(pt.mbps == 1.0);
  CHECK(flat.points.size() == 100);
  CHECK(flat.points[1].time_s == doctest::Approx(0.1));

  p.max_mbps = 50.0;
  p.change_interval_s = 30.0;
  const auto single = generate_cc_bandwidth(p, rng);
  for (const auto& pt : single.points) CHECK(pt.mbps == single.points[0].mbps);

  p.change_interval_s = 1.0;
  const auto moving = generate_cc_bandwidth(p, rng);
  for (const auto& pt : moving.points) {
    CHECK(pt.mbps >= 1.0);
    CHECK(pt.mbps <= 50.0);
  }

  auto cfg = preset_space(UseCase::kCc, Preset::kRL3).defaults();
  cfg.values[cc_param::kQueue] = 37.4;
  cfg.values[cc_param::kLossRate] = 0.02;
  Rng a(9), b(9);
  const auto ta = gen_cc_trace(cfg, a), tb = gen_cc_trace(cfg, b);
  CHECK(dump(ta.bandwidth) == dump(tb.bandwidth));
  CHECK(ta.link.queue_packets == 37);
  CHECK(ta.link.loss_rate == 0.02);
  CHECK(ta.link.one_way_ms == doctest::Approx(cfg[cc_param::kMinRtt] / 2));
}

TEST_CASE("lb generator") {
  auto s = preset_space(UseCase::kLb, Preset::kRL3);
  auto cfg = s.defaults();
  cfg.values[lb_param::kNumJobs] = 1;
  Rng rng(4);
  CHECK(gen_lb_trace(cfg, rng).jobs.size() == 1);

  cfg.values[lb_param::kNumJobs] = 100000;
  cfg.values[lb_param::kJobInterval] = 0.5;
  const auto jt = gen_lb_trace(cfg, rng);
  REQUIRE(jt.jobs.size() == 100000);
  CHECK(jt.jobs.back().arrival_ms / 100000 == doctest::Approx(0.5).epsilon(0.02));
  double size_sum = 0.0;
  for (const auto& j : jt.jobs) size_sum += j.size_bytes;
  // Heavy tail: only a loose check of the matched mean.
  CHECK(size_sum / 100000 == doctest::Approx(cfg[lb_param::kJobSize]).epsilon(0.15));
  CHECK_NOTHROW(jt.validate());

  Rng a(8), b(8);
  cfg.values[lb_param::kNumJobs] = 50;
  std::ostringstream oa, ob;
  write_job_trace(oa, gen_lb_trace(cfg, a));
  write_job_trace(ob, gen_lb_trace(cfg, b));
  CHECK(oa.str() == ob.str());
}

TEST_CASE("generated traces satisfy their invariants across random configs") {
  Rng rng(31);
  for (auto u : {UseCase::kAbr, UseCase::kCc, UseCase::kLb}) {
    ConfigDistribution d(preset_space(u, Preset::kRL3));
    const int n = u == UseCase::kLb ? 300 : 3000;
    for (int i = 0; i < n; ++i) {
      auto cfg = d.sample_base(rng);
      if (u == UseCase::kAbr) {
        REQUIRE_NOTHROW(gen_abr_trace(cfg, rng).validate());
      } else if (u == UseCase::kCc) {
        REQUIRE_NOTHROW(gen_cc_trace(cfg, rng).bandwidth.validate());
      } else {
        cfg.values[lb_param::kNumJobs] = std::min(cfg[lb_param::kNumJobs], 200.0);
        REQUIRE_NOTHROW(gen_lb_trace(cfg, rng).validate());
      }
    }
  }
}

TEST_CASE("trace text format round trips and rejects bad rows") {
  BandwidthTrace t{{{0.0, 1.5}, {0.7, 0.1 + 0.2}, {2.0, 3.0}}, 3.0};
  std::istringstream in(dump(t));
  const auto back = read_bandwidth_trace(in);
  REQUIRE(back.points.size() == 3);
  CHECK(back.points[1].mbps == t.points[1].mbps);
  std::istringstream header("timestamp_s,bandwidth_mbps\n0,1\n1,2\n");
  CHECK(read_bandwidth_trace(header).points.size() == 2);
  std::istringstream bad("0,1\n0,2\n");
  CHECK_THROWS_AS(read_bandwidth_trace(bad), std::invalid_argument);
  std::istringstream neg("0,1\n1,-2\n");
  CHECK_THROWS_AS(read_bandwidth_trace(neg), std::invalid_argument);
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("recorded trace mixing") {
  const auto s = preset_space(UseCase::kAbr, Preset::kRL3);
  auto cfg = s.defaults();  // max bandwidth 5
  TraceCorpus empty;
  TraceCorpus corpus;
  corpus.add({{{0.0, 2.0}, {1.0, 5.2}}, 100.0}, "match");
  corpus.add({{{0.0, 40.0}}, 100.0}, "far");

  Rng a(1), b(1);
  std::optional<std::size_t> chosen;
  const auto synth = mix_recorded_trace(cfg, empty, 1.0, a, &chosen);
  CHECK_FALSE(chosen.has_value());
  CHECK(synth.max_mbps() <= 5.0);
  mix_recorded_trace(cfg, corpus, 0.0, b, &chosen);
  CHECK_FALSE(chosen.has_value());

  Rng c(2);
  for (int i = 0; i < 10; ++i) {
    const auto t = mix_recorded_trace(cfg, corpus, 1.0, c, &chosen);
    REQUIRE(chosen.has_value());
    CHECK(*chosen == 0);
    CHECK(t.points.size() == 2);
  }
  cfg.values[abr_param::kMaxBandwidth] = 500;
  mix_recorded_trace(cfg, corpus, 1.0, c, &chosen);
  CHECK_FALSE(chosen.has_value());
  // The coin is drawn first whether or not a corpus is present.
  Rng d1(5), d2(5);
  CHECK(dump(mix_recorded_trace(cfg, empty, 0.5, d1)) == dump(mix_recorded_trace(cfg, corpus, 0.0, d2)));
}

TEST_CASE("corpus loads a directory in filename order") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "genet_corpus_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  save_bandwidth_trace((dir / "b.txt").string(), {{{0.0, 2.0}}, 5.0});
  save_bandwidth_trace((dir / "a.txt").string(), {{{0.0, 1.0}}, 5.0});
  const auto c = TraceCorpus::load_directory(dir.string());
  REQUIRE(c.size() == 2);
  CHECK(c.name(0) == "a.txt");
  CHECK(c.trace(1).max_mbps() == 2.0);
  fs::remove_all(dir);
}

TEST_CASE("trace clock integrates piecewise bandwidth and loops") {
  BandwidthTrace t{{{0.0, 1.0}, {2.0, 4.0}}, 4.0};
  TraceClock clk(t, true);
  CHECK(*clk.transfer(2.0) == doctest::Approx(2.0));
  CHECK(*clk.transfer(4.0) == doctest::Approx(1.0));
  // 1 s left at 4 Mbps, then the loop restarts at 1 Mbps
  CHECK(*clk.transfer(5.0) == doctest::Approx(2.0));
  CHECK(clk.elapsed() == doctest::Approx(5.0));

  TraceClock once(t, false);
  CHECK_FALSE(once.transfer(100.0).has_value());
  CHECK(once.exhausted());

  TraceClock late(t, true, 6.5);
  CHECK(late.bandwidth_mbps() == 4.0);
}

}  // TEST_SUITE
