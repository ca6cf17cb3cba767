#include "genet/curriculum/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "genet/common/stats.hpp"
#include "genet/envspace/trace.hpp"

namespace genet::curriculum {

namespace {

nlohmann::json curve_json(const std::vector<policy::CurveRow>& curve) {
  auto a = nlohmann::json::array();
  for (const auto& r : curve) a.push_back({{"iteration", r.iteration}, {"mean_reward", r.mean_reward}, {"std_reward", r.std_reward}});
  return a;
}

std::string rule_of(const CurriculumSpec& spec, const policy::Task& task) {
  return spec.rule.empty() ? task.default_rule : spec.rule;
}

std::uint64_t search_seed(const CurriculumSpec& spec, std::size_t round) {
  return derive_seed(spec.train.seed, {0xb0, round});
}
std::uint64_t gap_seed(const CurriculumSpec& spec, std::size_t round) {
  return derive_seed(spec.train.seed, {0x6a, round});
}

/// Builds a selector that searches for the config maximizing `objective`.
Selector search_selector(const EnvSpace& space, const CurriculumSpec& spec,
                         std::function<GapOracle(std::size_t round, const policy::PolicySnapshot&)> objective) {
  return [&space, &spec, objective](std::size_t round, const policy::PolicySnapshot& snap) {
    const GapOracle oracle = objective(round, snap);
    SearchResult res = run_search(spec.search, space, oracle, spec.search_trials, search_seed(spec, round));
    RoundLog log;
    log.round = round;
    log.selected = res.best;
    log.score = res.best_gap;
    for (const auto& t : res.trials)
      if (t.config == res.best) log.score_std = t.std;
    log.trials = std::move(res.trials);
    return log;
  };
}

EnvSpace point_space(const EnvSpace& space, const EnvConfig& p) {
  std::vector<ParamSpec> params = space.params();
  for (std::size_t i = 0; i < params.size(); ++i) params[i].lo = params[i].hi = p[i];
  return EnvSpace(space.use_case(), std::move(params));
}

}  // namespace

Mode parse_mode(std::string_view s) {
  if (s == "uniform") return Mode::kUniform;
  if (s == "genet") return Mode::kGenet;
  if (s == "cl1") return Mode::kCl1;
  if (s == "cl2") return Mode::kCl2;
  if (s == "cl3") return Mode::kCl3;
  throw std::invalid_argument("unknown curriculum mode '" + std::string(s) + "' (expected uniform, genet, cl1, cl2 or cl3)");
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::kUniform: return "uniform";
    case Mode::kGenet: return "genet";
    case Mode::kCl1: return "cl1";
    case Mode::kCl2: return "cl2";
    case Mode::kCl3: return "cl3";
  }
  return "?";
}

void CurriculumSpec::validate() const {
  if (!(weight >= 0.0 && weight < 1.0)) throw std::invalid_argument("curriculum: weight must lie in [0, 1)");
  if (gap_episodes == 0) throw std::invalid_argument("curriculum: gap_episodes must be at least 1");
  if (search == SearchMethod::kBo && search_trials < kBoInitialPoints)
    throw std::invalid_argument("curriculum: bo needs at least 3 search trials");
  if (search_trials == 0) throw std::invalid_argument("curriculum: search_trials must be at least 1");
  train.validate();
}

CurriculumResult run_curriculum(const EnvSpace& space, const policy::Task& task, policy::PolicySnapshot theta0,
                                const CurriculumSpec& spec, const Selector& select) {
  spec.validate();
  if (space.use_case() != task.use_case) throw std::invalid_argument("curriculum: space and task use cases differ");
  CurriculumResult out = spec.resume ? *spec.resume : CurriculumResult{std::move(theta0), ConfigDistribution(space), {}, {}};
  policy::TrainSpec ts = spec.train;
  ts.iterations = spec.iters_per_round;
  for (std::size_t r = out.rounds.size(); r < spec.rounds; ++r) {
    RoundLog log;
    try {
      log = select(r, out.snapshot);
      if (spec.weight > 0.0) out.distribution = out.distribution.promote(log.selected, spec.weight);
      auto trained = policy::train_uniform(out.distribution, std::move(out.snapshot), ts, task);
      out.snapshot = std::move(trained.snapshot);
      log.curve = std::move(trained.curve);
    } catch (const std::exception& e) {
      throw std::runtime_error("curriculum round " + std::to_string(r) + ": " + e.what());
    }
    log.round = r;
    log.base_weight_after = out.distribution.base_weight();
    out.curve.insert(out.curve.end(), log.curve.begin(), log.curve.end());
    out.rounds.push_back(std::move(log));
    if (spec.on_round) spec.on_round(out);
  }
  return out;
}

CurriculumResult genet_train(const EnvSpace& space, const policy::Task& task, policy::PolicySnapshot theta0,
                             const CurriculumSpec& spec) {
  const auto rule = task.rule(rule_of(spec, task));
  return run_curriculum(space, task, std::move(theta0), spec,
                        search_selector(space, spec, [&](std::size_t round, const policy::PolicySnapshot& snap) {
                          auto rl = policy::rl_reward_fn(task, snap);
                          const auto seed = gap_seed(spec, round);
                          const auto k = spec.gap_episodes;
                          return GapOracle([rl, rule, seed, k](const EnvConfig& p) {
                            return calc_baseline_gap(p, rl, rule, k, seed);
                          });
                        }));
}

std::size_t interval_dim(const EnvSpace& space) {
  switch (space.use_case()) {
    case UseCase::kAbr: return abr_param::kBwChangeInterval;
    case UseCase::kCc: return cc_param::kBwChangeInterval;
    case UseCase::kLb: break;
  }
  throw std::invalid_argument("cl1: the load-balancing space has no bandwidth-change interval");
}

double cl1_interval(const EnvSpace& space, std::size_t round, std::size_t rounds) {
  const double frac = rounds <= 1 ? 0.0 : static_cast<double>(round) / static_cast<double>(rounds - 1);
  std::vector<double> u(space.dims(), 0.5);
  u[interval_dim(space)] = 1.0 - frac;
  return space.from_unit(u)[interval_dim(space)];
}

CurriculumResult cl1_train(const EnvSpace& space, const policy::Task& task, policy::PolicySnapshot theta0,
                           const CurriculumSpec& spec) {
  const std::size_t dim = interval_dim(space);
  const EnvConfig base = space.clamp(space.defaults());
  return run_curriculum(space, task, std::move(theta0), spec, [&](std::size_t round, const policy::PolicySnapshot&) {
    RoundLog log;
    log.selected = base;
    log.selected.values[dim] = cl1_interval(space, round, spec.rounds);
    log.score = log.selected.values[dim];
    return log;
  });
}

CurriculumResult cl2_train(const EnvSpace& space, const policy::Task& task, policy::PolicySnapshot theta0,
                           const CurriculumSpec& spec) {
  const auto rule = task.rule(rule_of(spec, task));
  return run_curriculum(space, task, std::move(theta0), spec,
                        search_selector(space, spec, [&](std::size_t round, const policy::PolicySnapshot&) {
                          const auto seed = gap_seed(spec, round);
                          const auto k = spec.gap_episodes;
                          policy::RewardFn zero = [](const EnvConfig&, std::uint64_t) { return 0.0; };
                          // -R(rule) = 0 - R(rule): a gap against a zero-reward reference.
                          return GapOracle([rule, zero, seed, k](const EnvConfig& p) {
                            return calc_baseline_gap(p, rule, zero, k, seed);
                          });
                        }));
}

CurriculumResult cl3_train(const EnvSpace& space, const policy::Task& task, policy::PolicySnapshot theta0,
                           const CurriculumSpec& spec) {
  if (!task.optimal) throw std::invalid_argument("cl3: task '" + task.name + "' has no optimum oracle (ABR only)");
  const auto opt = task.optimal;
  return run_curriculum(space, task, std::move(theta0), spec,
                        search_selector(space, spec, [&](std::size_t round, const policy::PolicySnapshot& snap) {
                          auto rl = policy::rl_reward_fn(task, snap);
                          const auto seed = gap_seed(spec, round);
                          const auto k = spec.gap_episodes;
                          return GapOracle([rl, opt, seed, k](const EnvConfig& p) {
                            return calc_baseline_gap(p, rl, opt, k, seed);
                          });
                        }));
}

CurriculumResult train_with_mode(Mode mode, const EnvSpace& space, const policy::Task& task,
                                 policy::PolicySnapshot theta0, const CurriculumSpec& spec) {
  switch (mode) {
    case Mode::kUniform: {
      spec.validate();
      // Seeds follow the snapshot's iteration counter, so chunking does not change the result.
      CurriculumResult out = spec.resume ? *spec.resume : CurriculumResult{std::move(theta0), ConfigDistribution(space), {}, {}};
      policy::TrainSpec ts = spec.train;
      const std::size_t total = spec.uniform_iterations ? spec.uniform_iterations : spec.rounds * spec.iters_per_round;
      if (total > 0 && spec.iters_per_round == 0) throw std::invalid_argument("curriculum: iters_per_round must be at least 1");
      for (std::size_t done = out.curve.size(); done < total;) {
        ts.iterations = std::min(spec.iters_per_round, total - done);
        auto res = policy::train_uniform(out.distribution, std::move(out.snapshot), ts, task);
        out.snapshot = std::move(res.snapshot);
        out.curve.insert(out.curve.end(), res.curve.begin(), res.curve.end());
        done = out.curve.size();
        if (spec.on_round) spec.on_round(out);
      }
      return out;
    }
    case Mode::kGenet: return genet_train(space, task, std::move(theta0), spec);
    case Mode::kCl1: return cl1_train(space, task, std::move(theta0), spec);
    case Mode::kCl2: return cl2_train(space, task, std::move(theta0), spec);
    case Mode::kCl3: return cl3_train(space, task, std::move(theta0), spec);
  }
  throw std::invalid_argument("train_with_mode: unknown mode");
}

ScanResult gap_improvement_scan(const EnvSpace& space, const policy::Task& task, const policy::PolicySnapshot& theta,
                                const ScanSpec& spec, std::uint64_t seed) {
  const auto rule = task.rule(spec.rule.empty() ? task.default_rule : spec.rule);
  ConfigDistribution dist(space);
  Rng rng(derive_seed(seed, {0x5c}));
  std::vector<EnvConfig> configs;
  for (std::size_t i = 0; i < spec.configs; ++i) configs.push_back(dist.sample_base(rng));
  const auto rl0 = policy::rl_reward_fn(task, theta);

  ScanResult out;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const EnvConfig& p = configs[i];
    ScanRow row;
    row.config = p;
    row.gap = calc_baseline_gap(p, rl0, rule, spec.gap_episodes, derive_seed(seed, {0x6a, i})).mean;
    const std::uint64_t eval_seed = derive_seed(seed, {0xe5, i});
    const std::vector<EnvConfig> one{p};
    row.before = policy::evaluate(rl0, one, spec.eval_episodes, eval_seed)[0];
    policy::TrainSpec ts = spec.train;
    ts.iterations = spec.finetune_iters;
    ts.seed = derive_seed(seed, {0xf7, i});
    const auto tuned = policy::train_uniform(ConfigDistribution(point_space(space, p)), theta, ts, task);
    row.after = policy::evaluate(policy::rl_reward_fn(task, tuned.snapshot), one, spec.eval_episodes, eval_seed)[0];
    row.improvement = row.after - row.before;
    out.rows.push_back(std::move(row));
  }
  if (out.rows.size() >= 2) {
    std::vector<double> g, d;
    for (const auto& r : out.rows) {
      g.push_back(r.gap);
      d.push_back(r.improvement);
    }
    out.spearman = stats::spearman(g, d);
  }
  return out;
}

nlohmann::json to_json(const CurriculumResult& r, const EnvSpace& space) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "curriculum_log";
  j["iterations"] = r.snapshot.iteration;
  auto rounds = nlohmann::json::array();
  for (const auto& log : r.rounds) {
    nlohmann::json jr;
    jr["round"] = log.round;
    jr["selected"] = to_json(log.selected, space);
    jr["score"] = log.score;
    jr["score_std"] = log.score_std;
    jr["base_weight_after"] = log.base_weight_after;
    auto trials = nlohmann::json::array();
    for (const auto& t : log.trials)
      trials.push_back({{"config", t.config.values}, {"gap", t.gap}, {"std", t.std}, {"k", t.k}});
    jr["trials"] = std::move(trials);
    jr["curve"] = curve_json(log.curve);
    rounds.push_back(std::move(jr));
  }
  j["rounds"] = std::move(rounds);
  if (r.rounds.empty()) j["curve"] = curve_json(r.curve);
  j["distribution"] = r.distribution.to_json();
  return j;
}

CurriculumResult curriculum_from_json(const nlohmann::json& j, const EnvSpace& space, policy::PolicySnapshot snapshot) {
  if (j.value("kind", "") != "curriculum_log") throw std::invalid_argument("curriculum log: wrong document kind");
  CurriculumResult r{std::move(snapshot), ConfigDistribution::from_json(j.at("distribution")), {}, {}};
  auto read_curve = [](const nlohmann::json& a) {
    std::vector<policy::CurveRow> c;
    for (const auto& row : a) c.push_back({row.at("iteration"), row.at("mean_reward"), row.at("std_reward")});
    return c;
  };
  for (const auto& jr : j.at("rounds")) {
    RoundLog log;
    log.round = jr.at("round");
    log.selected = config_from_json(jr.at("selected"), space);
    log.score = jr.at("score");
    log.score_std = jr.at("score_std");
    log.base_weight_after = jr.at("base_weight_after");
    for (const auto& t : jr.at("trials"))
      log.trials.push_back({EnvConfig{space.use_case(), t.at("config").get<std::vector<double>>()}, t.at("gap"), t.at("std"),
                            t.value("k", std::size_t{0})});
    log.curve = read_curve(jr.at("curve"));
    r.rounds.push_back(std::move(log));
  }
  if (j.contains("curve")) r.curve = read_curve(j.at("curve"));
  else
    for (const auto& log : r.rounds) r.curve.insert(r.curve.end(), log.curve.begin(), log.curve.end());
  return r;
}

void write_scan(std::ostream& out, const ScanResult& r, const EnvSpace& space) {
  for (const auto& p : space.params()) out << p.name << ',';
  out << "gap,before,after,improvement\n";
  for (const auto& row : r.rows) {
    for (double v : row.config.values) out << format_double(v) << ',';
    out << format_double(row.gap) << ',' << format_double(row.before) << ',' << format_double(row.after) << ','
        << format_double(row.improvement) << '\n';
  }
}

}  // namespace genet::curriculum
