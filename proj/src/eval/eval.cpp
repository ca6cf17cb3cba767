#include "genet/eval/eval.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "genet/common/parallel.hpp"
#include "genet/envspace/trace.hpp"

namespace genet::eval {

const PairwiseStat& ComparisonReport::pair(std::size_t a, std::size_t b) const {
  for (const auto& p : pairwise)
    if (p.a == a && p.b == b) return p;
  throw std::out_of_range("comparison report: no such policy pair");
}

double fraction_better(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("fraction_better: mismatched or empty inputs");
  std::size_t wins = 0;
  for (std::size_t i = 0; i < a.size(); ++i) wins += a[i] > b[i];
  return static_cast<double>(wins) / static_cast<double>(a.size());
}

double fraction_better_split(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("fraction_better: mismatched or empty inputs");
  double wins = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) wins += a[i] > b[i] ? 1.0 : (a[i] == b[i] ? 0.5 : 0.0);
  return wins / static_cast<double>(a.size());
}

ComparisonReport summarize(std::vector<std::string> names, std::vector<std::string> env_labels,
                           std::vector<std::vector<double>> rewards, std::uint64_t seed) {
  if (names.size() != rewards.size()) throw std::invalid_argument("summarize: one reward row per policy required");
  for (const auto& row : rewards)
    if (row.size() != env_labels.size()) throw std::invalid_argument("summarize: rows must align with environments");
  ComparisonReport r{std::move(names), std::move(env_labels), std::move(rewards), {}, {}};
  if (r.env_labels.empty()) return r;
  for (std::size_t p = 0; p < r.names.size(); ++p)
    r.summaries.push_back({r.names[p], stats::mean(r.rewards[p]),
                           stats::bootstrap_mean_ci(r.rewards[p], kConfidence, kBootstrapResamples, derive_seed(seed, {p}))});
  for (std::size_t a = 0; a < r.names.size(); ++a)
    for (std::size_t b = 0; b < r.names.size(); ++b) {
      if (a == b) continue;
      std::vector<double> d(r.env_labels.size());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = r.rewards[a][i] - r.rewards[b][i];
      r.pairwise.push_back({a, b, fraction_better(r.rewards[a], r.rewards[b]),
                            fraction_better_split(r.rewards[a], r.rewards[b]), stats::mean(d),
                            stats::bootstrap_mean_ci(d, kConfidence, kBootstrapResamples, derive_seed(seed, {a, b, 7}))});
    }
  return r;
}

ComparisonReport compare(const std::vector<NamedPolicy>& policies, const std::vector<EnvConfig>& configs,
                         std::uint64_t seed) {
  std::vector<std::string> names, labels;
  for (const auto& p : policies) names.push_back(p.name);
  for (std::size_t i = 0; i < configs.size(); ++i) labels.push_back("env" + std::to_string(i));
  std::vector<std::vector<double>> rewards(policies.size(), std::vector<double>(configs.size()));
  const std::size_t n = configs.size();
  parallel_for(policies.size() * n, global_jobs(), [&](std::size_t idx) {
    const std::size_t p = idx / n, e = idx % n;
    rewards[p][e] = policies[p].reward(configs[e], derive_seed(seed, {0xe7, e}));
  });
  return summarize(std::move(names), std::move(labels), std::move(rewards), derive_seed(seed, {0xb5}));
}

ComparisonReport asymptotic_eval(const std::vector<NamedPolicy>& policies, const ConfigDistribution& dist,
                                 std::size_t n_envs, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0xc0}));
  std::vector<EnvConfig> configs;
  for (std::size_t i = 0; i < n_envs; ++i) configs.push_back(dist.sample(rng));
  return compare(policies, configs, seed);
}

std::vector<SweepRow> sweep_eval(const std::vector<NamedPolicy>& policies, const EnvSpace& space,
                                 std::size_t dim, const std::vector<double>& values, std::size_t n_envs,
                                 std::uint64_t seed) {
  if (dim >= space.dims()) throw std::out_of_range("sweep_eval: dimension index out of range");
  std::vector<SweepRow> rows;
  for (double v : values) {
    EnvConfig cfg = space.defaults();
    cfg.values[dim] = v;
    std::vector<ParamSpec> params = space.params();
    for (std::size_t i = 0; i < params.size(); ++i) params[i].lo = params[i].hi = cfg[i];
    params[dim].scale = Scale::kLinear;
    ConfigDistribution point(EnvSpace(space.use_case(), std::move(params)));
    rows.push_back({v, asymptotic_eval(policies, point, n_envs, seed)});
  }
  return rows;
}

EfficiencyCurves search_efficiency_eval(const EnvSpace& space, const curriculum::GapOracle& oracle,
                                        const std::vector<curriculum::SearchMethod>& methods, std::size_t budget,
                                        std::size_t seeds, std::uint64_t seed) {
  if (budget == 0 || seeds == 0) throw std::invalid_argument("search_efficiency_eval: budget and seeds must be positive");
  EfficiencyCurves c;
  c.methods = methods;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    std::vector<std::vector<double>> runs;
    std::vector<double> mean(budget, 0.0);
    for (std::size_t s = 0; s < seeds; ++s) {
      // BO needs its initial design; shorter budgets keep the leading trials.
      const std::size_t run_budget =
          methods[m] == curriculum::SearchMethod::kBo ? std::max(budget, curriculum::kBoInitialPoints) : budget;
      auto res = curriculum::run_search(methods[m], space, oracle, run_budget, derive_seed(seed, {s}));
      auto best = res.best_so_far();
      best.resize(std::min(best.size(), budget));
      // Grid search may finish early; hold its final best.
      while (best.size() < budget) best.push_back(best.back());
      for (std::size_t t = 0; t < budget; ++t) mean[t] += best[t] / static_cast<double>(seeds);
      runs.push_back(std::move(best));
    }
    c.mean_best.push_back(std::move(mean));
    c.per_seed.push_back(std::move(runs));
  }
  return c;
}

nlohmann::json to_json(const ComparisonReport& r) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "comparison_report";
  j["environments"] = r.env_labels.size();
  auto pol = nlohmann::json::array();
  for (const auto& s : r.summaries) pol.push_back({{"name", s.name}, {"mean", s.mean}, {"ci_lo", s.ci.lo}, {"ci_hi", s.ci.hi}});
  j["policies"] = std::move(pol);
  if (!r.pairwise.empty()) {
    auto pw = nlohmann::json::array();
    for (const auto& p : r.pairwise)
      pw.push_back({{"a", r.names[p.a]},
                    {"b", r.names[p.b]},
                    {"fraction_better", p.fraction_better},
                    {"fraction_better_ties_split", p.fraction_better_split},
                    {"mean_diff", p.mean_diff},
                    {"diff_ci_lo", p.diff_ci.lo},
                    {"diff_ci_hi", p.diff_ci.hi}});
    j["pairwise"] = std::move(pw);
  }
  return j;
}

void write_rewards_table(std::ostream& out, const ComparisonReport& r) {
  out << "env";
  for (const auto& n : r.names) out << ',' << n;
  out << '\n';
  for (std::size_t e = 0; e < r.env_labels.size(); ++e) {
    out << r.env_labels[e];
    for (const auto& row : r.rewards) out << ',' << format_double(row[e]);
    out << '\n';
  }
}

void write_summary_table(std::ostream& out, const ComparisonReport& r) {
  out << "policy,mean,ci_lo,ci_hi\n";
  for (const auto& s : r.summaries)
    out << s.name << ',' << format_double(s.mean) << ',' << format_double(s.ci.lo) << ',' << format_double(s.ci.hi) << '\n';
}

void write_efficiency_table(std::ostream& out, const EfficiencyCurves& c) {
  out << "trial";
  for (auto m : c.methods) out << ',' << curriculum::to_string(m);
  out << '\n';
  const std::size_t n = c.mean_best.empty() ? 0 : c.mean_best.front().size();
  for (std::size_t t = 0; t < n; ++t) {
    out << t + 1;
    for (const auto& curve : c.mean_best) out << ',' << format_double(curve[t]);
    out << '\n';
  }
}

}  // namespace genet::eval
