#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "genet/common/stats.hpp"
#include "genet/curriculum/search.hpp"
#include "genet/envspace/distribution.hpp"
#include "genet/policy/task.hpp"

namespace genet::eval {

inline constexpr std::size_t kDefaultTestEnvs = 200;
inline constexpr std::size_t kBootstrapResamples = 1000;
inline constexpr double kConfidence = 0.9;

struct NamedPolicy {
  std::string name;
  policy::RewardFn reward;
};

struct PolicySummary {
  std::string name;
  double mean = 0.0;
  stats::Interval ci;
};

struct PairwiseStat {
  std::size_t a = 0;
  std::size_t b = 0;
  double fraction_better = 0.0;        // share of environments with reward(a) > reward(b)
  double fraction_better_split = 0.0;  // as above, ties counted as half a win
  double mean_diff = 0.0;              // mean of reward(a) - reward(b)
  stats::Interval diff_ci;
};

struct ComparisonReport {
  std::vector<std::string> names;
  std::vector<std::string> env_labels;          // one per paired environment
  std::vector<std::vector<double>> rewards;     // [policy][environment]
  std::vector<PolicySummary> summaries;
  std::vector<PairwiseStat> pairwise;           // every ordered pair a != b

  const PairwiseStat& pair(std::size_t a, std::size_t b) const;
};

double fraction_better(std::span<const double> a, std::span<const double> b);
double fraction_better_split(std::span<const double> a, std::span<const double> b);

/// Builds summaries and pairwise statistics from an aligned reward matrix.
ComparisonReport summarize(std::vector<std::string> names, std::vector<std::string> env_labels,
                           std::vector<std::vector<double>> rewards, std::uint64_t seed);

/// Every policy on the same environments: configuration i is paired with
/// environment seed i for all policies.
ComparisonReport compare(const std::vector<NamedPolicy>& policies, const std::vector<EnvConfig>& configs,
                         std::uint64_t seed);

/// Draws n_envs configurations from `dist` once and compares on them.
ComparisonReport asymptotic_eval(const std::vector<NamedPolicy>& policies, const ConfigDistribution& dist,
                                 std::size_t n_envs, std::uint64_t seed);

struct SweepRow {
  double value = 0.0;
  ComparisonReport report;
};

/// All other dimensions at the space defaults; `dim` takes each value.
std::vector<SweepRow> sweep_eval(const std::vector<NamedPolicy>& policies, const EnvSpace& space,
                                 std::size_t dim, const std::vector<double>& values, std::size_t n_envs,
                                 std::uint64_t seed);

struct EfficiencyCurves {
  std::vector<curriculum::SearchMethod> methods;
  std::vector<std::vector<double>> mean_best;               // [method][trial]
  std::vector<std::vector<std::vector<double>>> per_seed;   // [method][seed][trial]
};

/// Best-so-far objective per trial for each method, averaged over seeds.
EfficiencyCurves search_efficiency_eval(const EnvSpace& space, const curriculum::GapOracle& oracle,
                                        const std::vector<curriculum::SearchMethod>& methods, std::size_t budget,
                                        std::size_t seeds, std::uint64_t seed);

nlohmann::json to_json(const ComparisonReport& r);
/// One row per environment: label followed by each policy's reward.
void write_rewards_table(std::ostream& out, const ComparisonReport& r);
void write_summary_table(std::ostream& out, const ComparisonReport& r);
void write_efficiency_table(std::ostream& out, const EfficiencyCurves& c);

}  // namespace genet::eval
