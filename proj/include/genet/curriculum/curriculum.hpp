#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "genet/curriculum/search.hpp"
#include "genet/envspace/distribution.hpp"
#include "genet/policy/trainer.hpp"

namespace genet::curriculum {

enum class Mode { kUniform, kGenet, kCl1, kCl2, kCl3 };
Mode parse_mode(std::string_view s);
std::string_view to_string(Mode m);

struct CurriculumSpec {
  std::size_t rounds = 9;
  std::size_t iters_per_round = 10;
  double weight = 0.3;                 // w: probability mass given to each promoted config
  std::size_t search_trials = kDefaultBoTrials;
  std::size_t gap_episodes = 10;       // k per gap estimate
  SearchMethod search = SearchMethod::kBo;
  std::string rule;                    // empty: the task's default baseline
  policy::TrainSpec train;             // iterations field is ignored
  /// Uniform mode only: total iterations when nonzero, otherwise
  /// rounds * iters_per_round. Training still proceeds in chunks of
  /// iters_per_round.
  std::size_t uniform_iterations = 0;

  /// Called after every completed round with the state so far.
  std::function<void(const struct CurriculumResult&)> on_round;
  /// Completed rounds to continue from: its snapshot, distribution and logs
  /// replace theta0 and the uniform start. Round seeds depend only on the
  /// round index, so a resumed run matches an uninterrupted one.
  std::shared_ptr<const struct CurriculumResult> resume;

  void validate() const;
};

struct RoundLog {
  std::size_t round = 0;
  EnvConfig selected;
  double score = 0.0;      // objective value of the selected config (gap for Genet)
  double score_std = 0.0;
  std::vector<SearchTrial> trials;
  std::vector<policy::CurveRow> curve;
  double base_weight_after = 1.0;
};

struct CurriculumResult {
  policy::PolicySnapshot snapshot;
  ConfigDistribution distribution;
  std::vector<RoundLog> rounds;
  std::vector<policy::CurveRow> curve;  // all training iterations in order
};

/// The selection rule of one curriculum round: produces the config to
/// promote given the current policy.
using Selector = std::function<RoundLog(std::size_t round, const policy::PolicySnapshot& snap)>;

/// Shared loop: per round, select a config, promote it with weight w (a
/// no-op when w == 0), then train for iters_per_round on the mixture.
CurriculumResult run_curriculum(const EnvSpace& space, const policy::Task& task, policy::PolicySnapshot theta0,
                                const CurriculumSpec& spec, const Selector& select);

/// Selection maximizes gap-to-baseline R(rule) - R(rl).
CurriculumResult genet_train(const EnvSpace& space, const policy::Task& task, policy::PolicySnapshot theta0,
                             const CurriculumSpec& spec);
/// Bandwidth-change interval scheduled from the box maximum (easy) to the
/// minimum (hard), linearly in unit coordinates; other dimensions at the
/// box-clamped defaults. ABR and CC only.
CurriculumResult cl1_train(const EnvSpace& space, const policy::Task& task, policy::PolicySnapshot theta0,
                           const CurriculumSpec& spec);
/// Selection maximizes -R(rule): environments where the baseline does badly.
CurriculumResult cl2_train(const EnvSpace& space, const policy::Task& task, policy::PolicySnapshot theta0,
                           const CurriculumSpec& spec);
/// Selection maximizes R(optimal) - R(rl); needs a task with an optimum
/// oracle (ABR).
CurriculumResult cl3_train(const EnvSpace& space, const policy::Task& task, policy::PolicySnapshot theta0,
                           const CurriculumSpec& spec);

/// Interval value CL1 uses in round r of `rounds`.
double cl1_interval(const EnvSpace& space, std::size_t round, std::size_t rounds);
std::size_t interval_dim(const EnvSpace& space);

/// Dispatches on mode; uniform trains rounds * iters_per_round iterations
/// (or uniform_iterations), in chunks of iters_per_round with on_round
/// called between them.
CurriculumResult train_with_mode(Mode mode, const EnvSpace& space, const policy::Task& task,
                                 policy::PolicySnapshot theta0, const CurriculumSpec& spec);

struct ScanRow {
  EnvConfig config;
  double gap = 0.0;
  double before = 0.0;
  double after = 0.0;
  double improvement = 0.0;
};

struct ScanSpec {
  std::size_t configs = 30;
  std::size_t finetune_iters = 20;
  std::size_t gap_episodes = 10;
  std::size_t eval_episodes = 10;
  std::string rule;
  policy::TrainSpec train;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  double spearman = 0.0;
};

/// For random configurations of `space`: gap of `theta` against the rule,
/// then fine-tune a copy on that configuration alone and measure the test
/// reward change on held-out environments of the same configuration.
ScanResult gap_improvement_scan(const EnvSpace& space, const policy::Task& task, const policy::PolicySnapshot& theta,
                                const ScanSpec& spec, std::uint64_t seed);

nlohmann::json to_json(const CurriculumResult& r, const EnvSpace& space);
/// Inverse of to_json; the snapshot is stored separately and passed in.
CurriculumResult curriculum_from_json(const nlohmann::json& j, const EnvSpace& space, policy::PolicySnapshot snapshot);
void write_scan(std::ostream& out, const ScanResult& r, const EnvSpace& space);

}  // namespace genet::curriculum
