#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "genet/envspace/space.hpp"
#include "genet/policy/task.hpp"

namespace genet::curriculum {

struct GapEstimate {
  EnvConfig config;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation of the per-environment differences
  std::size_t k = 0;
  std::vector<double> samples;
};

/// Mean and spread of reward(rule) - reward(rl) over k environments of `p`.
/// Environment i uses the same seed for both policies.
GapEstimate calc_baseline_gap(const EnvConfig& p, const policy::RewardFn& rl, const policy::RewardFn& rule,
                              std::size_t k, std::uint64_t seed);

/// Any scalar objective over configurations (maximized by the searches).
using GapOracle = std::function<GapEstimate(const EnvConfig&)>;

struct SearchTrial {
  EnvConfig config;
  double gap = 0.0;
  double std = 0.0;
  std::size_t k = 0;
};

struct SearchResult {
  EnvConfig best;
  double best_gap = 0.0;
  std::vector<SearchTrial> trials;

  /// Best gap among trials [0, i] for each i.
  std::vector<double> best_so_far() const;
};

inline constexpr std::size_t kBoInitialPoints = 3;
inline constexpr std::size_t kDefaultBoTrials = 15;

/// Bayesian optimization on the unit cube of the space's non-degenerate
/// dimensions: three shifted-Halton initial points, then expected
/// improvement under a GP surrogate whose per-point noise is the squared
/// standard error of each gap estimate. Returns the best observed trial.
/// Oracle exceptions are rethrown as std::runtime_error naming the trial.
SearchResult bo_search(const EnvSpace& space, const GapOracle& oracle, std::size_t n_trials, std::uint64_t seed);

SearchResult random_search(const EnvSpace& space, const GapOracle& oracle, std::size_t n_trials, std::uint64_t seed);

/// Coordinate sweep from the box midpoint: each non-degenerate dimension is
/// tried at `points_per_dim` evenly spaced unit positions with the others at
/// their current best, then fixed at its best value. Stops after `budget`
/// trials when budget > 0.
SearchResult grid_search(const EnvSpace& space, const GapOracle& oracle, std::size_t points_per_dim = 5,
                         std::size_t budget = 0);

enum class SearchMethod { kBo, kRandom, kGrid };
SearchMethod parse_search_method(std::string_view s);
std::string_view to_string(SearchMethod m);
SearchResult run_search(SearchMethod method, const EnvSpace& space, const GapOracle& oracle, std::size_t budget,
                        std::uint64_t seed);

}  // namespace genet::curriculum
