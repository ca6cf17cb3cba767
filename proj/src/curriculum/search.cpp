#include "genet/curriculum/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "genet/common/parallel.hpp"
#include "genet/common/stats.hpp"
#include "genet/curriculum/gp.hpp"
#include "genet/envspace/distribution.hpp"

namespace genet::curriculum {

namespace {

constexpr std::size_t kAcqRandomCandidates = 512;
constexpr std::size_t kAcqLocalStarts = 8;
constexpr std::size_t kAcqLocalSteps = 40;

std::vector<std::size_t> active_dims(const EnvSpace& space) {
  std::vector<std::size_t> a;
  for (std::size_t i = 0; i < space.dims(); ++i)
    if (!space.param(i).degenerate()) a.push_back(i);
  return a;
}

EnvConfig to_config(const EnvSpace& space, const std::vector<std::size_t>& active, const Eigen::VectorXd& u) {
  std::vector<double> full(space.dims(), 0.5);
  for (std::size_t j = 0; j < active.size(); ++j)
    full[active[j]] = std::clamp(u[static_cast<Eigen::Index>(j)], 0.0, 1.0);
  return space.from_unit(full);
}

SearchTrial run_trial(const GapOracle& oracle, const EnvConfig& cfg, std::size_t index) {
  try {
    const GapEstimate g = oracle(cfg);
    return {cfg, g.mean, g.std, g.k};
  } catch (const std::exception& e) {
    throw std::runtime_error("search trial " + std::to_string(index) + ": " + e.what());
  }
}

void finish(SearchResult& r) {
  if (r.trials.empty()) throw std::invalid_argument("search: zero-trial budget");
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.trials.size(); ++i)
    if (r.trials[i].gap > r.trials[best].gap) best = i;
  r.best = r.trials[best].config;
  r.best_gap = r.trials[best].gap;
}

}  // namespace

GapEstimate calc_baseline_gap(const EnvConfig& p, const policy::RewardFn& rl, const policy::RewardFn& rule,
                              std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("calc_baseline_gap: k must be at least 1");
  GapEstimate g;
  g.config = p;
  g.k = k;
  g.samples.resize(k);
  parallel_for(k, global_jobs(), [&](std::size_t i) {
    const std::uint64_t env_seed = derive_seed(seed, {i});
    g.samples[i] = rule(p, env_seed) - rl(p, env_seed);
  });
  g.mean = stats::mean(g.samples);
  g.std = k > 1 ? stats::stddev(g.samples) : 0.0;
  return g;
}

std::vector<double> SearchResult::best_so_far() const {
  std::vector<double> out;
  for (const auto& t : trials) out.push_back(out.empty() ? t.gap : std::max(out.back(), t.gap));
  return out;
}

SearchResult bo_search(const EnvSpace& space, const GapOracle& oracle, std::size_t n_trials, std::uint64_t seed) {
  if (n_trials < kBoInitialPoints) throw std::invalid_argument("bo_search: need at least 3 trials");
  const auto active = active_dims(space);
  const auto d = static_cast<Eigen::Index>(active.size());
  Rng rng(seed);
  SearchResult result;
  if (d == 0) {
    for (std::size_t t = 0; t < n_trials; ++t) result.trials.push_back(run_trial(oracle, space.from_unit(std::vector<double>(space.dims(), 0.5)), t));
    finish(result);
    return result;
  }
  Eigen::VectorXd shift(d);
  for (Eigen::Index j = 0; j < d; ++j) shift[j] = uniform01(rng);

  std::vector<Eigen::VectorXd> xs;
  std::vector<double> ys, noise;
  auto random_point = [&] {
    Eigen::VectorXd u(d);
    for (Eigen::Index j = 0; j < d; ++j) u[j] = uniform01(rng);
    return u;
  };
  for (std::size_t t = 0; t < n_trials; ++t) {
    Eigen::VectorXd x(d);
    if (t < kBoInitialPoints) {
      const Eigen::VectorXd h = halton_point(t + 1, active.size());
      for (Eigen::Index j = 0; j < d; ++j) x[j] = std::fmod(h[j] + shift[j], 1.0);
    } else {
      GaussianProcess gp;
      gp.fit(xs, ys, noise);
      const double best = *std::max_element(ys.begin(), ys.end());
      const double xi = 0.01 * gp.prior_std();
      auto acq = [&](const Eigen::VectorXd& u) {
        const auto p = gp.predict(u);
        return expected_improvement(p.mean, p.var, best, xi);
      };
      std::vector<std::pair<double, Eigen::VectorXd>> cands;
      for (std::size_t c = 0; c < kAcqRandomCandidates; ++c) {
        Eigen::VectorXd u = random_point();
        cands.emplace_back(acq(u), std::move(u));
      }
      std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      x = cands.front().second;
      double x_val = cands.front().first;
      for (std::size_t s = 0; s < kAcqLocalStarts && s < cands.size(); ++s) {
        Eigen::VectorXd cur = cands[s].second;
        double cur_val = cands[s].first;
        double step = 0.1;
        for (std::size_t it = 0; it < kAcqLocalSteps; ++it) {
          Eigen::VectorXd next = cur;
          for (Eigen::Index j = 0; j < d; ++j)
            next[j] = std::clamp(cur[j] + step * std::normal_distribution<double>(0.0, 1.0)(rng), 0.0, 1.0);
          const double v = acq(next);
          if (v > cur_val) {
            cur = std::move(next);
            cur_val = v;
          } else {
            step = std::max(step * 0.85, 1e-3);
          }
        }
        if (cur_val > x_val) {
          x = cur;
          x_val = cur_val;
        }
      }
      if (!(x_val > 0.0)) x = random_point();
    }
    const EnvConfig cfg = to_config(space, active, x);
    result.trials.push_back(run_trial(oracle, cfg, t));
    const auto& tr = result.trials.back();
    xs.push_back(x);
    ys.push_back(tr.gap);
    noise.push_back(tr.k > 0 ? tr.std * tr.std / static_cast<double>(tr.k) : 0.0);
  }
  finish(result);
  return result;
}

SearchResult random_search(const EnvSpace& space, const GapOracle& oracle, std::size_t n_trials, std::uint64_t seed) {
  ConfigDistribution dist(space);
  Rng rng(seed);
  SearchResult result;
  for (std::size_t t = 0; t < n_trials; ++t) result.trials.push_back(run_trial(oracle, dist.sample_base(rng), t));
  finish(result);
  return result;
}

SearchResult grid_search(const EnvSpace& space, const GapOracle& oracle, std::size_t points_per_dim,
                         std::size_t budget) {
  if (points_per_dim < 2) throw std::invalid_argument("grid_search: need at least 2 points per dimension");
  const auto active = active_dims(space);
  Eigen::VectorXd cur = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(active.size()), 0.5);
  SearchResult result;
  auto exhausted = [&] { return budget > 0 && result.trials.size() >= budget; };
  if (active.empty()) result.trials.push_back(run_trial(oracle, to_config(space, active, cur), 0));
  for (std::size_t j = 0; j < active.size() && !exhausted(); ++j) {
    double best_u = cur[static_cast<Eigen::Index>(j)];
    double best_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < points_per_dim && !exhausted(); ++p) {
      Eigen::VectorXd x = cur;
      x[static_cast<Eigen::Index>(j)] = static_cast<double>(p) / static_cast<double>(points_per_dim - 1);
      result.trials.push_back(run_trial(oracle, to_config(space, active, x), result.trials.size()));
      if (result.trials.back().gap > best_gap) {
        best_gap = result.trials.back().gap;
        best_u = x[static_cast<Eigen::Index>(j)];
      }
    }
    cur[static_cast<Eigen::Index>(j)] = best_u;
  }
  finish(result);
  return result;
}

SearchMethod parse_search_method(std::string_view s) {
  if (s == "bo") return SearchMethod::kBo;
  if (s == "random") return SearchMethod::kRandom;
  if (s == "grid") return SearchMethod::kGrid;
  throw std::invalid_argument("unknown search method '" + std::string(s) + "' (expected bo, random or grid)");
}

std::string_view to_string(SearchMethod m) {
  switch (m) {
    case SearchMethod::kBo: return "bo";
    case SearchMethod::kRandom: return "random";
    case SearchMethod::kGrid: return "grid";
  }
  return "?";
}

SearchResult run_search(SearchMethod method, const EnvSpace& space, const GapOracle& oracle, std::size_t budget,
                        std::uint64_t seed) {
  switch (method) {
    case SearchMethod::kBo: return bo_search(space, oracle, budget, seed);
    case SearchMethod::kRandom: return random_search(space, oracle, budget, seed);
    case SearchMethod::kGrid: return grid_search(space, oracle, 5, budget);
  }
  throw std::invalid_argument("run_search: unknown method");
}

}  // namespace genet::curriculum
