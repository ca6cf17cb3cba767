#include "genet/common/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "genet/common/rng.hpp"

namespace genet::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(xs.size())));
  idx = std::clamp<std::size_t>(idx, 1, xs.size());
  return xs[idx - 1];
}

Interval bootstrap_mean_ci(std::span<const double> xs, double confidence,
                           std::size_t resamples, std::uint64_t seed) {
  if (xs.empty()) throw std::invalid_argument("bootstrap of empty sample");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("bootstrap confidence must lie in (0,1)");
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += xs[pick(rng)];
    m = s / static_cast<double>(xs.size());
  }
  const double tail = 0.5 * (1.0 - confidence);
  Interval ci{quantile(means, tail), quantile(means, 1.0 - tail)};
  // Percentile intervals can exclude the sample mean on tiny or heavily
  // skewed samples; widen to keep the point estimate inside.
  const double m = mean(xs);
  ci.lo = std::min(ci.lo, m);
  ci.hi = std::max(ci.hi, m);
  return ci;
}

std::vector<double> ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("pearson needs two equal-length samples of size >= 2");
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  auto rx = ranks(xs);
  auto ry = ranks(ys);
  return pearson(rx, ry);
}

}  // namespace genet::stats
