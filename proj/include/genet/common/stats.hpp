#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace genet::stats {

double mean(std::span<const double> xs);

/// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> xs);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double half_width() const { return 0.5 * (hi - lo); }
};

/// Percentile bootstrap CI of the mean at the given confidence level.
Interval bootstrap_mean_ci(std::span<const double> xs, double confidence,
                           std::size_t resamples, std::uint64_t seed);

/// Average ranks (1-based), ties receive the mean of their positions.
std::vector<double> ranks(std::span<const double> xs);

double pearson(std::span<const double> xs, std::span<const double> ys);

/// Spearman rank correlation with average-rank tie handling.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Smallest value v in xs such that at least fraction q of xs is <= v.
double quantile(std::vector<double> xs, double q);

}  // namespace genet::stats
