#include "genet/curriculum/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace genet::curriculum {

namespace {
constexpr int kLengthGrid = 16;
constexpr int kSignalGrid = 10;
}  // namespace

double GaussianProcess::kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double length) const {
  const double r = (a - b).norm() / length;
  const double s5 = std::sqrt(5.0) * r;
  return (1.0 + s5 + 5.0 * r * r / 3.0) * std::exp(-s5);
}

double GaussianProcess::evaluate(double length, double signal, Eigen::LLT<Eigen::MatrixXd>* llt_out,
                                 Eigen::VectorXd* alpha_out) const {
  const auto n = static_cast<Eigen::Index>(x_.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) k(i, j) = k(j, i) = signal * kernel(x_[i], x_[j], length);
  for (Eigen::Index i = 0; i < n; ++i) k(i, i) += noise_[i] + kJitter;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  Eigen::VectorXd alpha = llt.solve(y_);
  double logdet = 0.0;
  const Eigen::MatrixXd l = llt.matrixL();
  for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(l(i, i));
  const double lml = -0.5 * y_.dot(alpha) - 0.5 * logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (llt_out) *llt_out = std::move(llt);
  if (alpha_out) *alpha_out = std::move(alpha);
  return lml;
}

void GaussianProcess::fit(const std::vector<Eigen::VectorXd>& x, const std::vector<double>& y,
                          const std::vector<double>& noise_var) {
  if (x.empty() || x.size() != y.size() || y.size() != noise_var.size())
    throw std::invalid_argument("gp fit: mismatched or empty inputs");
  x_ = x;
  const auto n = static_cast<Eigen::Index>(y.size());
  y_mean_ = 0.0;
  for (double v : y) y_mean_ += v;
  y_mean_ /= static_cast<double>(n);
  double var = 0.0;
  for (double v : y) var += (v - y_mean_) * (v - y_mean_);
  var /= static_cast<double>(n);
  y_scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;
  y_.resize(n);
  noise_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y_[i] = (y[static_cast<std::size_t>(i)] - y_mean_) / y_scale_;
    noise_[i] = std::max(noise_var[static_cast<std::size_t>(i)], 0.0) / (y_scale_ * y_scale_);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < kLengthGrid; ++a) {
    const double length = kMinLengthScale * std::pow(kMaxLengthScale / kMinLengthScale, a / double(kLengthGrid - 1));
    for (int b = 0; b < kSignalGrid; ++b) {
      const double signal = kMinSignalVar * std::pow(kMaxSignalVar / kMinSignalVar, b / double(kSignalGrid - 1));
      const double lml = evaluate(length, signal, nullptr, nullptr);
      if (lml > best) {
        best = lml;
        length_ = length;
        signal_ = signal;
      }
    }
  }
  if (!std::isfinite(best)) throw std::runtime_error("gp fit: covariance not positive definite");
  lml_ = evaluate(length_, signal_, &llt_, &alpha_);
}

double GaussianProcess::prior_std() const { return y_scale_ * std::sqrt(signal_); }

GaussianProcess::Prediction GaussianProcess::predict(const Eigen::VectorXd& x) const {
  const auto n = static_cast<Eigen::Index>(x_.size());
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks[i] = signal_ * kernel(x, x_[i], length_);
  const double mean = ks.dot(alpha_);
  const Eigen::VectorXd v = llt_.matrixL().solve(ks);
  const double var = std::max(signal_ - v.squaredNorm(), 0.0);
  return {y_mean_ + y_scale_ * mean, var * y_scale_ * y_scale_};
}

double expected_improvement(double mean, double var, double best, double xi) {
  const double sd = std::sqrt(std::max(var, 0.0));
  const double diff = mean - best - xi;
  if (sd < 1e-12) return std::max(diff, 0.0);
  const double z = diff / sd;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return diff * cdf + sd * pdf;
}

Eigen::VectorXd halton_point(std::size_t index, std::size_t dims) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (dims > std::size(kPrimes)) throw std::invalid_argument("halton: too many dimensions");
  Eigen::VectorXd p(static_cast<Eigen::Index>(dims));
  for (std::size_t d = 0; d < dims; ++d) {
    double f = 1.0, r = 0.0;
    std::size_t i = index;
    const int b = kPrimes[d];
    while (i > 0) {
      f /= b;
      r += f * static_cast<double>(i % b);
      i /= b;
    }
    p[static_cast<Eigen::Index>(d)] = r;
  }
  return p;
}

}  // namespace genet::curriculum
