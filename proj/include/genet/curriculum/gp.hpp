#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace genet::curriculum {

/// Gaussian-process regression with an isotropic Matern-5/2 kernel on the
/// unit cube. Targets are standardized internally; per-point noise variances
/// are given in target units. Length scale and signal variance are chosen by
/// maximizing the log marginal likelihood over a fixed log-spaced grid.
class GaussianProcess {
 public:
  static constexpr double kMinLengthScale = 0.05;
  static constexpr double kMaxLengthScale = 2.0;
  static constexpr double kMinSignalVar = 0.05;
  static constexpr double kMaxSignalVar = 20.0;
  static constexpr double kJitter = 1e-6;

  void fit(const std::vector<Eigen::VectorXd>& x, const std::vector<double>& y, const std::vector<double>& noise_var);

  struct Prediction {
    double mean;
    double var;
  };
  /// Posterior of the latent function, in target units.
  Prediction predict(const Eigen::VectorXd& x) const;

  double length_scale() const { return length_; }
  double signal_var() const { return signal_; }
  /// Prior standard deviation of the latent function, in target units.
  double prior_std() const;
  double log_marginal_likelihood() const { return lml_; }

 private:
  double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double length) const;
  double evaluate(double length, double signal, Eigen::LLT<Eigen::MatrixXd>* llt_out, Eigen::VectorXd* alpha_out) const;

  std::vector<Eigen::VectorXd> x_;
  Eigen::VectorXd y_;  // standardized
  Eigen::VectorXd noise_;  // standardized units
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double length_ = 0.3;
  double signal_ = 1.0;
  double lml_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
};

/// Expected improvement over `best` for maximization.
double expected_improvement(double mean, double var, double best, double xi = 0.01);

/// i-th point (1-based) of the Halton sequence in `dims` dimensions.
Eigen::VectorXd halton_point(std::size_t index, std::size_t dims);

}  // namespace genet::curriculum
