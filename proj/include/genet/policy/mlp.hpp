#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace genet::policy {

/// Fully connected tanh network, linear output layer.
struct Architecture {
  std::size_t inputs = 0;
  std::vector<std::size_t> hidden{32, 32};
  std::size_t outputs = 0;
  std::string activation = "tanh";

  std::size_t param_count() const;
  /// Widths including input and output.
  std::vector<std::size_t> widths() const;
  void validate() const;
  bool operator==(const Architecture&) const = default;
};

/// Per-call scratch space for forward and backward passes.
struct MlpWorkspace {
  std::vector<Eigen::VectorXd> activations;  // post-activation, [0] = input
  std::vector<Eigen::VectorXd> deltas;
};

/// Parameters are one flat vector: for each layer, the weight matrix
/// (column-major, out x in) followed by the bias.
class Mlp {
 public:
  explicit Mlp(Architecture arch);

  const Architecture& arch() const { return arch_; }

  /// Writes the network output into `out` (size arch.outputs).
  void forward(std::span<const double> params, std::span<const double> input, MlpWorkspace& ws,
               Eigen::VectorXd& out) const;
  /// After `forward` on the same workspace, accumulates d(out . grad_out)/dparams
  /// into `grad`, scaled by nothing (caller folds scales into grad_out).
  void backward(std::span<const double> params, const Eigen::VectorXd& grad_out, MlpWorkspace& ws,
                std::span<double> grad) const;

  /// Glorot-uniform weights, zero biases; output layer scaled by `out_scale`.
  std::vector<double> init(std::uint64_t seed, double out_scale = 0.1) const;

 private:
  Architecture arch_;
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;  // parameter offset of each layer
};

/// Numerically stable softmax (max-subtracted).
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits);
/// Inverse-CDF draw from probabilities `p` with u in [0, 1).
std::size_t sample_categorical(const Eigen::VectorXd& p, double u);

}  // namespace genet::policy
