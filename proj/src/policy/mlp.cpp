#include "genet/policy/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "genet/common/rng.hpp"

namespace genet::policy {

std::vector<std::size_t> Architecture::widths() const {
  std::vector<std::size_t> w{inputs};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(outputs);
  return w;
}

std::size_t Architecture::param_count() const {
  const auto w = widths();
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) n += w[l + 1] * w[l] + w[l + 1];
  return n;
}

void Architecture::validate() const {
  if (inputs == 0 || outputs == 0) throw std::invalid_argument("architecture: zero-width input or output");
  for (auto h : hidden)
    if (h == 0) throw std::invalid_argument("architecture: zero-width hidden layer");
  if (activation != "tanh") throw std::invalid_argument("architecture: unsupported activation '" + activation + "'");
}

Mlp::Mlp(Architecture arch) : arch_(std::move(arch)) {
  arch_.validate();
  widths_ = arch_.widths();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(off);
    off += widths_[l + 1] * widths_[l] + widths_[l + 1];
  }
}

void Mlp::forward(std::span<const double> params, std::span<const double> input, MlpWorkspace& ws,
                  Eigen::VectorXd& out) const {
  if (params.size() != arch_.param_count()) throw std::invalid_argument("mlp: parameter count mismatch");
  if (input.size() != arch_.inputs) throw std::invalid_argument("mlp: input width mismatch");
  const std::size_t layers = widths_.size() - 1;
  ws.activations.resize(layers + 1);
  ws.activations[0] = Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<Eigen::Index>(widths_[l]);
    const auto o = static_cast<Eigen::Index>(widths_[l + 1]);
    Eigen::Map<const Eigen::MatrixXd> w(params.data() + offsets_[l], o, in);
    Eigen::Map<const Eigen::VectorXd> b(params.data() + offsets_[l] + o * in, o);
    Eigen::VectorXd z = w * ws.activations[l] + b;
    if (l + 1 < layers) z = z.array().tanh();
    ws.activations[l + 1] = std::move(z);
  }
  out = ws.activations[layers];
}

void Mlp::backward(std::span<const double> params, const Eigen::VectorXd& grad_out, MlpWorkspace& ws,
                   std::span<double> grad) const {
  const std::size_t layers = widths_.size() - 1;
  Eigen::VectorXd delta = grad_out;
  for (std::size_t l = layers; l-- > 0;) {
    const auto in = static_cast<Eigen::Index>(widths_[l]);
    const auto o = static_cast<Eigen::Index>(widths_[l + 1]);
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + offsets_[l], o, in);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offsets_[l] + o * in, o);
    gw.noalias() += delta * ws.activations[l].transpose();
    gb += delta;
    if (l == 0) break;
    Eigen::Map<const Eigen::MatrixXd> w(params.data() + offsets_[l], o, in);
    const auto& a = ws.activations[l];
    delta = (w.transpose() * delta).array() * (1.0 - a.array().square());
  }
}

std::vector<double> Mlp::init(std::uint64_t seed, double out_scale) const {
  std::vector<double> p(arch_.param_count(), 0.0);
  Rng rng(seed);
  const std::size_t layers = widths_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const double in = static_cast<double>(widths_[l]);
    const double o = static_cast<double>(widths_[l + 1]);
    double limit = std::sqrt(6.0 / (in + o));
    if (l + 1 == layers) limit *= out_scale;
    const std::size_t n = widths_[l + 1] * widths_[l];
    for (std::size_t i = 0; i < n; ++i) p[offsets_[l] + i] = uniform(rng, -limit, limit);
  }
  return p;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp();
  return e / e.sum();
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return logits.array() - lse;
}

std::size_t sample_categorical(const Eigen::VectorXd& p, double u) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<std::size_t>(i);
  }
  return static_cast<std::size_t>(p.size() - 1);
}

}  // namespace genet::policy
