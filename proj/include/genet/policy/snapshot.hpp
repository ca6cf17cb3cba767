#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "genet/common/rng.hpp"
#include "genet/envspace/space.hpp"
#include "genet/policy/mlp.hpp"

namespace genet::policy {

/// Adam moments for the concatenated (actor, critic) parameter vector.
struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
  bool operator==(const OptimizerState&) const = default;
};

struct PolicySnapshot {
  static constexpr std::uint32_t kFormatVersion = 1;

  UseCase use_case = UseCase::kAbr;
  Architecture arch;            // actor; the critic shares hidden widths
  std::vector<double> actor;
  std::vector<double> critic;
  std::uint64_t iteration = 0;  // training iterations applied so far
  OptimizerState optimizer;

  Architecture critic_arch() const;
  /// Throws std::invalid_argument on count mismatches or non-finite values.
  void validate() const;
  bool operator==(const PolicySnapshot&) const = default;
};

PolicySnapshot init_snapshot(UseCase use_case, Architecture arch, std::uint64_t seed);

/// Action probabilities for one feature vector.
Eigen::VectorXd policy_probs(const PolicySnapshot& snap, std::span<const double> features);
/// Samples from the softmax, or takes the argmax (lowest index on ties).
std::size_t policy_act(const PolicySnapshot& snap, std::span<const double> features, Rng& rng, bool greedy);

// Binary checkpoint: 8-byte magic, then little-endian u32 version, u32 use
// case, u64 layer count and widths, u64 iteration, and u64-counted float64
// arrays for actor, critic, Adam m and v, followed by the u64 Adam step.
void write_checkpoint(std::ostream& out, const PolicySnapshot& snap);
PolicySnapshot read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const PolicySnapshot& snap);
PolicySnapshot load_checkpoint(const std::string& path);

}  // namespace genet::policy
