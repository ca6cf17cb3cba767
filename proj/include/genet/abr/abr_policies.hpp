#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "genet/abr/abr_env.hpp"

namespace genet::abr {

struct BbaParams {
  double reservoir_s = 5.0;
  double cushion_s = 10.0;
};

/// Buffer-based rate map. When reservoir + cushion exceeds the player's
/// maximum buffer both are scaled down so a full buffer maps to the top level.
std::size_t bba_decide(const AbrState& state, const AbrEnv& env, const BbaParams& params = {});

struct MpcPlan {
  std::size_t first = 0;
  double qoe = 0.0;
};

/// Exhaustive search over bitrate sequences of length
/// min(horizon, chunks remaining) under a constant throughput prediction.
/// Ties keep the lexicographically smallest sequence.
MpcPlan mpc_plan(const AbrEnv& env, double buffer_s, std::size_t last_bitrate, std::size_t next_chunk,
                 std::size_t chunks_remaining, double predicted_mbps, std::size_t horizon);

/// RobustMPC: harmonic mean of the last five throughput samples discounted
/// by (1 + max relative prediction error over the last five chunks).
class RobustMpc {
 public:
  explicit RobustMpc(std::size_t horizon = 5);

  std::size_t decide(const AbrState& state, const AbrEnv& env);
  double last_prediction() const { return last_prediction_; }

 private:
  std::size_t horizon_;
  std::deque<double> errors_;
  double last_prediction_ = 0.0;
  std::size_t observed_chunk_ = 0;
  bool has_prediction_ = false;
};

std::size_t mpc_decide(const AbrState& state, const AbrEnv& env, RobustMpc& mpc);

}  // namespace genet::abr
