#include "genet/abr/abr_policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace genet::abr {

std::size_t bba_decide(const AbrState& state, const AbrEnv& env, const BbaParams& params) {
  double reservoir = params.reservoir_s;
  double cushion = params.cushion_s;
  const double span = reservoir + cushion;
  if (span > env.max_buffer_s) {
    const double k = env.max_buffer_s / span;
    reservoir *= k;
    cushion *= k;
  }
  const std::size_t top = env.levels() - 1;
  if (state.buffer_s <= reservoir) return 0;
  if (state.buffer_s >= reservoir + cushion) return top;
  const double frac = (state.buffer_s - reservoir) / cushion;
  return std::min(top, static_cast<std::size_t>(std::floor(frac * static_cast<double>(top))));
}

namespace {

// Depth-first enumeration; `acc` accumulates QoE along the current prefix.
void search(const AbrEnv& env, double rtt_s, double predicted_mbps, std::size_t chunk, std::size_t depth,
            double buffer, std::size_t last, double acc, std::size_t first, MpcPlan& best) {
  if (depth == 0) {
    if (acc > best.qoe) best = {first, acc};
    return;
  }
  for (std::size_t q = 0; q < env.levels(); ++q) {
    const double megabits = env.chunk_sizes_bytes[chunk][q] * 8.0 / 1e6;
    const double dl = megabits / predicted_mbps + rtt_s;
    const double rebuf = std::max(dl - buffer, 0.0);
    const double next_buffer = std::min(std::max(buffer - dl, 0.0) + env.chunk_length_s, env.max_buffer_s);
    const double change = chunk == 0 ? 0.0 : std::abs(env.bitrates_mbps[q] - env.bitrates_mbps[last]);
    const double r = abr_chunk_reward(env.bitrates_mbps[q], rebuf, change);
    search(env, rtt_s, predicted_mbps, chunk + 1, depth - 1, next_buffer, q, acc + r,
           first == env.levels() ? q : first, best);
  }
}

}  // namespace

MpcPlan mpc_plan(const AbrEnv& env, double buffer_s, std::size_t last_bitrate, std::size_t next_chunk,
                 std::size_t chunks_remaining, double predicted_mbps, std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("mpc horizon must be >= 1");
  if (!(predicted_mbps > 0.0)) predicted_mbps = 1e-6;
  const std::size_t depth = std::min({horizon, chunks_remaining, env.chunk_count() - next_chunk});
  MpcPlan best{0, -std::numeric_limits<double>::infinity()};
  if (depth == 0) return {0, 0.0};
  search(env, env.min_rtt_ms / 1000.0, predicted_mbps, next_chunk, depth, buffer_s, last_bitrate, 0.0,
         env.levels(), best);
  return best;
}

RobustMpc::RobustMpc(std::size_t horizon) : horizon_(horizon) {
  if (horizon == 0) throw std::invalid_argument("mpc horizon must be >= 1");
}

std::size_t RobustMpc::decide(const AbrState& state, const AbrEnv& env) {
  // Score the previous prediction against the throughput it tried to predict.
  if (has_prediction_ && state.next_chunk > observed_chunk_) {
    const double dl = state.download_time_s.back();
    const double rtt = env.min_rtt_ms / 1000.0;
    const double actual = dl > rtt + 1e-9 ? state.throughput_mbps.back() * dl / (dl - rtt)
                                          : state.throughput_mbps.back();
    if (actual > 0.0) errors_.push_back(std::abs(last_prediction_ - actual) / actual);
    if (errors_.size() > 5) errors_.pop_front();
  }
  // Measured throughput includes the request RTT; the plan adds it back
  // explicitly, so predictions use transfer-only throughput.
  const double rtt = env.min_rtt_ms / 1000.0;
  auto transfer_rate = [&](std::size_t i) {
    const double tput = state.throughput_mbps[i];
    const double dl = state.download_time_s[i];
    if (dl <= rtt + 1e-9) return tput;
    return tput * dl / (dl - rtt);
  };
  // Only real measurements count; before the first download the lowest
  // bitrate is the prediction.
  const std::size_t n = std::min<std::size_t>(5, state.next_chunk);
  double harmonic = env.bitrates_mbps.front();
  if (n > 0) {
    double inv = 0.0;
    for (std::size_t i = kHistory - n; i < kHistory; ++i) inv += 1.0 / std::max(transfer_rate(i), 1e-9);
    harmonic = static_cast<double>(n) / inv;
  }
  last_prediction_ = harmonic;
  has_prediction_ = true;
  observed_chunk_ = state.next_chunk;
  double max_err = 0.0;
  for (double e : errors_) max_err = std::max(max_err, e);
  const double robust = harmonic / (1.0 + max_err);
  return mpc_plan(env, state.buffer_s, state.last_bitrate, state.next_chunk, state.chunks_remaining, robust,
                  horizon_)
      .first;
}

std::size_t mpc_decide(const AbrState& state, const AbrEnv& env, RobustMpc& mpc) { return mpc.decide(state, env); }

}  // namespace genet::abr
