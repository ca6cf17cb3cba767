#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "genet/abr/abr_env.hpp"

namespace genet::abr {

/// Oracle state: buffer and session clock on a grid of `step` seconds.
/// The clock has to be part of the state because the download time of a
/// chunk depends on where in the trace it starts.
struct QuantizedState {
  std::int64_t buffer = 0;  // units of step
  std::int64_t clock = 0;   // units of step, unwrapped elapsed time
  std::size_t last = 0;
};

struct QuantizedStep {
  QuantizedState next;
  double rebuffer_s = 0.0;
  double reward = 0.0;
};

/// One chunk download from a quantized state with full knowledge of the
/// trace; the resulting buffer and clock are rounded to the grid. Returns
/// nullopt when a non-looping trace runs out.
std::optional<QuantizedStep> quantized_transition(const AbrEnv& env, std::size_t chunk,
                                                  const QuantizedState& s, std::size_t bitrate, double step);

struct OptimalResult {
  double total_reward = 0.0;
  double mean_reward = 0.0;  // total / chunks
  std::vector<std::size_t> plan;
  /// Mean per-chunk reward of `plan` replayed in the unrounded simulator.
  /// Grid rounding can bias the DP value either way; this one is achieved.
  double realized_mean_reward = 0.0;
  std::size_t states = 0;
  /// False when some layer exceeded max_states and was cut to its best
  /// prefixes; the result is then a lower bound on the quantized optimum.
  bool exact = true;
};

struct OptimalParams {
  double step = 0.1;
  std::size_t max_states = 20000;
};

/// Forward dynamic program over (chunk, quantized buffer, quantized clock,
/// last bitrate). Values accumulate in download order, so while no layer is
/// cut the result equals enumerating every bitrate sequence under the same
/// quantization.
OptimalResult abr_optimal(const AbrEnv& env, const OptimalParams& params = {});

}  // namespace genet::abr
