#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "genet/common/rng.hpp"
#include "genet/envspace/space.hpp"
#include "genet/envspace/trace.hpp"

namespace genet::abr {

/// Bitrate ladder of the synthetic video (Mbps).
inline const std::vector<double> kDefaultLadderMbps = {0.3, 0.75, 1.2, 1.85, 2.85, 4.3};

// Reward coefficients: rebuffering (s), bitrate (Mbps), bitrate change (Mbps).
inline constexpr double kRebufferCoef = -10.0;
inline constexpr double kBitrateCoef = 1.0;
inline constexpr double kChangeCoef = -1.0;

inline constexpr std::size_t kHistory = 8;

struct AbrEnv {
  BandwidthTrace trace;
  std::vector<double> bitrates_mbps = kDefaultLadderMbps;
  double chunk_length_s = 4.0;
  double max_buffer_s = 60.0;
  double min_rtt_ms = 80.0;
  double video_length_s = 196.0;
  std::vector<std::vector<double>> chunk_sizes_bytes;  // [chunk][bitrate]
  bool loop_trace = true;

  std::size_t chunk_count() const { return chunk_sizes_bytes.size(); }
  std::size_t levels() const { return bitrates_mbps.size(); }
  void validate() const;
};

/// bitrate * chunk_length with a fixed +/-10% per-(chunk, level) variation
/// that depends only on the indices.
std::vector<std::vector<double>> synthetic_chunk_sizes(std::span<const double> ladder_mbps,
                                                       double chunk_length_s, std::size_t chunks);

std::size_t chunk_count_for(double video_length_s, double chunk_length_s);

AbrEnv make_abr_env(const EnvConfig& cfg, BandwidthTrace trace);
/// Generates the bandwidth trace from cfg.
AbrEnv make_abr_env(const EnvConfig& cfg, Rng& rng);

struct AbrState {
  std::array<double, kHistory> throughput_mbps{};  // oldest first
  std::array<double, kHistory> download_time_s{};
  double buffer_s = 0.0;
  std::size_t last_bitrate = 0;
  std::size_t next_chunk = 0;
  std::size_t chunks_remaining = 0;
  // Simulator clock.
  double elapsed_s = 0.0;
  bool truncated = false;
};

/// Empty buffer, lowest-bitrate history and last bitrate.
AbrState initial_state(const AbrEnv& env);

std::span<const double> next_chunk_sizes(const AbrEnv& env, const AbrState& s);

struct AbrStepResult {
  double download_time_s = 0.0;
  double rebuffer_s = 0.0;
  double sleep_s = 0.0;
  double buffer_s = 0.0;
  double bitrate_mbps = 0.0;
  double bitrate_change_mbps = 0.0;
  double reward = 0.0;
  bool truncated = false;
};

/// Downloads the next chunk at `bitrate_index`. On a non-looping trace that
/// runs out, returns truncated = true and leaves the state marked truncated.
/// The first chunk carries no bitrate-change penalty.
AbrStepResult abr_step(const AbrEnv& env, AbrState& state, std::size_t bitrate_index);

double abr_chunk_reward(double bitrate_mbps, double rebuffer_s, double change_mbps);

struct ChunkOutcome {
  double bitrate_mbps = 0.0;
  double rebuffer_s = 0.0;
  double bitrate_change_mbps = 0.0;
};

/// Mean per-chunk reward. Throws std::invalid_argument on an empty list.
double abr_reward(std::span<const ChunkOutcome> chunks);

struct AbrLogRow {
  std::size_t chunk = 0;
  std::size_t bitrate_index = 0;
  double bitrate_mbps = 0.0;
  double rebuffer_s = 0.0;
  double buffer_s = 0.0;
  double reward = 0.0;
};

void write_abr_log(std::ostream& out, std::span<const AbrLogRow> rows);

using AbrDecider = std::function<std::size_t(const AbrState&, const AbrEnv&)>;

struct AbrEpisodeResult {
  double reward = 0.0;  // mean per chunk
  std::vector<ChunkOutcome> chunks;
};

AbrEpisodeResult run_abr_episode(const AbrEnv& env, const AbrDecider& decide,
                                 std::vector<AbrLogRow>* log = nullptr);

/// Normalized observation for learned policies.
inline constexpr std::size_t kAbrFeatureDim = 2 * kHistory + 6 + 4;
std::vector<double> abr_features(const AbrEnv& env, const AbrState& s);

}  // namespace genet::abr
