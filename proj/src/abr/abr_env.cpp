#include "genet/abr/abr_env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "genet/envspace/generators.hpp"
#include "genet/envspace/trace_clock.hpp"

namespace genet::abr {

void AbrEnv::validate() const {
  trace.validate();
  if (bitrates_mbps.empty()) throw std::invalid_argument("abr env: empty bitrate ladder");
  for (std::size_t i = 1; i < bitrates_mbps.size(); ++i)
    if (!(bitrates_mbps[i] > bitrates_mbps[i - 1]))
      throw std::invalid_argument("abr env: ladder must be strictly increasing");
  if (!(chunk_length_s > 0.0) || !(max_buffer_s > 0.0) || min_rtt_ms < 0.0)
    throw std::invalid_argument("abr env: invalid chunk length, buffer or rtt");
  if (chunk_sizes_bytes.empty()) throw std::invalid_argument("abr env: no chunks");
  for (const auto& row : chunk_sizes_bytes)
    if (row.size() != bitrates_mbps.size())
      throw std::invalid_argument("abr env: chunk size row does not match ladder");
}

std::size_t chunk_count_for(double video_length_s, double chunk_length_s) {
  if (!(video_length_s > 0.0 && chunk_length_s > 0.0))
    throw std::invalid_argument("video and chunk length must be positive");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(video_length_s / chunk_length_s)));
}

std::vector<std::vector<double>> synthetic_chunk_sizes(std::span<const double> ladder,
                                                       double chunk_length_s, std::size_t chunks) {
  std::vector<std::vector<double>> sizes(chunks, std::vector<double>(ladder.size()));
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t b = 0; b < ladder.size(); ++b) {
      const std::uint64_t h = derive_seed(0x5eedc0de, {c, b});
      const double v = 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;  // [-1, 1)
      sizes[c][b] = ladder[b] * 1e6 / 8.0 * chunk_length_s * (1.0 + 0.1 * v);
    }
  }
  return sizes;
}

AbrEnv make_abr_env(const EnvConfig& cfg, BandwidthTrace trace) {
  if (cfg.use_case != UseCase::kAbr || cfg.values.size() != 6)
    throw std::invalid_argument("make_abr_env: config is not an ABR config");
  AbrEnv env;
  env.trace = std::move(trace);
  env.chunk_length_s = cfg[abr_param::kChunkLength];
  env.max_buffer_s = cfg[abr_param::kMaxBuffer];
  env.min_rtt_ms = cfg[abr_param::kMinRtt];
  env.video_length_s = cfg[abr_param::kVideoLength];
  env.chunk_sizes_bytes = synthetic_chunk_sizes(env.bitrates_mbps, env.chunk_length_s,
                                                chunk_count_for(env.video_length_s, env.chunk_length_s));
  env.validate();
  return env;
}

AbrEnv make_abr_env(const EnvConfig& cfg, Rng& rng) { return make_abr_env(cfg, gen_abr_trace(cfg, rng)); }

AbrState initial_state(const AbrEnv& env) {
  AbrState s;
  s.throughput_mbps.fill(env.bitrates_mbps.front());
  s.download_time_s.fill(0.0);
  s.chunks_remaining = env.chunk_count();
  return s;
}

std::span<const double> next_chunk_sizes(const AbrEnv& env, const AbrState& s) {
  const std::size_t c = std::min(s.next_chunk, env.chunk_count() - 1);
  return env.chunk_sizes_bytes[c];
}

double abr_chunk_reward(double bitrate_mbps, double rebuffer_s, double change_mbps) {
  return kRebufferCoef * rebuffer_s + kBitrateCoef * bitrate_mbps + kChangeCoef * change_mbps;
}

double abr_reward(std::span<const ChunkOutcome> chunks) {
  if (chunks.empty()) throw std::invalid_argument("abr_reward: no chunks");
  double s = 0.0;
  for (const auto& c : chunks) s += abr_chunk_reward(c.bitrate_mbps, c.rebuffer_s, c.bitrate_change_mbps);
  return s / static_cast<double>(chunks.size());
}

AbrStepResult abr_step(const AbrEnv& env, AbrState& state, std::size_t bitrate_index) {
  if (bitrate_index >= env.levels()) throw std::out_of_range("abr_step: bitrate index out of range");
  if (state.chunks_remaining == 0) throw std::logic_error("abr_step: no chunks remaining");
  AbrStepResult r;
  if (state.truncated) {
    r.truncated = true;
    return r;
  }
  TraceClock clock(env.trace, env.loop_trace, state.elapsed_s);
  const double megabits = env.chunk_sizes_bytes[state.next_chunk][bitrate_index] * 8.0 / 1e6;
  const double rtt = env.min_rtt_ms / 1000.0;
  clock.advance(rtt);
  const auto transfer = clock.transfer(megabits);
  if (!transfer) {
    state.truncated = true;
    r.truncated = true;
    return r;
  }
  r.download_time_s = rtt + *transfer;
  r.rebuffer_s = std::max(r.download_time_s - state.buffer_s, 0.0);
  double buffer = std::max(state.buffer_s - r.download_time_s, 0.0) + env.chunk_length_s;
  r.sleep_s = std::max(buffer - env.max_buffer_s, 0.0);
  buffer -= r.sleep_s;
  clock.advance(r.sleep_s);
  r.buffer_s = buffer;
  r.bitrate_mbps = env.bitrates_mbps[bitrate_index];
  // The first chunk has no predecessor to switch from.
  r.bitrate_change_mbps =
      state.next_chunk == 0 ? 0.0 : std::abs(r.bitrate_mbps - env.bitrates_mbps[state.last_bitrate]);
  r.reward = abr_chunk_reward(r.bitrate_mbps, r.rebuffer_s, r.bitrate_change_mbps);

  std::rotate(state.throughput_mbps.begin(), state.throughput_mbps.begin() + 1, state.throughput_mbps.end());
  std::rotate(state.download_time_s.begin(), state.download_time_s.begin() + 1, state.download_time_s.end());
  state.throughput_mbps.back() = megabits / r.download_time_s;
  state.download_time_s.back() = r.download_time_s;
  state.buffer_s = buffer;
  state.last_bitrate = bitrate_index;
  ++state.next_chunk;
  --state.chunks_remaining;
  state.elapsed_s = clock.elapsed();
  return r;
}

void write_abr_log(std::ostream& out, std::span<const AbrLogRow> rows) {
  out << "chunk,bitrate_index,bitrate_mbps,rebuffer_s,buffer_s,reward\n";
  for (const auto& r : rows) {
    out << r.chunk << ',' << r.bitrate_index << ',' << format_double(r.bitrate_mbps) << ','
        << format_double(r.rebuffer_s) << ',' << format_double(r.buffer_s) << ',' << format_double(r.reward)
        << '\n';
  }
}

AbrEpisodeResult run_abr_episode(const AbrEnv& env, const AbrDecider& decide, std::vector<AbrLogRow>* log) {
  AbrEpisodeResult out;
  AbrState s = initial_state(env);
  while (s.chunks_remaining > 0) {
    const std::size_t chunk = s.next_chunk;
    const std::size_t q = decide(s, env);
    const auto r = abr_step(env, s, q);
    if (r.truncated) break;
    out.chunks.push_back({r.bitrate_mbps, r.rebuffer_s, r.bitrate_change_mbps});
    if (log) log->push_back({chunk, q, r.bitrate_mbps, r.rebuffer_s, r.buffer_s, r.reward});
  }
  out.reward = out.chunks.empty() ? 0.0 : abr_reward(out.chunks);
  return out;
}

std::vector<double> abr_features(const AbrEnv& env, const AbrState& s) {
  std::vector<double> f;
  f.reserve(kAbrFeatureDim);
  // log2 compresses the 0.2-1000 Mbps range.
  for (double t : s.throughput_mbps) f.push_back(std::log2(1.0 + t) / 10.0);
  for (double d : s.download_time_s) f.push_back(std::min(d, 50.0) / 10.0);
  for (double b : next_chunk_sizes(env, s)) f.push_back(b / 1e6);
  // Fixed-size: ladders longer than six levels are truncated.
  f.resize(2 * kHistory + 6, 0.0);
  f.push_back(s.buffer_s / 10.0);
  f.push_back(s.buffer_s / env.max_buffer_s);
  f.push_back(env.bitrates_mbps[s.last_bitrate] / env.bitrates_mbps.back());
  f.push_back(std::min<double>(static_cast<double>(s.chunks_remaining), 48.0) / 48.0);
  return f;
}

}  // namespace genet::abr
