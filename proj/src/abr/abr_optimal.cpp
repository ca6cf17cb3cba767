#include "genet/abr/abr_optimal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "genet/envspace/trace_clock.hpp"

namespace genet::abr {

std::optional<QuantizedStep> quantized_transition(const AbrEnv& env, std::size_t chunk, const QuantizedState& s,
                                                  std::size_t bitrate, double step) {
  const double start = static_cast<double>(s.clock) * step;
  const double buffer = static_cast<double>(s.buffer) * step;
  TraceClock clock(env.trace, env.loop_trace, start);
  const double rtt = env.min_rtt_ms / 1000.0;
  clock.advance(rtt);
  const auto transfer = clock.transfer(env.chunk_sizes_bytes[chunk][bitrate] * 8.0 / 1e6);
  if (!transfer) return std::nullopt;
  const double dl = rtt + *transfer;
  QuantizedStep out;
  out.rebuffer_s = std::max(dl - buffer, 0.0);
  double next_buffer = std::max(buffer - dl, 0.0) + env.chunk_length_s;
  const double sleep = std::max(next_buffer - env.max_buffer_s, 0.0);
  next_buffer -= sleep;
  out.next.buffer = std::llround(next_buffer / step);
  out.next.clock = std::llround((start + dl + sleep) / step);
  out.next.last = bitrate;
  const double change = chunk == 0 ? 0.0 : std::abs(env.bitrates_mbps[bitrate] - env.bitrates_mbps[s.last]);
  out.reward = abr_chunk_reward(env.bitrates_mbps[bitrate], out.rebuffer_s, change);
  return out;
}

namespace {

struct Node {
  QuantizedState state;
  double value;
  std::uint32_t parent;
  std::uint8_t action;
};

struct BackLink {
  std::uint32_t parent;
  std::uint8_t action;
};

std::uint64_t pack(const QuantizedState& s) {
  return (static_cast<std::uint64_t>(s.clock) << 24) | (static_cast<std::uint64_t>(s.buffer) << 4) |
         static_cast<std::uint64_t>(s.last);
}

}  // namespace

OptimalResult abr_optimal(const AbrEnv& env, const OptimalParams& params) {
  const double step = params.step;
  if (!(step > 0.0)) throw std::invalid_argument("abr_optimal: step must be positive");
  if (params.max_states == 0) throw std::invalid_argument("abr_optimal: max_states must be positive");
  if (env.levels() > 16) throw std::invalid_argument("abr_optimal: at most 16 bitrate levels");
  if (env.max_buffer_s / step >= double(1 << 20)) throw std::invalid_argument("abr_optimal: buffer grid too fine");

  OptimalResult result;
  std::vector<Node> cur{{QuantizedState{0, 0, 0}, 0.0, 0, 0}};
  std::vector<std::vector<BackLink>> links;
  std::unordered_map<std::uint64_t, std::size_t> index;
  for (std::size_t chunk = 0; chunk < env.chunk_count(); ++chunk) {
    std::vector<Node> next;
    index.clear();
    index.reserve(cur.size() * env.levels());
    for (std::size_t i = 0; i < cur.size(); ++i) {
      for (std::size_t q = 0; q < env.levels(); ++q) {
        const auto t = quantized_transition(env, chunk, cur[i].state, q, step);
        if (!t) continue;
        const double v = cur[i].value + t->reward;
        const Node node{t->next, v, static_cast<std::uint32_t>(i), static_cast<std::uint8_t>(q)};
        auto [it, inserted] = index.try_emplace(pack(t->next), next.size());
        if (inserted) {
          next.push_back(node);
        } else if (v > next[it->second].value) {
          next[it->second] = node;
        }
      }
    }
    if (next.empty()) break;
    if (next.size() > params.max_states) {
      result.exact = false;
      std::stable_sort(next.begin(), next.end(), [](const Node& a, const Node& b) { return a.value > b.value; });
      next.resize(params.max_states);
    }
    result.states += next.size();
    std::vector<BackLink> layer(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) layer[i] = {next[i].parent, next[i].action};
    links.push_back(std::move(layer));
    cur = std::move(next);
  }
  std::size_t arg = 0;
  for (std::size_t i = 1; i < cur.size(); ++i)
    if (cur[i].value > cur[arg].value) arg = i;
  result.total_reward = cur[arg].value;
  const std::size_t chunks = links.size();
  result.mean_reward = chunks > 0 ? result.total_reward / static_cast<double>(chunks) : 0.0;
  result.plan.resize(chunks);
  std::size_t node = arg;
  for (std::size_t layer = chunks; layer > 0; --layer) {
    result.plan[layer - 1] = links[layer - 1][node].action;
    node = links[layer - 1][node].parent;
  }
  std::size_t next = 0;
  const auto realized = run_abr_episode(env, [&](const AbrState&, const AbrEnv&) {
    return next < result.plan.size() ? result.plan[next++] : std::size_t{0};
  });
  result.realized_mean_reward = realized.reward;
  return result;
}

}  // namespace genet::abr
