#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "genet/common/rng.hpp"
#include "genet/envspace/space.hpp"
#include "genet/envspace/trace.hpp"

namespace genet::lb {

/// Relative speeds of the servers; the service-rate parameter scales them.
inline constexpr std::array<double, 3> kServerProfile{0.5, 1.0, 2.0};
inline constexpr double kBytesPerWorkUnit = 1e4;
inline constexpr std::size_t kGapHistory = 4;

struct LbEnv {
  std::vector<double> rates;  // work units per ms
  JobTrace jobs;
  double shuffle_prob = 0.0;

  std::size_t servers() const { return rates.size(); }
  void validate() const;
};

LbEnv make_lb_env(const EnvConfig& cfg, Rng& rng);
LbEnv make_lb_env(const EnvConfig& cfg, JobTrace jobs);

/// What a policy sees before assigning the current job. `outstanding` may be
/// a permutation of the true per-server work when the shuffle fires.
struct LbObservation {
  std::size_t job_index = 0;
  double job_units = 0.0;
  std::vector<double> outstanding;
  std::vector<double> rates;
  std::array<double, kGapHistory> gaps_ms{};  // most recent first
  bool shuffled = false;
};

class LbSimulator {
 public:
  LbSimulator(const LbEnv& env, std::uint64_t seed);

  bool done() const { return next_ >= env_->jobs.jobs.size(); }
  const LbObservation& observe() const { return obs_; }
  /// Assigns the current job; returns its delay (ms, arrival to completion)
  /// and advances to the next arrival, draining every queue.
  double step(std::size_t server);

  const std::vector<double>& outstanding() const { return work_; }
  double now_ms() const { return now_; }

 private:
  void prepare_observation();

  const LbEnv* env_;
  Rng rng_;
  std::size_t next_ = 0;
  double now_ = 0.0;
  std::vector<double> work_;
  LbObservation obs_;
};

double job_units(const Job& j);

/// Negative mean delay. Throws std::invalid_argument on an empty list.
double lb_reward(std::span<const double> delays);

/// argmin outstanding / rate; ties go to the lowest index.
std::size_t llf_decide(const LbObservation& obs);
/// argmin (outstanding + job) / rate; ties go to the lowest index.
std::size_t sjf_decide(const LbObservation& obs);

using LbDecider = std::function<std::size_t(const LbObservation&)>;

struct LbLogRow {
  std::size_t job = 0;
  std::size_t server = 0;
  double delay_ms = 0.0;
};

struct LbEpisode {
  double reward = 0.0;
  std::vector<double> delays;
  std::vector<std::size_t> assignments;
};

LbEpisode run_lb_episode(const LbEnv& env, const LbDecider& decide, std::uint64_t seed,
                         std::vector<LbLogRow>* log = nullptr);

void write_lb_log(std::ostream& out, std::span<const LbLogRow> rows);

}  // namespace genet::lb
