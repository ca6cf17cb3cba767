#pragma once

#include <array>
#include <cstddef>
#include <memory>

#include "genet/abr/abr_env.hpp"
#include "genet/cc/cc_sim.hpp"
#include "genet/envspace/generators.hpp"
#include "genet/lb/lb_sim.hpp"
#include "genet/policy/task.hpp"

namespace genet::tasks {

/// Optional recorded-trace mixing for ABR and CC environments.
struct TraceMix {
  std::shared_ptr<const TraceCorpus> corpus;
  double weight = 0.0;
  // When set, every environment replays this trace (bandwidth for ABR and
  // CC, jobs for LB); simulator noise still follows the env seed.
  std::shared_ptr<const BandwidthTrace> fixed_bandwidth;
  std::shared_ptr<const JobTrace> fixed_jobs;
};

// Environment instances are a pure function of (config, env seed); rule and
// learned policies therefore see the same trace and the same simulator noise.
abr::AbrEnv make_abr_instance(const EnvConfig& cfg, std::uint64_t env_seed, const TraceMix& mix = {});
cc::CcEnv make_cc_instance(const EnvConfig& cfg, std::uint64_t env_seed, const TraceMix& mix = {});
lb::LbEnv make_lb_instance(const EnvConfig& cfg, std::uint64_t env_seed, const TraceMix& mix = {});
std::uint64_t sim_seed(std::uint64_t env_seed);

inline constexpr std::size_t kCcHistory = 10;
inline constexpr std::size_t kCcPerMiFeatures = 4;
inline constexpr std::size_t kCcFeatureDim = kCcHistory * kCcPerMiFeatures + 2;
inline constexpr std::array<double, 11> kCcActionDeltas{-0.5, -0.4, -0.3, -0.2, -0.1, 0.0,
                                                        0.1,  0.2,  0.3,  0.4,  0.5};
inline constexpr std::size_t kLbFeatureDim = 3 * lb::kServerProfile.size() + 1 + lb::kGapHistory;

/// Writes the learned-policy observation of an LB decision.
void lb_features(const lb::LbObservation& obs, std::span<double> out);

/// Baselines: ABR {mpc, bba}, CC {bbr, cubic}, LB {llf, sjf}; the first is
/// the default curriculum guide.
policy::Task abr_task(const TraceMix& mix = {});
policy::Task cc_task(const TraceMix& mix = {});
policy::Task lb_task(const TraceMix& mix = {});
policy::Task task_for(UseCase u, const TraceMix& mix = {});

}  // namespace genet::tasks
