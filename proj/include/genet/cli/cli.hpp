#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "genet/curriculum/curriculum.hpp"
#include "genet/envspace/space.hpp"
#include "genet/policy/trainer.hpp"

namespace genet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Bad flags or configuration; maps to kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything `genet train` needs. At most one of preset, space_file and
/// env_config selects the training distribution; env_config (a single
/// configuration file, such as the output of `genet search`) trains on that
/// point alone.
struct RunConfig {
  UseCase use_case = UseCase::kAbr;
  std::string preset = "RL3";
  std::string space_file;
  std::string env_config;
  curriculum::Mode mode = curriculum::Mode::kUniform;
  std::string baseline;  // empty: the use case's default
  policy::TrainSpec train;
  curriculum::CurriculumSpec curriculum;  // train, rule and callbacks unused
  std::uint64_t seed = 0;
  std::string output_dir;
  std::string trace_dir;
  double trace_weight = 0.0;
  std::string init_checkpoint;
};

/// Strict parse: unknown or mistyped fields throw UsageError naming the
/// field; an unknown baseline lists the valid ones.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& rc);

/// Space the configuration trains on.
EnvSpace training_space(const RunConfig& rc);

/// Degenerate box holding exactly `cfg`.
EnvSpace point_space(const EnvConfig& cfg);
/// Reads a configuration file without a box; unknown names are rejected.
EnvConfig load_point_config(const std::string& path);

/// Entry point of the `genet` binary. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace genet::cli
