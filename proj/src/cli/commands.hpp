#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace genet::cli {

struct SpaceOptions {
  std::string use_case;
  std::string preset = "RL3";
  std::string space_file;
};

struct GenTracesOptions {
  SpaceOptions space;
  std::string env_config;
  bool sample = false;
  std::size_t count = 10;
  std::string out;
  std::uint64_t seed = 0;
};

struct TrainOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool resume = false;
};

struct SearchOptions {
  std::string checkpoint;
  SpaceOptions space;
  std::string baseline;
  std::string method = "bo";
  std::size_t budget = 15;
  std::size_t gap_episodes = 10;
  std::uint64_t seed = 0;
  std::string out;
};

struct EvalOptions {
  std::vector<std::string> policies;  // NAME=CHECKPOINT
  std::vector<std::string> rules;
  SpaceOptions space;
  std::size_t n = 200;
  std::string trace_dir;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_gen_traces(const GenTracesOptions& o, std::ostream& log);
void cmd_train(const TrainOptions& o, std::ostream& log);
void cmd_search(const SearchOptions& o, std::ostream& log);
void cmd_eval(const EvalOptions& o, std::ostream& log);
void cmd_report(const std::vector<std::string>& dirs, std::ostream& out);

}  // namespace genet::cli
