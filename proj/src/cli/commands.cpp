#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "genet/cli/cli.hpp"
#include "genet/common/rng.hpp"
#include "genet/envspace/generators.hpp"
#include "genet/eval/eval.hpp"
#include "genet/policy/snapshot.hpp"
#include "genet/tasks/tasks.hpp"

namespace genet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Seed streams split from the single --seed of a command.
constexpr std::uint64_t kTraceStream = 0x7e;
constexpr std::uint64_t kSampleStream = 0xc0;
constexpr std::uint64_t kGapStream = 0x6a;
constexpr std::uint64_t kSearchStream = 0xb0;

// Writes through a temporary so an interrupted run never leaves a torn file.
void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    body(f);
    if (!f) throw std::runtime_error("write failed: " + path.string());
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) {
  write_file(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

void make_dir(const std::string& dir) {
  if (dir.empty()) throw UsageError("an output directory is required (--out)");
  fs::create_directories(dir);
}

json values_json(const EnvConfig& cfg, const EnvSpace& space) {
  json v = json::object();
  for (std::size_t i = 0; i < space.dims(); ++i) v[space.param(i).name] = cfg.values[i];
  return v;
}

EnvSpace resolve_space(const SpaceOptions& o, std::optional<UseCase> known) {
  if (!o.space_file.empty()) {
    auto space = load_space_file(o.space_file);
    if (known && *known != space.use_case()) throw UsageError("--space use case does not match");
    return space;
  }
  if (!known && o.use_case.empty()) throw UsageError("--use-case is required");
  const UseCase u = o.use_case.empty() ? *known : parse_use_case(o.use_case);
  if (known && *known != u) throw UsageError("--use-case does not match the checkpoint");
  return preset_space(u, parse_preset(o.preset));
}

policy::PolicySnapshot load_policy(const std::string& path, const policy::Task& task) {
  auto snap = policy::load_checkpoint(path);
  if (snap.use_case != task.use_case)
    throw UsageError(path + ": checkpoint is for " + std::string(to_string(snap.use_case)) + ", expected " +
                     std::string(to_string(task.use_case)));
  if (!(snap.arch == task.architecture())) throw UsageError(path + ": network shape does not match the " + task.name + " task");
  return snap;
}

std::string round_file(std::size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "round_%02zu.json", r);
  return buf;
}

}  // namespace

void cmd_gen_traces(const GenTracesOptions& o, std::ostream& log) {
  const EnvSpace space = resolve_space(o.space, std::nullopt);
  if (o.sample && !o.env_config.empty()) throw UsageError("--sample and --env-config are mutually exclusive");
  EnvConfig fixed = space.defaults();
  if (!o.env_config.empty()) {
    fixed = load_point_config(o.env_config);
    if (fixed.use_case != space.use_case()) throw UsageError("--env-config use case does not match");
  }
  make_dir(o.out);
  const ConfigDistribution dist(space);
  json entries = json::array();
  for (std::size_t i = 0; i < o.count; ++i) {
    EnvConfig cfg = fixed;
    if (o.sample) {
      Rng pick(derive_seed(o.seed, {kSampleStream, i}));
      cfg = dist.sample_base(pick);
    }
    const std::uint64_t seed = derive_seed(o.seed, {kTraceStream, i});
    Rng rng(seed);
    char name[32];
    std::snprintf(name, sizeof name, "trace_%04zu.txt", i);
    const fs::path path = fs::path(o.out) / name;
    switch (space.use_case()) {
      case UseCase::kAbr: {
        const auto t = gen_abr_trace(cfg, rng);
        write_file(path, [&](std::ostream& f) { write_bandwidth_trace(f, t); });
        break;
      }
      case UseCase::kCc: {
        const auto t = gen_cc_trace(cfg, rng);
        write_file(path, [&](std::ostream& f) { write_bandwidth_trace(f, t.bandwidth); });
        break;
      }
      case UseCase::kLb: {
        const auto t = gen_lb_trace(cfg, rng);
        write_file(path, [&](std::ostream& f) { write_job_trace(f, t); });
        break;
      }
    }
    entries.push_back({{"file", name}, {"seed", seed}, {"values", values_json(cfg, space)}});
  }
  json m;
  m["schema_version"] = kSchemaVersion;
  m["kind"] = "trace_manifest";
  m["use_case"] = std::string(to_string(space.use_case()));
  m["seed"] = o.seed;
  m["count"] = o.count;
  m["sampled"] = o.sample;
  m["space"] = to_json(space);
  m["traces"] = std::move(entries);
  write_json(fs::path(o.out) / "manifest.json", m);
  log << "wrote " << o.count << " traces to " << o.out << '\n';
}

void cmd_train(const TrainOptions& o, std::ostream& log) {
  RunConfig rc = load_run_config(o.config);
  if (o.seed) rc.seed = *o.seed;
  if (!o.out.empty()) rc.output_dir = o.out;
  const EnvSpace space = training_space(rc);

  tasks::TraceMix mix;
  if (!rc.trace_dir.empty()) {
    mix.corpus = std::make_shared<const TraceCorpus>(TraceCorpus::load_directory(rc.trace_dir));
    mix.weight = rc.trace_weight;
  }
  const auto task = tasks::task_for(rc.use_case, mix);
  policy::PolicySnapshot theta0 =
      rc.init_checkpoint.empty() ? task.init_policy(rc.seed) : load_policy(rc.init_checkpoint, task);

  curriculum::CurriculumSpec cs = rc.curriculum;
  cs.train = rc.train;
  cs.train.seed = rc.seed;
  cs.rule = rc.baseline;
  if (rc.mode == curriculum::Mode::kUniform) {
    cs.uniform_iterations = rc.train.iterations;
    if (rc.train.iterations == 0) cs.rounds = 0;
    if (cs.iters_per_round == 0) cs.iters_per_round = rc.train.iterations;
  }

  make_dir(rc.output_dir);
  const fs::path dir(rc.output_dir);
  const fs::path promoted = dir / "promoted";
  fs::create_directories(promoted);

  if (o.resume) {
    if (!fs::exists(dir / "checkpoint.bin") || !fs::exists(dir / "curriculum.json"))
      throw UsageError("--resume: no checkpoint.bin and curriculum.json in " + rc.output_dir);
    auto snap = load_policy((dir / "checkpoint.bin").string(), task);
    cs.resume = std::make_shared<const curriculum::CurriculumResult>(
        curriculum::curriculum_from_json(read_json_file((dir / "curriculum.json").string()), space, std::move(snap)));
    log << "resuming at iteration " << cs.resume->snapshot.iteration << '\n';
  }

  const auto persist = [&](const curriculum::CurriculumResult& r) {
    write_file(dir / "checkpoint.bin", [&](std::ostream& f) { policy::write_checkpoint(f, r.snapshot); });
    write_file(dir / "curve.csv", [&](std::ostream& f) { policy::write_curve(f, r.curve); });
    for (const auto& round : r.rounds) {
      const fs::path p = promoted / round_file(round.round);
      if (!fs::exists(p)) write_json(p, to_json(round.selected, space));
    }
    write_json(dir / "curriculum.json", curriculum::to_json(r, space));
  };
  cs.on_round = [&](const curriculum::CurriculumResult& r) {
    persist(r);
    log << "iteration " << r.snapshot.iteration;
    if (!r.curve.empty()) log << " mean reward " << format_double(r.curve.back().mean_reward);
    log << '\n';
  };
  write_json(dir / "run_config.json", to_json(rc));
  const auto result = curriculum::train_with_mode(rc.mode, space, task, std::move(theta0), cs);
  persist(result);
  log << "trained " << result.curve.size() << " iterations (" << curriculum::to_string(rc.mode) << "), output in "
      << rc.output_dir << '\n';
}

void cmd_search(const SearchOptions& o, std::ostream& log) {
  const auto snap = policy::load_checkpoint(o.checkpoint);
  const EnvSpace space = resolve_space(o.space, snap.use_case);
  const auto task = tasks::task_for(space.use_case());
  load_policy(o.checkpoint, task);
  const auto method = curriculum::parse_search_method(o.method);
  if (o.budget == 0) throw UsageError("--budget must be at least 1");
  if (o.gap_episodes == 0) throw UsageError("--gap-episodes must be at least 1");
  const auto rule = task.rule(o.baseline.empty() ? task.default_rule : o.baseline);
  const auto rl = policy::rl_reward_fn(task, snap);
  const std::uint64_t gap_seed = derive_seed(o.seed, {kGapStream});
  const std::size_t k = o.gap_episodes;
  const curriculum::GapOracle oracle = [&](const EnvConfig& p) { return curriculum::calc_baseline_gap(p, rl, rule, k, gap_seed); };
  const auto res = curriculum::run_search(method, space, oracle, o.budget, derive_seed(o.seed, {kSearchStream}));

  make_dir(o.out);
  const fs::path dir(o.out);
  write_json(dir / "best_config.json", to_json(res.best, space));
  write_file(dir / "trials.csv", [&](std::ostream& f) {
    f << "trial";
    for (const auto& p : space.params()) f << ',' << p.name;
    f << ",gap,std,k\n";
    for (std::size_t i = 0; i < res.trials.size(); ++i) {
      const auto& t = res.trials[i];
      f << i;
      for (double v : t.config.values) f << ',' << format_double(v);
      f << ',' << format_double(t.gap) << ',' << format_double(t.std) << ',' << t.k << '\n';
    }
  });
  log << res.trials.size() << " trials, best gap " << format_double(res.best_gap) << '\n';
}

void cmd_eval(const EvalOptions& o, std::ostream& log) {
  struct Entry {
    std::string name;
    std::string checkpoint;  // empty for a rule
  };
  std::vector<Entry> entries;
  std::set<std::string> names;
  std::optional<UseCase> known;
  for (const auto& spec : o.policies) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) throw UsageError("--policy expects NAME=CHECKPOINT, got '" + spec + "'");
    entries.push_back({spec.substr(0, eq), spec.substr(eq + 1)});
    const auto u = policy::load_checkpoint(entries.back().checkpoint).use_case;
    if (known && *known != u) throw UsageError("checkpoints are for different use cases");
    known = u;
  }
  for (const auto& r : o.rules) entries.push_back({r, ""});
  if (entries.empty()) throw UsageError("nothing to evaluate: pass --policy or --rule");
  for (const auto& e : entries)
    if (!names.insert(e.name).second) throw UsageError("duplicate policy name '" + e.name + "'");

  const EnvSpace space = resolve_space(o.space, known);
  const auto base_task = tasks::task_for(space.use_case());
  std::vector<policy::PolicySnapshot> snaps(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].checkpoint.empty()) snaps[i] = load_policy(entries[i].checkpoint, base_task);
    else base_task.rule(entries[i].name);
  }
  const auto reward_fn = [&](const policy::Task& task, std::size_t i) {
    return entries[i].checkpoint.empty() ? task.rule(entries[i].name) : policy::rl_reward_fn(task, snaps[i]);
  };

  eval::ComparisonReport report;
  if (o.trace_dir.empty()) {
    if (o.n == 0) throw UsageError("--n must be at least 1");
    std::vector<eval::NamedPolicy> pols;
    for (std::size_t i = 0; i < entries.size(); ++i) pols.push_back({entries[i].name, reward_fn(base_task, i)});
    report = eval::asymptotic_eval(pols, ConfigDistribution(space), o.n, o.seed);
  } else {
    // One environment per file, replayed by every policy.
    const auto files = list_trace_files(o.trace_dir);
    if (files.empty()) throw UsageError("no trace files in " + o.trace_dir);
    const EnvConfig cfg = space.clamp(space.defaults());
    std::vector<std::string> labels, pnames;
    std::vector<std::vector<double>> rewards(entries.size());
    for (const auto& e : entries) pnames.push_back(e.name);
    for (std::size_t f = 0; f < files.size(); ++f) {
      tasks::TraceMix mix;
      if (space.use_case() == UseCase::kLb) mix.fixed_jobs = std::make_shared<const JobTrace>(load_job_trace(files[f]));
      else mix.fixed_bandwidth = std::make_shared<const BandwidthTrace>(load_bandwidth_trace(files[f]));
      const auto task = tasks::task_for(space.use_case(), mix);
      const std::uint64_t env_seed = policy::eval_env_seed(o.seed, f, 0);
      for (std::size_t i = 0; i < entries.size(); ++i) rewards[i].push_back(reward_fn(task, i)(cfg, env_seed));
      labels.push_back(fs::path(files[f]).filename().string());
    }
    report = eval::summarize(std::move(pnames), std::move(labels), std::move(rewards), o.seed);
  }

  make_dir(o.out);
  const fs::path dir(o.out);
  write_file(dir / "rewards.csv", [&](std::ostream& f) { eval::write_rewards_table(f, report); });
  write_file(dir / "summary.csv", [&](std::ostream& f) { eval::write_summary_table(f, report); });
  auto j = eval::to_json(report);
  j["use_case"] = std::string(to_string(space.use_case()));
  j["seed"] = o.seed;
  j["source"] = o.trace_dir.empty() ? json("synthetic") : json(o.trace_dir);
  write_json(dir / "report.json", j);
  for (const auto& s : report.summaries)
    log << s.name << " mean " << format_double(s.mean) << " ci [" << format_double(s.ci.lo) << ", "
        << format_double(s.ci.hi) << "]\n";
}

void cmd_report(const std::vector<std::string>& dirs, std::ostream& out) {
  if (dirs.empty()) throw UsageError("report: pass at least one run or eval directory");
  for (const auto& d : dirs) {
    const fs::path dir(d);
    bool any = false;
    if (fs::exists(dir / "curriculum.json")) {
      any = true;
      const auto j = read_json_file((dir / "curriculum.json").string());
      std::string mode = "?";
      if (fs::exists(dir / "run_config.json")) mode = read_json_file((dir / "run_config.json").string()).value("mode", "?");
      out << "run " << d << ": mode " << mode << ", " << j.at("iterations").get<std::uint64_t>() << " iterations\n";
      std::vector<double> last;
      const auto& rounds = j.at("rounds");
      for (const auto& r : rounds) {
        out << "  round " << r.at("round").get<std::size_t>() << " score " << format_double(r.at("score").get<double>())
            << " base weight " << format_double(r.at("base_weight_after").get<double>()) << '\n';
        for (const auto& row : r.at("curve")) last = {row.at("mean_reward").get<double>()};
      }
      if (j.contains("curve"))
        for (const auto& row : j.at("curve")) last = {row.at("mean_reward").get<double>()};
      if (!last.empty()) out << "  final training reward " << format_double(last[0]) << '\n';
    }
    if (fs::exists(dir / "report.json")) {
      any = true;
      const auto j = read_json_file((dir / "report.json").string());
      out << "eval " << d << ": " << j.at("environments").get<std::size_t>() << " environments\n";
      for (const auto& p : j.at("policies"))
        out << "  " << p.at("name").get<std::string>() << " mean " << format_double(p.at("mean").get<double>()) << " ci ["
            << format_double(p.at("ci_lo").get<double>()) << ", " << format_double(p.at("ci_hi").get<double>()) << "]\n";
      if (j.contains("pairwise"))
        for (const auto& p : j.at("pairwise"))
          out << "  " << p.at("a").get<std::string>() << " > " << p.at("b").get<std::string>() << " on "
              << format_double(p.at("fraction_better").get<double>()) << " of environments, mean diff "
              << format_double(p.at("mean_diff").get<double>()) << '\n';
    }
    if (fs::exists(dir / "best_config.json")) {
      any = true;
      const auto j = read_json_file((dir / "best_config.json").string());
      out << "search " << d << ": best config " << j.at("values").dump() << '\n';
    }
    if (!any) throw UsageError("report: " + d + " holds no run, eval or search output");
  }
}

}  // namespace genet::cli
