#include "genet/cli/cli.hpp"

#include <CLI11.hpp>

#include <ostream>

#include "commands.hpp"
#include "genet/common/parallel.hpp"

namespace genet::cli {

namespace {

void add_space_flags(CLI::App* cmd, SpaceOptions& s, bool need_use_case) {
  auto* u = cmd->add_option("--use-case", s.use_case, "abr, cc or lb");
  if (need_use_case) u->required();
  cmd->add_option("--preset", s.preset, "parameter box: RL1, RL2 or RL3")->capture_default_str();
  cmd->add_option("--space", s.space_file, "env-space JSON file (overrides --preset)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"genet: curriculum training for network adaptation policies"};
  app.require_subcommand(1);
  std::size_t jobs = default_jobs();
  app.add_option("--jobs", jobs, "worker threads; results do not depend on this")->capture_default_str();

  GenTracesOptions gen;
  auto* g = app.add_subcommand("gen-traces", "write synthetic traces and a manifest");
  add_space_flags(g, gen.space, true);
  g->add_option("--env-config", gen.env_config, "configuration file used for every trace");
  g->add_flag("--sample", gen.sample, "draw a configuration per trace from the box");
  g->add_option("--count", gen.count, "number of traces")->capture_default_str();
  g->add_option("--out", gen.out, "output directory")->required();
  g->add_option("--seed", gen.seed)->capture_default_str();

  TrainOptions train;
  auto* t = app.add_subcommand("train", "train a policy from a run configuration");
  t->add_option("config", train.config, "run configuration JSON")->required();
  t->add_option("--seed", train.seed, "overrides the configuration seed");
  t->add_option("--out", train.out, "overrides output_dir");
  t->add_flag("--resume", train.resume, "continue from the checkpoint in the output directory");

  SearchOptions search;
  auto* s = app.add_subcommand("search", "find configurations where a policy trails a baseline");
  s->add_option("--checkpoint", search.checkpoint)->required();
  add_space_flags(s, search.space, false);
  s->add_option("--baseline", search.baseline, "rule-based policy (default: the use case's first)");
  s->add_option("--method", search.method, "bo, random or grid")->capture_default_str();
  s->add_option("--budget", search.budget, "number of trials")->capture_default_str();
  s->add_option("--gap-episodes", search.gap_episodes, "environments per gap estimate")->capture_default_str();
  s->add_option("--seed", search.seed)->capture_default_str();
  s->add_option("--out", search.out, "output directory")->required();

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "compare policies on paired test environments");
  e->add_option("--policy", ev.policies, "NAME=CHECKPOINT (repeatable)");
  e->add_option("--rule", ev.rules, "rule-based policy name (repeatable)");
  add_space_flags(e, ev.space, false);
  e->add_option("--n", ev.n, "synthetic test environments")->capture_default_str();
  e->add_option("--trace-dir", ev.trace_dir, "evaluate once per trace file instead");
  e->add_option("--seed", ev.seed)->capture_default_str();
  e->add_option("--out", ev.out, "output directory")->required();

  std::vector<std::string> report_dirs;
  auto* r = app.add_subcommand("report", "summarize run, search and eval directories");
  r->add_option("dirs", report_dirs, "directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << "error: " << ex.what() << '\n' << sub->help();
    return kExitUsage;
  }

  try {
    if (jobs == 0) throw UsageError("--jobs must be at least 1");
    set_global_jobs(jobs);
    if (g->parsed()) cmd_gen_traces(gen, out);
    else if (t->parsed()) cmd_train(train, out);
    else if (s->parsed()) cmd_search(search, out);
    else if (e->parsed()) cmd_eval(ev, out);
    else if (r->parsed()) cmd_report(report_dirs, out);
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace genet::cli
