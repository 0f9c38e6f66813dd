#include "sbrl/cli_app.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>

#include "CLI11.hpp"
#include "sbrl/engine.hpp"
#include "sbrl/experiment.hpp"

namespace sbrl::cli {

namespace {

SelectionPolicy policy_from_name(const std::string& name) {
  if (name == "first") return SelectionPolicy::first_enabled();
  if (name == "random") return SelectionPolicy::seeded_random();
  // Priority weights have no command-line syntax; unlisted events rank 0,
  // so this falls back to registration order among the top-ranked.
  return SelectionPolicy::priority({});
}

// Step budget precedence: --max-steps flag, then SBRL_MAX_STEPS, then default.
std::size_t resolve_max_steps(const std::optional<std::size_t>& flag_value, std::ostream& err,
                              bool& ok) {
  ok = true;
  if (flag_value) return *flag_value;
  const char* env = std::getenv("SBRL_MAX_STEPS");
  if (!env || *env == '\0') return kDefaultMaxSteps;
  std::size_t parsed = 0;
  const char* last = env + std::string_view(env).size();
  const auto result = std::from_chars(env, last, parsed);
  if (result.ec != std::errc{} || result.ptr != last || parsed == 0) {
    err << "error: SBRL_MAX_STEPS must be a positive integer, got '" << env << "'\n";
    ok = false;
    return kDefaultMaxSteps;
  }
  return parsed;
}

struct ExperimentArgs {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config_path, "experiment config file (key = value lines)");
    cmd.add_option("--seed", seeds, "training seed, repeatable; overrides training.seeds");
    cmd.add_option("--out", out_dir, "output directory; overrides output.dir");
  }

  ExperimentConfig resolve(std::size_t max_steps) const {
    ExperimentConfig cfg =
        config_path.empty() ? ExperimentConfig{} : load_config_file(config_path);
    if (!seeds.empty()) cfg.seeds = seeds;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    cfg.model_max_steps = max_steps;
    return cfg;
  }
};

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"scenario-model guided reinforcement learning toolkit"};
  app.require_subcommand(1);

  std::optional<std::size_t> max_steps_flag;
  app.add_option("--max-steps", max_steps_flag,
                 "engine step budget per run-to-completion (overrides SBRL_MAX_STEPS)")
      ->check(CLI::PositiveNumber);

  auto* run_model =
      app.add_subcommand("run-model", "execute scenario files and print triggered events");
  std::vector<std::string> model_files;
  std::vector<std::string> injected;
  std::string policy_name = "first";
  std::uint64_t model_seed = 0;
  run_model->add_option("files", model_files, "scenario files");
  run_model->add_option("--inject", injected,
                        "event injected once the model is quiescent, repeatable, in order");
  run_model->add_option("--policy", policy_name, "event selection policy")
      ->check(CLI::IsMember({"first", "random", "priority"}));
  run_model->add_option("--seed", model_seed, "seed for the random selection policy");

  auto* train_cmd = app.add_subcommand("train", "train one agent per seed and write CSV logs");
  ExperimentArgs train_args;
  std::string train_mode = "shaped";
  train_args.attach(*train_cmd);
  train_cmd->add_option("--mode", train_mode, "baseline or shaped")
      ->check(CLI::IsMember({"baseline", "shaped"}));

  auto* compare_cmd =
      app.add_subcommand("compare", "train both modes and verdict the comparison thresholds");
  ExperimentArgs compare_args;
  compare_args.attach(*compare_cmd);

  auto* eval_cmd =
      app.add_subcommand("eval", "train, then run the greedy policy without exploration");
  ExperimentArgs eval_args;
  std::string eval_mode = "shaped";
  eval_args.attach(*eval_cmd);
  eval_cmd->add_option("--mode", eval_mode, "baseline or shaped")
      ->check(CLI::IsMember({"baseline", "shaped"}));

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  bool max_steps_ok = true;
  const std::size_t max_steps = resolve_max_steps(max_steps_flag, err, max_steps_ok);
  if (!max_steps_ok) return 1;

  try {
    if (run_model->parsed())
      return cmd_run_model(model_files, injected, policy_from_name(policy_name), model_seed,
                           max_steps, out, err);
    if (train_cmd->parsed())
      return cmd_train(train_args.resolve(max_steps), mode_from_name(train_mode), out, err);
    if (compare_cmd->parsed()) return cmd_compare(compare_args.resolve(max_steps), out, err);
    if (eval_cmd->parsed())
      return cmd_eval(eval_args.resolve(max_steps), mode_from_name(eval_mode), out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand selected\n";
  return 1;
}

}  // namespace sbrl::cli
