#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbrl/netsim.hpp"
#include "sbrl/shaping.hpp"
#include "sbrl/trainer.hpp"

namespace sbrl::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Baseline, Shaped };

const char* mode_name(Mode mode);          ///< "baseline" or "shaped"
Mode mode_from_name(std::string_view name);

enum class ScenarioKind { AvoidK, Dsl };

/// Which scenario model shaped runs train against. The (event, k) pair also
/// defines what the violation columns count, in both modes.
struct ScenarioSettings {
  ScenarioKind kind = ScenarioKind::AvoidK;
  int k = 3;
  std::string event = "IncreaseRate";
  std::vector<std::string> reset_events = {"DecreaseRate", "KeepRate"};
  std::string path;  ///< scenario file, used when kind == Dsl

  bool operator==(const ScenarioSettings&) const = default;
};

/// Full experiment description. Parsed from a flat key=value text where
/// dotted prefixes group the sections, e.g. `link.capacity = 10`.
struct ExperimentConfig {
  netsim::LinkConfig link;
  shaping::PenaltyConfig penalty;
  ScenarioSettings scenario;
  train::TrainerConfig training;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string output_dir = "out";
  std::size_t model_max_steps = kDefaultMaxSteps;  ///< engine step budget, not a config key

  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Canonical echo of every key. parse_config_text(render_config(c)) == c.
std::string render_config(const ExperimentConfig& cfg);

/// Instantiate the scenario model for shaped runs.
std::vector<ScenarioProgram> build_scenario_model(const ScenarioSettings& scenario);

struct TrainingRun {
  Mode mode = Mode::Baseline;
  std::uint64_t seed = 0;
  train::TrainLog log;
};

TrainingRun run_training(const ExperimentConfig& cfg, Mode mode, std::uint64_t seed);

struct SeedComparison {
  std::uint64_t seed = 0;
  double baseline_violation_frequency = 0.0;  ///< final-window violations per step
  double shaped_violation_frequency = 0.0;
  double baseline_candidate_mean = 0.0;  ///< final-window mean candidate reward
  double shaped_candidate_mean = 0.0;
  std::optional<int> baseline_convergence;
  std::optional<int> shaped_convergence;
};

/// Aggregated verdict of a baseline-vs-shaped experiment. The thresholds give
/// the comparison a CI-style exit code: reduction at least 10x on a nonzero
/// baseline, candidate-reward retention at least 70%, and shaped convergence
/// no earlier than baseline on at least four of five seeds (scaled up or down
/// with the seed count).
struct CompareReport {
  std::vector<SeedComparison> seeds;

  double baseline_violation_frequency = 0.0;  ///< means across seeds
  double shaped_violation_frequency = 0.0;
  double reduction_ratio = 0.0;  ///< +inf when the shaped frequency is zero
  double baseline_candidate_mean = 0.0;
  double shaped_candidate_mean = 0.0;
  double retention = 0.0;  ///< shaped_candidate_mean / baseline_candidate_mean

  int slower_convergence_seeds = 0;
  int required_slower_seeds = 0;

  bool insufficient_data = false;  ///< fewer episodes than the averaging window
  bool shaped_not_converged = false;
  bool thresholds_met = false;

  int exit_code() const;  ///< 0 met, 2 unmet or shaped never converged, 3 insufficient data
};

CompareReport compare_runs(const std::vector<TrainingRun>& baseline,
                           const std::vector<TrainingRun>& shaped,
                           const ExperimentConfig& cfg);

void write_compare_csv(std::ostream& out, const CompareReport& report);

/// Train one mode across all configured seeds; writes `<mode>_seed<N>.csv`
/// per seed plus `summary.csv` and `config_echo.cfg` under the output
/// directory. Returns the process exit code.
int cmd_train(const ExperimentConfig& cfg, Mode mode, std::ostream& out, std::ostream& err);

/// Both modes across all seeds, per-seed log CSVs, `compare.csv`, and a
/// threshold verdict as the exit code.
int cmd_compare(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

/// Train, then run greedy episodes without exploration; writes
/// `eval_<mode>_seed<N>.csv` per seed.
int cmd_eval(const ExperimentConfig& cfg, Mode mode, std::ostream& out, std::ostream& err);

/// Load scenario files, inject the given events one at a time, and print every
/// event the model triggers, one name per line. Returns the process exit code.
int cmd_run_model(const std::vector<std::string>& model_files,
                  const std::vector<std::string>& injected_events, const SelectionPolicy& policy,
                  std::uint64_t seed, std::size_t max_steps, std::ostream& out, std::ostream& err);

}  // namespace sbrl::cli
