#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "sbrl/engine.hpp"
#include "sbrl/netsim.hpp"
#include "sbrl/shaping.hpp"

namespace sbrl::train {

class InvalidTrainerConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Linear exploration decay over global environment steps.
class EpsilonSchedule {
 public:
  EpsilonSchedule(double start, double end, std::uint64_t decay_steps);
  double value(std::uint64_t global_step) const;

 private:
  double start_;
  double end_;
  std::uint64_t decay_steps_;
};

/// Maps a continuous observation onto a flat cell index via per-dimension
/// interior cut points. Values outside the nominal range land in the edge bins.
class Discretizer {
 public:
  Discretizer(std::vector<double> throughput_cuts, std::vector<double> latency_cuts,
              std::vector<double> loss_cuts);

  /// Evenly spaced bins over the value ranges reachable under `cfg`:
  /// throughput ratio in [0, max_rate/capacity], latency ratio in
  /// [1, 1 + queue_capacity/(capacity*base_latency)], loss rate in [0, 1].
  static Discretizer uniform_for(const netsim::LinkConfig& cfg, int throughput_bins,
                                 int latency_bins, int loss_bins);

  int index_of(const netsim::Observation& obs) const;
  int cell_count() const;

 private:
  std::array<std::vector<double>, 3> cuts_;
};

class QTable {
 public:
  QTable(int state_count, int action_count);  ///< zero-initialized

  double value(int state, int action) const;
  double max_value(int state) const;
  int best_action(int state) const;  ///< ties resolve to the lowest action id
  void update(int state, int action, double target, double learning_rate);

  int state_count() const { return state_count_; }
  int action_count() const { return action_count_; }

 private:
  std::size_t cell(int state, int action) const;
  int state_count_;
  int action_count_;
  std::vector<double> q_;
};

struct EpisodeRecord {
  int episode = 0;
  double total_reward = 0.0;            ///< shaped reward summed over the episode
  double total_candidate_reward = 0.0;  ///< unshaped environment reward
  int violations = 0;
  int blocked = 0;
  int steps = 0;
};

struct TrainLog {
  std::vector<EpisodeRecord> episodes;  ///< indices contiguous from 0
  std::uint64_t seed = 0;
  std::string config_echo;

  static const char* csv_header();  ///< episode,total_reward,total_candidate_reward,violations,blocked,steps
  void write_csv(std::ostream& out) const;
};

struct TrainerConfig {
  double learning_rate = 0.1;
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.5;  ///< fraction of total steps spent decaying
  int episodes = 2000;
  int throughput_bins = 8;
  int latency_bins = 8;
  int loss_bins = 4;
  int window = 20;                      ///< episodes averaged for summary statistics
  double convergence_fraction = 0.9;    ///< of the reference level, see convergence_episode
  int violation_action = 0;             ///< action id audited by the violation count
  int violation_k = 3;                  ///< run length that counts as a violation

  void validate() const;

  bool operator==(const TrainerConfig&) const = default;
};

/// Scenario model attached to a training run. An empty program list trains
/// against the bare environment.
struct ModelBinding {
  std::vector<ScenarioProgram> programs;
  shaping::PenaltyConfig penalty{};
  SelectionPolicy policy = SelectionPolicy::first_enabled();
  std::uint64_t model_seed = 0;
  std::size_t model_max_steps = kDefaultMaxSteps;
};

struct TrainResult {
  TrainLog log;
  QTable q;
  Discretizer discretizer;
};

/// Action ids of the congestion environment, in id order.
shaping::ActionMap congestion_action_map();

double discounted_return(const std::vector<double>& rewards, double gamma);

/// Number of indices t such that the k actions ending at t all equal `watched`.
int count_violations(const std::vector<int>& actions, int watched, int k);

/// Tabular Q-learning over the discretized observations. Deterministic for a
/// fixed (config, seed) pair. The update bootstraps through the episode time
/// limit, which is a horizon cut rather than a terminal state.
TrainResult train(const netsim::LinkConfig& link, const TrainerConfig& cfg,
                  const ModelBinding& binding, std::uint64_t seed);

/// Greedy episodes with learning and exploration turned off, logged like train.
TrainLog evaluate_greedy(const netsim::LinkConfig& link, const TrainerConfig& cfg,
                         const QTable& q, const Discretizer& disc, const ModelBinding& binding,
                         int episodes);

/// First episode whose trailing `window` episodes average at least `threshold`
/// total candidate reward.
std::optional<int> convergence_episode(const TrainLog& log, double threshold, int window);

/// Mean over the last `window` episodes; empty when fewer episodes exist.
std::optional<double> final_window_mean_reward(const TrainLog& log, int window);
std::optional<double> final_window_mean_candidate(const TrainLog& log, int window);

/// Violations per step over the last `window` episodes; empty when fewer exist.
std::optional<double> final_window_violation_frequency(const TrainLog& log, int window);

}  // namespace sbrl::train
