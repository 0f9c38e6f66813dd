#include "sbrl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "sbrl/rng.hpp"

namespace sbrl::train {

EpsilonSchedule::EpsilonSchedule(double start, double end, std::uint64_t decay_steps)
    : start_(start), end_(end), decay_steps_(decay_steps) {
  if (decay_steps == 0)
    throw InvalidTrainerConfigError("EpsilonSchedule: decay_steps must be positive");
}

double EpsilonSchedule::value(std::uint64_t global_step) const {
  const double progress =
      std::min(1.0, static_cast<double>(global_step) / static_cast<double>(decay_steps_));
  return start_ + (end_ - start_) * progress;
}

namespace {

int bin_of(const std::vector<double>& cuts, double value) {
  const auto it = std::upper_bound(cuts.begin(), cuts.end(), value);
  return static_cast<int>(it - cuts.begin());
}

std::vector<double> even_cuts(double lo, double hi, int bins) {
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(bins - 1));
  for (int i = 1; i < bins; ++i)
    cuts.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins));
  return cuts;
}

}  // namespace

Discretizer::Discretizer(std::vector<double> throughput_cuts, std::vector<double> latency_cuts,
                         std::vector<double> loss_cuts)
    : cuts_{std::move(throughput_cuts), std::move(latency_cuts), std::move(loss_cuts)} {
  for (const auto& cuts : cuts_)
    if (!std::is_sorted(cuts.begin(), cuts.end()))
      throw InvalidTrainerConfigError("Discretizer: cut points must be sorted");
}

Discretizer Discretizer::uniform_for(const netsim::LinkConfig& cfg, int throughput_bins,
                                     int latency_bins, int loss_bins) {
  for (int bins : {throughput_bins, latency_bins, loss_bins})
    if (bins < 1) throw InvalidTrainerConfigError("Discretizer: bin counts must be at least 1");
  const double latency_hi = 1.0 + cfg.queue_capacity / (cfg.capacity * cfg.base_latency);
  return Discretizer(even_cuts(0.0, cfg.max_rate / cfg.capacity, throughput_bins),
                     even_cuts(1.0, latency_hi, latency_bins), even_cuts(0.0, 1.0, loss_bins));
}

int Discretizer::index_of(const netsim::Observation& obs) const {
  const int b0 = bin_of(cuts_[0], obs.throughput_ratio);
  const int b1 = bin_of(cuts_[1], obs.latency_ratio);
  const int b2 = bin_of(cuts_[2], obs.loss_rate);
  const int n1 = static_cast<int>(cuts_[1].size()) + 1;
  const int n2 = static_cast<int>(cuts_[2].size()) + 1;
  return (b0 * n1 + b1) * n2 + b2;
}

int Discretizer::cell_count() const {
  int count = 1;
  for (const auto& cuts : cuts_) count *= static_cast<int>(cuts.size()) + 1;
  return count;
}

QTable::QTable(int state_count, int action_count)
    : state_count_(state_count), action_count_(action_count) {
  if (state_count < 1 || action_count < 1)
    throw InvalidTrainerConfigError("QTable: state and action counts must be positive");
  q_.assign(static_cast<std::size_t>(state_count) * static_cast<std::size_t>(action_count), 0.0);
}

std::size_t QTable::cell(int state, int action) const {
  if (state < 0 || state >= state_count_ || action < 0 || action >= action_count_)
    throw std::out_of_range("QTable: cell (" + std::to_string(state) + ", " +
                            std::to_string(action) + ") outside table");
  return static_cast<std::size_t>(state) * static_cast<std::size_t>(action_count_) +
         static_cast<std::size_t>(action);
}

double QTable::value(int state, int action) const { return q_[cell(state, action)]; }

double QTable::max_value(int state) const {
  double best = value(state, 0);
  for (int a = 1; a < action_count_; ++a) best = std::max(best, value(state, a));
  return best;
}

int QTable::best_action(int state) const {
  int best = 0;
  for (int a = 1; a < action_count_; ++a)
    if (value(state, a) > value(state, best)) best = a;
  return best;
}

void QTable::update(int state, int action, double target, double learning_rate) {
  double& q = q_[cell(state, action)];
  q += learning_rate * (target - q);
}

const char* TrainLog::csv_header() {
  return "episode,total_reward,total_candidate_reward,violations,blocked,steps";
}

void TrainLog::write_csv(std::ostream& out) const {
  out << csv_header() << "\n";
  char buf[64];
  for (const auto& rec : episodes) {
    out << rec.episode << ',';
    std::snprintf(buf, sizeof buf, "%.6f", rec.total_reward);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.6f", rec.total_candidate_reward);
    out << buf << ',' << rec.violations << ',' << rec.blocked << ',' << rec.steps << "\n";
  }
}

void TrainerConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw InvalidTrainerConfigError("TrainerConfig: " + what);
  };
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) fail("learning_rate must be in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must be in [0, 1]");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) fail("epsilon_start must be in [0, 1]");
  if (!(epsilon_end >= 0.0 && epsilon_end <= epsilon_start))
    fail("epsilon_end must be in [0, epsilon_start]");
  if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0))
    fail("epsilon_decay_fraction must be in (0, 1]");
  if (episodes < 1) fail("episodes must be positive");
  if (throughput_bins < 1 || latency_bins < 1 || loss_bins < 1)
    fail("bin counts must be positive");
  if (window < 1) fail("window must be positive");
  if (!(convergence_fraction > 0.0 && convergence_fraction <= 1.0))
    fail("convergence_fraction must be in (0, 1]");
  if (violation_action < 0 || violation_action >= netsim::kActionCount)
    fail("violation_action must name a valid action id");
  if (violation_k < 2) fail("violation_k must be at least 2");
}

shaping::ActionMap congestion_action_map() {
  std::vector<std::string> names;
  for (int id = 0; id < netsim::kActionCount; ++id)
    names.push_back(netsim::action_name(netsim::action_from_id(id)));
  return shaping::ActionMap(std::move(names));
}

double discounted_return(const std::vector<double>& rewards, double gamma) {
  double acc = 0.0;
  for (auto it = rewards.rbegin(); it != rewards.rend(); ++it) acc = *it + gamma * acc;
  return acc;
}

int count_violations(const std::vector<int>& actions, int watched, int k) {
  if (k < 1) throw std::invalid_argument("count_violations: k must be positive");
  int run = 0;
  int count = 0;
  for (int a : actions) {
    run = (a == watched) ? run + 1 : 0;
    if (run >= k) ++count;
  }
  return count;
}

namespace {

using ShapedNetSim = shaping::ShapedEnv<netsim::NetSimEnv>;

ShapedNetSim make_env(const netsim::LinkConfig& link, const ModelBinding& binding) {
  return ShapedNetSim(netsim::NetSimEnv(link), binding.programs, congestion_action_map(),
                      binding.penalty, binding.policy, binding.model_seed,
                      binding.model_max_steps);
}

struct EpisodeTally {
  double reward = 0.0;
  double candidate = 0.0;
  int blocked = 0;
  std::vector<int> actions;
};

EpisodeRecord to_record(int episode, const EpisodeTally& tally, const TrainerConfig& cfg) {
  EpisodeRecord rec;
  rec.episode = episode;
  rec.total_reward = tally.reward;
  rec.total_candidate_reward = tally.candidate;
  rec.violations = count_violations(tally.actions, cfg.violation_action, cfg.violation_k);
  rec.blocked = tally.blocked;
  rec.steps = static_cast<int>(tally.actions.size());
  return rec;
}

}  // namespace

TrainResult train(const netsim::LinkConfig& link, const TrainerConfig& cfg,
                  const ModelBinding& binding, std::uint64_t seed) {
  link.validate();
  cfg.validate();
  binding.penalty.validate();

  ShapedNetSim env = make_env(link, binding);
  Discretizer disc =
      Discretizer::uniform_for(link, cfg.throughput_bins, cfg.latency_bins, cfg.loss_bins);
  QTable q(disc.cell_count(), netsim::kActionCount);

  const std::uint64_t total_steps = static_cast<std::uint64_t>(cfg.episodes) *
                                    static_cast<std::uint64_t>(link.episode_length);
  const std::uint64_t decay_steps = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(cfg.epsilon_decay_fraction * static_cast<double>(total_steps)));
  const EpsilonSchedule schedule(cfg.epsilon_start, cfg.epsilon_end, decay_steps);

  std::mt19937_64 rng(seed);
  TrainLog log;
  log.seed = seed;
  log.episodes.reserve(static_cast<std::size_t>(cfg.episodes));
  std::uint64_t global_step = 0;

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    int state = disc.index_of(env.reset());
    EpisodeTally tally;
    tally.actions.reserve(static_cast<std::size_t>(link.episode_length));

    bool done = false;
    while (!done) {
      const double epsilon = schedule.value(global_step);
      int action;
      if (uniform_real01(rng) < epsilon)
        action = static_cast<int>(uniform_below(rng, netsim::kActionCount));
      else
        action = q.best_action(state);

      const auto result = env.step(action);
      const int next_state = disc.index_of(result.observation);
      q.update(state, action, result.reward + cfg.gamma * q.max_value(next_state),
               cfg.learning_rate);

      tally.reward += result.reward;
      tally.candidate += result.candidate_reward;
      tally.blocked += result.blocked ? 1 : 0;
      tally.actions.push_back(action);

      state = next_state;
      done = result.done;
      ++global_step;
    }
    log.episodes.push_back(to_record(episode, tally, cfg));
  }

  return TrainResult{std::move(log), std::move(q), std::move(disc)};
}

TrainLog evaluate_greedy(const netsim::LinkConfig& link, const TrainerConfig& cfg,
                         const QTable& q, const Discretizer& disc, const ModelBinding& binding,
                         int episodes) {
  if (episodes < 1) throw InvalidTrainerConfigError("evaluate_greedy: episodes must be positive");
  ShapedNetSim env = make_env(link, binding);
  TrainLog log;
  for (int episode = 0; episode < episodes; ++episode) {
    int state = disc.index_of(env.reset());
    EpisodeTally tally;
    bool done = false;
    while (!done) {
      const int action = q.best_action(state);
      const auto result = env.step(action);
      tally.reward += result.reward;
      tally.candidate += result.candidate_reward;
      tally.blocked += result.blocked ? 1 : 0;
      tally.actions.push_back(action);
      state = disc.index_of(result.observation);
      done = result.done;
    }
    log.episodes.push_back(to_record(episode, tally, cfg));
  }
  return log;
}

std::optional<int> convergence_episode(const TrainLog& log, double threshold, int window) {
  if (window < 1) throw std::invalid_argument("convergence_episode: window must be positive");
  const auto& eps = log.episodes;
  if (static_cast<int>(eps.size()) < window) return std::nullopt;
  double sum = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    sum += eps[i].total_candidate_reward;
    if (i >= static_cast<std::size_t>(window))
      sum -= eps[i - static_cast<std::size_t>(window)].total_candidate_reward;
    if (i + 1 >= static_cast<std::size_t>(window) &&
        sum / static_cast<double>(window) >= threshold)
      return eps[i].episode;
  }
  return std::nullopt;
}

namespace {

std::optional<double> final_window_mean(const TrainLog& log, int window,
                                        double (*field)(const EpisodeRecord&)) {
  if (window < 1 || static_cast<int>(log.episodes.size()) < window) return std::nullopt;
  double sum = 0.0;
  for (std::size_t i = log.episodes.size() - static_cast<std::size_t>(window);
       i < log.episodes.size(); ++i)
    sum += field(log.episodes[i]);
  return sum / static_cast<double>(window);
}

}  // namespace

std::optional<double> final_window_mean_reward(const TrainLog& log, int window) {
  return final_window_mean(log, window, [](const EpisodeRecord& r) { return r.total_reward; });
}

std::optional<double> final_window_mean_candidate(const TrainLog& log, int window) {
  return final_window_mean(
      log, window, [](const EpisodeRecord& r) { return r.total_candidate_reward; });
}

std::optional<double> final_window_violation_frequency(const TrainLog& log, int window) {
  if (window < 1 || static_cast<int>(log.episodes.size()) < window) return std::nullopt;
  long long violations = 0;
  long long steps = 0;
  for (std::size_t i = log.episodes.size() - static_cast<std::size_t>(window);
       i < log.episodes.size(); ++i) {
    violations += log.episodes[i].violations;
    steps += log.episodes[i].steps;
  }
  if (steps == 0) return 0.0;
  return static_cast<double>(violations) / static_cast<double>(steps);
}

}  // namespace sbrl::train
