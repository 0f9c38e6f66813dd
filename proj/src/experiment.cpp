#include "sbrl/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sbrl/dsl.hpp"
#include "sbrl/engine.hpp"

namespace sbrl::cli {

namespace fs = std::filesystem;

const char* mode_name(Mode mode) { return mode == Mode::Baseline ? "baseline" : "shaped"; }

Mode mode_from_name(std::string_view name) {
  if (name == "baseline") return Mode::Baseline;
  if (name == "shaped") return Mode::Shaped;
  throw ConfigError("mode must be 'baseline' or 'shaped', got '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  link.validate();
  penalty.validate();
  training.validate();
  if (scenario.k < 2) throw ConfigError("scenario.k must be at least 2");
  if (scenario.event.empty()) throw ConfigError("scenario.event must not be empty");
  for (const auto& r : scenario.reset_events)
    if (r == scenario.event)
      throw ConfigError("scenario.reset_events must not contain scenario.event");
  if (scenario.kind == ScenarioKind::Dsl && scenario.path.empty())
    throw ConfigError("scenario.kind = dsl requires scenario.path");
  try {
    train::congestion_action_map().action_for(scenario.event);
  } catch (const shaping::UnknownActionError&) {
    throw ConfigError("scenario.event '" + scenario.event + "' is not an agent action");
  }
  if (seeds.empty()) throw ConfigError("training.seeds must list at least one seed");
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (std::size_t j = i + 1; j < seeds.size(); ++j)
      if (seeds[i] == seeds[j])
        throw ConfigError("training.seeds contains duplicate seed " + std::to_string(seeds[i]));
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  if (trim(value).empty()) return out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= value.size(); ++i) {
    if (i == value.size() || value[i] == ',') {
      out.push_back(trim(std::string_view(value).substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T parsed{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto result = std::from_chars(first, last, parsed);
  if (result.ec != std::errc{} || result.ptr != last)
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "'");
  return parsed;
}

std::string shortest(double v) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out;
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
               int line_no) {
  auto& link = cfg.link;
  auto& training = cfg.training;
  if (key == "link.capacity") link.capacity = parse_number<double>(key, value);
  else if (key == "link.base_latency") link.base_latency = parse_number<double>(key, value);
  else if (key == "link.queue_capacity") link.queue_capacity = parse_number<double>(key, value);
  else if (key == "link.delta_rate") link.delta_rate = parse_number<double>(key, value);
  else if (key == "link.min_rate") link.min_rate = parse_number<double>(key, value);
  else if (key == "link.max_rate") link.max_rate = parse_number<double>(key, value);
  else if (key == "link.episode_length") link.episode_length = parse_number<int>(key, value);
  else if (key == "link.reward_throughput") link.reward_throughput = parse_number<double>(key, value);
  else if (key == "link.reward_latency") link.reward_latency = parse_number<double>(key, value);
  else if (key == "link.reward_loss") link.reward_loss = parse_number<double>(key, value);
  else if (key == "link.rng_seed") link.rng_seed = parse_number<std::uint64_t>(key, value);
  else if (key == "penalty.alpha") cfg.penalty.alpha = parse_number<double>(key, value);
  else if (key == "penalty.delta") cfg.penalty.delta = parse_number<double>(key, value);
  else if (key == "scenario.kind") {
    if (value == "avoid_k") cfg.scenario.kind = ScenarioKind::AvoidK;
    else if (value == "dsl") cfg.scenario.kind = ScenarioKind::Dsl;
    else throw ConfigError("config key 'scenario.kind': expected avoid_k or dsl, got '" + value + "'");
  } else if (key == "scenario.k") cfg.scenario.k = parse_number<int>(key, value);
  else if (key == "scenario.event") cfg.scenario.event = value;
  else if (key == "scenario.reset_events") cfg.scenario.reset_events = split_list(value);
  else if (key == "scenario.path") cfg.scenario.path = value;
  else if (key == "training.episodes") training.episodes = parse_number<int>(key, value);
  else if (key == "training.seeds") {
    cfg.seeds.clear();
    for (const auto& item : split_list(value))
      cfg.seeds.push_back(parse_number<std::uint64_t>(key, item));
  } else if (key == "training.learning_rate") training.learning_rate = parse_number<double>(key, value);
  else if (key == "training.gamma") training.gamma = parse_number<double>(key, value);
  else if (key == "training.epsilon_start") training.epsilon_start = parse_number<double>(key, value);
  else if (key == "training.epsilon_end") training.epsilon_end = parse_number<double>(key, value);
  else if (key == "training.epsilon_decay_fraction")
    training.epsilon_decay_fraction = parse_number<double>(key, value);
  else if (key == "training.bins_throughput") training.throughput_bins = parse_number<int>(key, value);
  else if (key == "training.bins_latency") training.latency_bins = parse_number<int>(key, value);
  else if (key == "training.bins_loss") training.loss_bins = parse_number<int>(key, value);
  else if (key == "training.window") training.window = parse_number<int>(key, value);
  else if (key == "training.convergence_fraction")
    training.convergence_fraction = parse_number<double>(key, value);
  else if (key == "output.dir") cfg.output_dir = value;
  else
    throw ConfigError("unknown config key '" + key + "' on line " + std::to_string(line_no));
}

void derive_violation_audit(ExperimentConfig& cfg) {
  cfg.training.violation_k = cfg.scenario.k;
  try {
    cfg.training.violation_action =
        train::congestion_action_map().action_for(cfg.scenario.event);
  } catch (const shaping::UnknownActionError&) {
    // left at default; validate() reports the bad event name
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    apply_key(cfg, key, value, line_no);
  }
  derive_violation_audit(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  const auto& link = cfg.link;
  const auto& training = cfg.training;
  out << "link.capacity = " << shortest(link.capacity) << "\n";
  out << "link.base_latency = " << shortest(link.base_latency) << "\n";
  out << "link.queue_capacity = " << shortest(link.queue_capacity) << "\n";
  out << "link.delta_rate = " << shortest(link.delta_rate) << "\n";
  out << "link.min_rate = " << shortest(link.min_rate) << "\n";
  out << "link.max_rate = " << shortest(link.max_rate) << "\n";
  out << "link.episode_length = " << link.episode_length << "\n";
  out << "link.reward_throughput = " << shortest(link.reward_throughput) << "\n";
  out << "link.reward_latency = " << shortest(link.reward_latency) << "\n";
  out << "link.reward_loss = " << shortest(link.reward_loss) << "\n";
  out << "link.rng_seed = " << link.rng_seed << "\n";
  out << "penalty.alpha = " << shortest(cfg.penalty.alpha) << "\n";
  out << "penalty.delta = " << shortest(cfg.penalty.delta) << "\n";
  out << "scenario.kind = " << (cfg.scenario.kind == ScenarioKind::AvoidK ? "avoid_k" : "dsl")
      << "\n";
  out << "scenario.k = " << cfg.scenario.k << "\n";
  out << "scenario.event = " << cfg.scenario.event << "\n";
  out << "scenario.reset_events = " << join(cfg.scenario.reset_events) << "\n";
  if (!cfg.scenario.path.empty()) out << "scenario.path = " << cfg.scenario.path << "\n";
  out << "training.episodes = " << training.episodes << "\n";
  {
    out << "training.seeds = ";
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
      if (i) out << ",";
      out << cfg.seeds[i];
    }
    out << "\n";
  }
  out << "training.learning_rate = " << shortest(training.learning_rate) << "\n";
  out << "training.gamma = " << shortest(training.gamma) << "\n";
  out << "training.epsilon_start = " << shortest(training.epsilon_start) << "\n";
  out << "training.epsilon_end = " << shortest(training.epsilon_end) << "\n";
  out << "training.epsilon_decay_fraction = " << shortest(training.epsilon_decay_fraction) << "\n";
  out << "training.bins_throughput = " << training.throughput_bins << "\n";
  out << "training.bins_latency = " << training.latency_bins << "\n";
  out << "training.bins_loss = " << training.loss_bins << "\n";
  out << "training.window = " << training.window << "\n";
  out << "training.convergence_fraction = " << shortest(training.convergence_fraction) << "\n";
  out << "output.dir = " << cfg.output_dir << "\n";
  return out.str();
}

std::vector<ScenarioProgram> build_scenario_model(const ScenarioSettings& scenario) {
  if (scenario.kind == ScenarioKind::AvoidK)
    return {dsl::avoid_k_in_a_row(scenario.event, scenario.k, scenario.reset_events)};

  std::ifstream in(scenario.path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file '" + scenario.path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  dsl::ScenarioSource source{buffer.str(), scenario.path};
  const auto parsed = dsl::parse_scenario(source);
  if (!parsed.ok()) {
    std::string message = "scenario file '" + scenario.path + "' has errors:";
    for (const auto& d : parsed.diagnostics) message += "\n  " + dsl::format_diagnostic(source, d);
    throw ConfigError(message);
  }
  return {*parsed.program};
}

TrainingRun run_training(const ExperimentConfig& cfg, Mode mode, std::uint64_t seed) {
  train::ModelBinding binding;
  binding.penalty = cfg.penalty;
  binding.policy = SelectionPolicy::first_enabled();
  binding.model_seed = seed;
  binding.model_max_steps = cfg.model_max_steps;
  if (mode == Mode::Shaped) binding.programs = build_scenario_model(cfg.scenario);

  auto result = train::train(cfg.link, cfg.training, binding, seed);
  result.log.config_echo = render_config(cfg);

  TrainingRun run;
  run.mode = mode;
  run.seed = seed;
  run.log = std::move(result.log);
  return run;
}

namespace {

int effective_window(const ExperimentConfig& cfg, const std::vector<TrainingRun>& runs) {
  int smallest = cfg.training.window;
  for (const auto& run : runs)
    smallest = std::min(smallest, static_cast<int>(run.log.episodes.size()));
  return std::max(1, smallest);
}

std::string convergence_text(const std::optional<int>& episode) {
  return episode ? std::to_string(*episode) : std::string("NotConverged");
}

}  // namespace

CompareReport compare_runs(const std::vector<TrainingRun>& baseline,
                           const std::vector<TrainingRun>& shaped,
                           const ExperimentConfig& cfg) {
  if (baseline.size() != shaped.size())
    throw std::invalid_argument("compare_runs: mode run counts differ");
  CompareReport report;

  const int window = cfg.training.window;
  int available = std::numeric_limits<int>::max();
  for (const auto& run : baseline)
    available = std::min(available, static_cast<int>(run.log.episodes.size()));
  for (const auto& run : shaped)
    available = std::min(available, static_cast<int>(run.log.episodes.size()));
  report.insufficient_data = available < window;
  const int w = std::max(1, std::min(window, available));

  double freq_b_sum = 0.0;
  double freq_s_sum = 0.0;
  double cand_b_sum = 0.0;
  double cand_s_sum = 0.0;

  for (std::size_t i = 0; i < baseline.size(); ++i) {
    const auto& b = baseline[i];
    const auto& s = shaped[i];
    if (b.seed != s.seed)
      throw std::invalid_argument("compare_runs: seed order differs between modes");

    SeedComparison row;
    row.seed = b.seed;
    row.baseline_violation_frequency = train::final_window_violation_frequency(b.log, w).value();
    row.shaped_violation_frequency = train::final_window_violation_frequency(s.log, w).value();
    row.baseline_candidate_mean = train::final_window_mean_candidate(b.log, w).value();
    row.shaped_candidate_mean = train::final_window_mean_candidate(s.log, w).value();

    const double threshold = cfg.training.convergence_fraction * row.baseline_candidate_mean;
    row.baseline_convergence = train::convergence_episode(b.log, threshold, w);
    row.shaped_convergence = train::convergence_episode(s.log, threshold, w);

    freq_b_sum += row.baseline_violation_frequency;
    freq_s_sum += row.shaped_violation_frequency;
    cand_b_sum += row.baseline_candidate_mean;
    cand_s_sum += row.shaped_candidate_mean;

    const bool slower =
        !row.shaped_convergence ||
        (row.baseline_convergence && *row.shaped_convergence >= *row.baseline_convergence);
    if (slower) ++report.slower_convergence_seeds;
    if (!row.shaped_convergence && row.baseline_convergence) report.shaped_not_converged = true;

    report.seeds.push_back(std::move(row));
  }

  const auto n = static_cast<double>(report.seeds.size());
  report.baseline_violation_frequency = freq_b_sum / n;
  report.shaped_violation_frequency = freq_s_sum / n;
  report.baseline_candidate_mean = cand_b_sum / n;
  report.shaped_candidate_mean = cand_s_sum / n;

  if (report.shaped_violation_frequency > 0.0)
    report.reduction_ratio = report.baseline_violation_frequency / report.shaped_violation_frequency;
  else if (report.baseline_violation_frequency > 0.0)
    report.reduction_ratio = std::numeric_limits<double>::infinity();
  else
    report.reduction_ratio = 1.0;

  report.retention = report.baseline_candidate_mean != 0.0
                         ? report.shaped_candidate_mean / report.baseline_candidate_mean
                         : 1.0;

  const int seed_count = static_cast<int>(report.seeds.size());
  report.required_slower_seeds = (4 * seed_count + 4) / 5;  // ceil of 4/5

  report.thresholds_met = !report.insufficient_data &&
                          report.baseline_violation_frequency > 0.0 &&
                          report.shaped_violation_frequency * 10.0 <=
                              report.baseline_violation_frequency &&
                          report.retention >= 0.7 &&
                          report.slower_convergence_seeds >= report.required_slower_seeds;
  return report;
}

int CompareReport::exit_code() const {
  if (insufficient_data) return 3;
  if (!thresholds_met || shaped_not_converged) return 2;
  return 0;
}

void write_compare_csv(std::ostream& out, const CompareReport& report) {
  out << "seed,baseline_violation_frequency,shaped_violation_frequency,reduction_ratio,"
         "baseline_candidate_mean,shaped_candidate_mean,baseline_convergence_episode,"
         "shaped_convergence_episode\n";
  for (const auto& row : report.seeds) {
    double reduction;
    if (row.shaped_violation_frequency > 0.0)
      reduction = row.baseline_violation_frequency / row.shaped_violation_frequency;
    else if (row.baseline_violation_frequency > 0.0)
      reduction = std::numeric_limits<double>::infinity();
    else
      reduction = 1.0;
    out << row.seed << ',' << fixed6(row.baseline_violation_frequency) << ','
        << fixed6(row.shaped_violation_frequency) << ',' << fixed6(reduction) << ','
        << fixed6(row.baseline_candidate_mean) << ',' << fixed6(row.shaped_candidate_mean) << ','
        << convergence_text(row.baseline_convergence) << ','
        << convergence_text(row.shaped_convergence) << "\n";
  }

  int converged_b = 0;
  int converged_s = 0;
  double conv_b_sum = 0.0;
  double conv_s_sum = 0.0;
  for (const auto& row : report.seeds) {
    if (row.baseline_convergence) {
      ++converged_b;
      conv_b_sum += *row.baseline_convergence;
    }
    if (row.shaped_convergence) {
      ++converged_s;
      conv_s_sum += *row.shaped_convergence;
    }
  }
  out << "aggregate," << fixed6(report.baseline_violation_frequency) << ','
      << fixed6(report.shaped_violation_frequency) << ',' << fixed6(report.reduction_ratio) << ','
      << fixed6(report.baseline_candidate_mean) << ',' << fixed6(report.shaped_candidate_mean)
      << ','
      << (converged_b ? fixed6(conv_b_sum / converged_b) : std::string("NotConverged")) << ','
      << (converged_s ? fixed6(conv_s_sum / converged_s) : std::string("NotConverged")) << "\n";
}

namespace {

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file '" + path.string() + "'");
  out << content;
}

void write_log_csv(const fs::path& path, const train::TrainLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file '" + path.string() + "'");
  log.write_csv(out);
}

fs::path seed_log_path(const ExperimentConfig& cfg, Mode mode, std::uint64_t seed) {
  return fs::path(cfg.output_dir) /
         (std::string(mode_name(mode)) + "_seed" + std::to_string(seed) + ".csv");
}

void write_train_summary(const ExperimentConfig& cfg, const std::vector<TrainingRun>& runs) {
  const int w = effective_window(cfg, runs);
  std::ostringstream out;
  out << "seed,final_window_mean_reward,final_window_violation_frequency,convergence_episode\n";
  for (const auto& run : runs) {
    const double mean_reward = train::final_window_mean_reward(run.log, w).value();
    const double freq = train::final_window_violation_frequency(run.log, w).value();
    const double own_level = train::final_window_mean_candidate(run.log, w).value();
    const auto convergence = train::convergence_episode(
        run.log, cfg.training.convergence_fraction * own_level, w);
    out << run.seed << ',' << fixed6(mean_reward) << ',' << fixed6(freq) << ','
        << convergence_text(convergence) << "\n";
  }
  write_text_file(fs::path(cfg.output_dir) / "summary.csv", out.str());
}

}  // namespace

int cmd_train(const ExperimentConfig& cfg, Mode mode, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    write_text_file(fs::path(cfg.output_dir) / "config_echo.cfg", render_config(cfg));

    std::vector<TrainingRun> runs;
    for (const auto seed : cfg.seeds) {
      runs.push_back(run_training(cfg, mode, seed));
      const auto& log = runs.back().log;
      write_log_csv(seed_log_path(cfg, mode, seed), log);
      out << mode_name(mode) << " seed " << seed << ": episodes "
          << log.episodes.size() << ", final episode candidate reward "
          << fixed6(log.episodes.back().total_candidate_reward) << "\n";
    }
    write_train_summary(cfg, runs);
    out << "wrote " << (fs::path(cfg.output_dir) / "summary.csv").string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_compare(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    write_text_file(fs::path(cfg.output_dir) / "config_echo.cfg", render_config(cfg));

    std::vector<TrainingRun> baseline;
    std::vector<TrainingRun> shaped;
    for (const auto seed : cfg.seeds) {
      baseline.push_back(run_training(cfg, Mode::Baseline, seed));
      write_log_csv(seed_log_path(cfg, Mode::Baseline, seed), baseline.back().log);
      shaped.push_back(run_training(cfg, Mode::Shaped, seed));
      write_log_csv(seed_log_path(cfg, Mode::Shaped, seed), shaped.back().log);
    }

    const CompareReport report = compare_runs(baseline, shaped, cfg);
    {
      std::ostringstream csv;
      write_compare_csv(csv, report);
      write_text_file(fs::path(cfg.output_dir) / "compare.csv", csv.str());
    }

    out << "violation frequency: baseline " << fixed6(report.baseline_violation_frequency)
        << ", shaped " << fixed6(report.shaped_violation_frequency) << " (reduction "
        << fixed6(report.reduction_ratio) << "x)\n";
    out << "candidate reward: baseline " << fixed6(report.baseline_candidate_mean) << ", shaped "
        << fixed6(report.shaped_candidate_mean) << " (retention " << fixed6(report.retention)
        << ")\n";
    out << "slower convergence: " << report.slower_convergence_seeds << "/"
        << report.seeds.size() << " seeds (need " << report.required_slower_seeds << ")\n";
    if (report.insufficient_data)
      out << "verdict: insufficient data (fewer episodes than the averaging window)\n";
    else if (report.exit_code() == 0)
      out << "verdict: thresholds met\n";
    else if (report.shaped_not_converged && report.thresholds_met)
      out << "verdict: shaped run never converged\n";
    else
      out << "verdict: thresholds not met\n";
    return report.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_eval(const ExperimentConfig& cfg, Mode mode, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    write_text_file(fs::path(cfg.output_dir) / "config_echo.cfg", render_config(cfg));

    for (const auto seed : cfg.seeds) {
      train::ModelBinding binding;
      binding.penalty = cfg.penalty;
      binding.model_seed = seed;
      binding.model_max_steps = cfg.model_max_steps;
      if (mode == Mode::Shaped) binding.programs = build_scenario_model(cfg.scenario);

      const auto trained = train::train(cfg.link, cfg.training, binding, seed);
      auto greedy = train::evaluate_greedy(cfg.link, cfg.training, trained.q, trained.discretizer,
                                           binding, 1);
      greedy.seed = seed;
      greedy.config_echo = render_config(cfg);

      const fs::path path =
          fs::path(cfg.output_dir) /
          ("eval_" + std::string(mode_name(mode)) + "_seed" + std::to_string(seed) + ".csv");
      write_log_csv(path, greedy);

      const auto& rec = greedy.episodes.front();
      out << mode_name(mode) << " seed " << seed << ": greedy candidate reward "
          << fixed6(rec.total_candidate_reward) << ", violations " << rec.violations
          << ", blocked " << rec.blocked << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_run_model(const std::vector<std::string>& model_files,
                  const std::vector<std::string>& injected_events, const SelectionPolicy& policy,
                  std::uint64_t seed, std::size_t max_steps, std::ostream& out,
                  std::ostream& err) {
  std::vector<ScenarioProgram> programs;
  bool parse_failed = false;
  for (const auto& file : model_files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      err << "error: cannot open model file '" << file << "'\n";
      return 1;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    dsl::ScenarioSource source{buffer.str(), file};
    const auto parsed = dsl::parse_scenario(source);
    for (const auto& d : parsed.diagnostics) err << dsl::format_diagnostic(source, d) << "\n";
    if (!parsed.ok())
      parse_failed = true;
    else
      programs.push_back(*parsed.program);
  }
  if (parse_failed) return 1;

  try {
    Execution exec(std::move(programs), seed);
    write_event_lines(out, exec.run_to_completion(policy, max_steps));
    for (const auto& name : injected_events) {
      exec.advance(Event(name));
      write_event_lines(out, exec.run_to_completion(policy, max_steps));
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sbrl::cli
