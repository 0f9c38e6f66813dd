// End-to-end acceptance gate. Each numbered check prints one PASS/FAIL line;
// the process exits nonzero if any check fails. Thresholds and time budgets
// are pinned here on purpose, so a regression cannot hide behind a config.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "sbrl/cli_app.hpp"
#include "sbrl/dsl.hpp"
#include "sbrl/engine.hpp"
#include "sbrl/experiment.hpp"
#include "sbrl/netsim.hpp"
#include "sbrl/shaping.hpp"
#include "sbrl/trainer.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Gate {
  int failures = 0;

  void report(int id, const std::string& what, bool pass, const std::string& detail = "") {
    std::printf("%s: %d. %s%s%s\n", pass ? "PASS" : "FAIL", id, what.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }

  template <typename Fn>
  void run(int id, const std::string& what, Fn&& fn) {
    try {
      auto [pass, detail] = fn();
      report(id, what, pass, detail);
    } catch (const std::exception& e) {
      report(id, what, false, std::string("exception: ") + e.what());
    }
  }
};

using Verdict = std::pair<bool, std::string>;

std::string fmt(const char* format, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

// ---- 1: guided tap trace under every policy ----

Verdict golden_trace() {
  const auto start = Clock::now();
  const std::vector<std::string> want = {"AddHot",  "AddCold", "AddHot",
                                         "AddCold", "AddHot",  "AddCold"};
  const std::vector<sbrl::SelectionPolicy> policies = {
      sbrl::SelectionPolicy::first_enabled(), sbrl::SelectionPolicy::seeded_random(),
      sbrl::SelectionPolicy::priority({{"AddHot", 2}, {"AddCold", 1}})};
  for (const auto& policy : policies) {
    for (std::uint64_t seed : {101u, 202u, 303u}) {
      sbrl::Execution exec(sbrl::dsl::water_tap_model(), seed);
      exec.advance(sbrl::Event("WaterLow"));
      const auto steps = exec.run_to_completion(policy);
      std::vector<std::string> got;
      for (const auto& s : steps) got.push_back(s.event.name());
      if (got != want) {
        std::string trace;
        for (const auto& g : got) {
          if (!trace.empty()) trace += ",";
          trace += g;
        }
        return {false, "policy " + std::string(policy.name()) + " seed " +
                           std::to_string(seed) + " produced [" + trace + "]"};
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 1.0) return {false, fmt("took %.2f s, budget 1 s", elapsed)};
  return {true, fmt("9 policy/seed combinations in %.3f s", elapsed)};
}

// ---- 2: exhaustive avoid-k blocking over every short action tape ----

Verdict avoid_k_exhaustive() {
  const auto start = Clock::now();
  const char* names[] = {"IncreaseRate", "DecreaseRate", "KeepRate"};
  long long checked = 0;
  for (int k : {2, 3, 5}) {
    const auto guard =
        sbrl::dsl::avoid_k_in_a_row("IncreaseRate", k, {"DecreaseRate", "KeepRate"});
    for (int tape = 0; tape < 6561; ++tape) {  // 3^8 sequences of length 8
      sbrl::Execution exec({guard});
      std::vector<int> history;
      int code = tape;
      for (int t = 0; t < 8; ++t) {
        const int action = code % 3;
        code /= 3;
        const bool blocked = exec.handle_agent_action(sbrl::Event(names[action]));
        const bool expected = action == 0 && oracle::avoid_k_blocked(history, 0, k);
        if (blocked != expected) {
          return {false, "k=" + std::to_string(k) + " tape " + std::to_string(tape) +
                             " step " + std::to_string(t) + ": engine said " +
                             (blocked ? "blocked" : "free")};
        }
        history.push_back(action);
        ++checked;
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 10.0) return {false, fmt("took %.2f s, budget 10 s", elapsed)};
  return {true, std::to_string(checked) + " steps across 3*6561 tapes in " +
                    fmt("%.2f s", elapsed)};
}

// ---- 3: penalty formula grid ----

Verdict penalty_grid() {
  for (double alpha : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    for (double delta : {0.0, 1.0, 4.5, 10.0}) {
      sbrl::shaping::PenaltyConfig cfg;
      cfg.alpha = alpha;
      cfg.delta = delta;
      for (double candidate : {-10.0, -4.5, 0.0, 1.0, 10.0}) {
        const double free = sbrl::shaping::shape_reward(candidate, false, cfg);
        const double hit = sbrl::shaping::shape_reward(candidate, true, cfg);
        if (std::abs(free - candidate) > 1e-12 ||
            std::abs(hit - (alpha * candidate - delta)) > 1e-12) {
          return {false, fmt("alpha=%g delta=%g", alpha, delta) + fmt(" candidate=%g", candidate)};
        }
      }
    }
  }
  return {true, "100 grid points within 1e-12"};
}

// ---- 4-6: the headline experiment, shared across three criteria ----

struct ExperimentOutcome {
  double baseline_freq = 0.0;  // violations per step, averaged across seeds
  double shaped_freq = 0.0;
  double baseline_candidate = 0.0;
  double shaped_candidate = 0.0;
  int slower = 0;
  int seeds = 0;
  double elapsed = 0.0;
};

ExperimentOutcome run_headline_experiment() {
  const sbrl::cli::ExperimentConfig cfg;  // stock settings: 5 seeds, 2000 episodes
  const auto start = Clock::now();
  ExperimentOutcome out;
  out.seeds = static_cast<int>(cfg.seeds.size());
  const int w = cfg.training.window;
  for (const auto seed : cfg.seeds) {
    const auto baseline = sbrl::cli::run_training(cfg, sbrl::cli::Mode::Baseline, seed);
    const auto shaped = sbrl::cli::run_training(cfg, sbrl::cli::Mode::Shaped, seed);

    const auto bf = sbrl::train::final_window_violation_frequency(baseline.log, w);
    const auto sf = sbrl::train::final_window_violation_frequency(shaped.log, w);
    const auto bc = sbrl::train::final_window_mean_candidate(baseline.log, w);
    const auto sc = sbrl::train::final_window_mean_candidate(shaped.log, w);
    if (!bf || !sf || !bc || !sc) throw std::runtime_error("window larger than the run");
    out.baseline_freq += *bf;
    out.shaped_freq += *sf;
    out.baseline_candidate += *bc;
    out.shaped_candidate += *sc;

    const double threshold = cfg.training.convergence_fraction * *bc;
    const auto conv_b = sbrl::train::convergence_episode(baseline.log, threshold, w);
    const auto conv_s = sbrl::train::convergence_episode(shaped.log, threshold, w);
    const bool slower = !conv_s || (conv_b && *conv_s >= *conv_b);
    if (slower) ++out.slower;
  }
  out.baseline_freq /= out.seeds;
  out.shaped_freq /= out.seeds;
  out.baseline_candidate /= out.seeds;
  out.shaped_candidate /= out.seeds;
  out.elapsed = seconds_since(start);
  return out;
}

// ---- 7: an empty model never perturbs the environment ----

Verdict non_interference() {
  sbrl::netsim::LinkConfig link;  // stock 400-step episodes, crossed repeatedly
  sbrl::netsim::NetSimEnv bare{link};
  sbrl::shaping::ShapedEnv<sbrl::netsim::NetSimEnv> wrapped(
      sbrl::netsim::NetSimEnv{link}, {}, sbrl::train::congestion_action_map(),
      sbrl::shaping::PenaltyConfig{});
  bare.reset();
  wrapped.reset();
  std::uint64_t mix = 1;
  for (int t = 0; t < 1000; ++t) {
    mix = mix * 6364136223846793005ull + 1442695040888963407ull;
    const int action = static_cast<int>(mix % 3);
    const auto be = bare.step(action);
    const auto we = wrapped.step(action);
    const bool same = we.observation.throughput_ratio == be.observation.throughput_ratio &&
                      we.observation.latency_ratio == be.observation.latency_ratio &&
                      we.observation.loss_rate == be.observation.loss_rate &&
                      we.reward == be.reward && we.candidate_reward == be.reward &&
                      we.done == be.done && !we.blocked;
    if (!same) return {false, "divergence at step " + std::to_string(t)};
    if (be.done) {
      bare.reset();
      wrapped.reset();
    }
  }
  return {true, "1000 steps bit-identical"};
}

// ---- 8: randomized engine-vs-interpreter equivalence ----

Verdict engine_equivalence() {
  const auto start = Clock::now();
  const int cases = 1200;
  for (std::uint64_t case_seed = 1; case_seed <= cases; ++case_seed) {
    const auto divergence = gen::lockstep_case(case_seed);
    if (!divergence.empty())
      return {false, "case " + std::to_string(case_seed) + ": " + divergence};
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 60.0) return {false, fmt("took %.2f s, budget 60 s", elapsed)};
  return {true, std::to_string(cases) + " randomized models in " + fmt("%.2f s", elapsed)};
}

// ---- 9: byte-identical compare output ----

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    files[fs::relative(entry.path(), dir).string()] = buf.str();
  }
  return files;
}

Verdict csv_reproducibility() {
  const fs::path root =
      fs::temp_directory_path() / ("sbrl-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg_path = root / "exp.cfg";
  const fs::path out_dir = root / "out";
  std::ofstream(cfg_path) << "link.episode_length = 100\n"
                          << "training.episodes = 300\n"
                          << "training.seeds = 1,2\n"
                          << "output.dir = " << out_dir.string() << "\n";

  auto run_once = [&] {
    std::ostringstream out, err;
    const int code =
        sbrl::cli::run_cli({"compare", "--config", cfg_path.string()}, out, err);
    if (code == 1 || !err.str().empty())
      throw std::runtime_error("compare failed: " + err.str());
    return code;
  };

  const int first_code = run_once();
  const auto first = snapshot_dir(out_dir);
  const int second_code = run_once();
  const auto second = snapshot_dir(out_dir);
  fs::remove_all(root);

  if (first.empty()) return {false, "compare produced no files"};
  if (first_code != second_code)
    return {false, "exit codes differ between runs: " + std::to_string(first_code) + " vs " +
                       std::to_string(second_code)};
  if (first.size() != second.size())
    return {false, "file sets differ between runs"};
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    if (it == second.end()) return {false, name + " missing on the second run"};
    if (it->second != bytes) return {false, name + " differs between runs"};
  }
  return {true, std::to_string(first.size()) + " files byte-identical across reruns"};
}

}  // namespace

int main() {
  Gate gate;

  gate.run(1, "water-tap golden trace under first/random/priority selection", golden_trace);
  gate.run(2, "avoid-k blocking matches the brute-force scanner for k in {2,3,5}",
           avoid_k_exhaustive);
  gate.run(3, "blocked-penalty formula holds over the parameter grid", penalty_grid);

  try {
    const auto exp = run_headline_experiment();
    const bool freq_ok = exp.baseline_freq > 0.0 && exp.shaped_freq <= exp.baseline_freq / 10.0;
    gate.report(4, "shaped violation frequency is at most a tenth of baseline", freq_ok,
                fmt("baseline %.4f, shaped %.4f", exp.baseline_freq, exp.shaped_freq) +
                    (exp.elapsed < 600.0 ? fmt(", %.0f s", exp.elapsed)
                                         : fmt(" but took %.0f s, budget 600 s", exp.elapsed)));
    if (exp.elapsed >= 600.0) ++gate.failures;

    const double retention = exp.baseline_candidate != 0.0
                                 ? exp.shaped_candidate / exp.baseline_candidate
                                 : 0.0;
    gate.report(5, "shaped agent keeps at least 70% of the baseline candidate reward",
                retention >= 0.7, fmt("retention %.3f", retention));

    const int required = (4 * exp.seeds + 4) / 5;
    gate.report(6, "shaped convergence is no earlier than baseline on enough seeds",
                exp.slower >= required,
                std::to_string(exp.slower) + "/" + std::to_string(exp.seeds) + " seeds, need " +
                    std::to_string(required));
  } catch (const std::exception& e) {
    gate.report(4, "shaped violation frequency is at most a tenth of baseline", false,
                std::string("exception: ") + e.what());
    gate.report(5, "shaped agent keeps at least 70% of the baseline candidate reward", false,
                "experiment did not run");
    gate.report(6, "shaped convergence is no earlier than baseline on enough seeds", false,
                "experiment did not run");
  }

  gate.run(7, "empty scenario set leaves 1000 environment steps untouched", non_interference);
  gate.run(8, "engine agrees with the reference interpreter on randomized models",
           engine_equivalence);
  gate.run(9, "compare reruns reproduce every output file byte for byte", csv_reproducibility);

  if (gate.failures) {
    std::printf("%d of 9 acceptance checks failed\n", gate.failures);
    return 1;
  }
  std::printf("all 9 acceptance checks passed\n");
  return 0;
}
