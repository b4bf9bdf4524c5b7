#pragma once

// Config-driven experiments plus the specialised evaluators they use.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sdl/netgraph.hpp"
#include "sdl/signals.hpp"
#include "sdl/simengine.hpp"
#include "sdl/strategies.hpp"

namespace sdl {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitValidation = 2, kExitAssertion = 3 };

using nlohmann::json;

// ---------------------------------------------------------------- config

/// Relative paths inside specs resolve against base_dir.
Network network_from_json(const json& spec, const std::string& base_dir = {});
SignalModel model_from_json(const json& spec);
/// Accepts "name" or {"name": {...}} for myopic, never, sigma, aux, threshold_table.
StrategyPtr strategy_from_json(const json& spec, const Network& g, const SignalModel& model,
                               const std::string& base_dir = {});
/// "strategy" applies to every agent; "overrides": [{"agents": [...], "strategy": ...}] replaces some.
Profile profile_from_json(const json& config, const Network& g, const SignalModel& model,
                          const std::string& base_dir = {});

/// Compact dump with sorted keys; whitespace in the source does not matter.
std::string canonical_json(const json& j);
/// SHA-1 over "blob <len>\0<canonical json>", as git hashes a file.
std::string config_hash(const json& j);

// ---------------------------------------------------------------- output

std::string format_number(double x);

void write_estimates_csv(std::ostream& out, const std::string& run_id, const EstimateReport& r, bool header = true);

struct PlotPoint {
  std::string series;
  double x = 0, y = 0, ci = 0;
};

/// "nondecreasing", "nonincreasing" or "none", judged within the reported CIs.
std::string monotone_flag(const std::vector<PlotPoint>& series);
/// Long-format CSV: series,x,y,ci,monotone.
void write_plotdata(std::ostream& out, const std::vector<PlotPoint>& points);

// ---------------------------------------------------------------- σ on a ring

/// Adoption times on a one-sided ring given period-0 seeds and binary summaries x.
std::vector<Time> ring_sigma_times(const SigmaParams& p, const std::vector<char>& seeds, const std::vector<int>& x);

struct RingSigmaEstimate {
  double p_hat = 0, ci = 0;
  double utility = 0;
  std::size_t reps = 0;
  double mean_wave_distance = 0;  // agents between the nearest left seed and the target
  double no_seed_fraction = 0;
};

/// Eventual correctness of `agent` on a one-sided ring of n agents; O(1/eta) per replication.
RingSigmaEstimate ring_sigma_estimate(std::size_t n, const SignalModel& model, const SigmaParams& p, std::size_t agent,
                                      std::size_t reps, std::uint64_t seed, double delta = 0.99, unsigned jobs = 1);

// ---------------------------------------------------------------- star centre

/// Best reply of a star centre whose d leaves adopt at 0 iff belief >= 1/2.
struct StarCenterRule {
  std::size_t leaves = 0;
  double delta = 0;
  std::vector<char> adopt_at_zero;             // per atom
  std::vector<std::vector<char>> adopt_at_one;  // per atom, per leaf count 0..d
  double p_correct = 0;                         // exact
  double utility = 0;                           // exact, 1/2 prior
};

StarCenterRule star_center_rule(std::size_t leaves, const SignalModel& model, double delta);
/// Profile on build_star(leaves, true): centre plays `rule`, leaves are myopic.
Profile star_center_profile(const StarCenterRule& rule, const SignalModel& model);

// ---------------------------------------------------------------- runner

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int jobs = 0;
  bool verify = false;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  json report;
  std::vector<std::string> files;
};

/// Executes one config already parsed; writes artifacts into opts.out_dir.
RunResult run_experiment(json config, const RunOptions& opts);
/// Reads opts.config_path, runs it and writes the manifest.
RunResult run_config_file(const RunOptions& opts);

}  // namespace sdl
