#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sdl/netgraph.hpp"
#include "sdl/signals.hpp"
#include "sdl/strategies.hpp"

namespace sdl {

struct ActionTrace {
  std::vector<Time> adoption_time;  // kNever when the agent did not adopt
  std::vector<double> beliefs;
  std::vector<std::size_t> atoms;
  State state = State::H;
  Time horizon = 0;
  Time halted_at = 0;      // last simulated period
  bool truncated = false;  // reached the horizon without quiescence
};

/// Draws the state and signals from rng, then runs the profile.
ActionTrace run_profile(const Network& g, const SignalModel& model, const Profile& profile, Time horizon, Rng& rng);

/// Runs with a fixed state and signal realization; rng only feeds mixed actions.
ActionTrace run_given(const Network& g, const SignalModel& model, const Profile& profile, Time horizon, State state,
                      const std::vector<std::size_t>& atoms, Rng& rng);

/// Per-agent eventual correctness. Truncated NEVER entries count as never adopted.
std::vector<bool> adjudicate(const ActionTrace& trace);

/// +delta^tau in H, -delta^tau in L, 0 for NEVER.
double realized_utility(Time tau, State s, double delta);

struct AgentEstimate {
  double p_hat = 0;
  double ci = 0;                // 95% half-width
  double utility = 0;           // NEVER counted as never (utility 0)
  double utility_censored = 0;  // mean over replications where the entry is not censored
  double truncated_fraction = 0;
};

struct EstimateReport {
  std::vector<AgentEstimate> agents;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double truncated_fraction = 0;  // fraction of runs that hit the horizon
};

double ci_halfwidth(double p_hat, std::size_t n);

/// Replication r uses make_stream(seed, r); results do not depend on `jobs`.
EstimateReport estimate(const Network& g, const SignalModel& model, const Profile& profile, Time horizon, double delta,
                        std::size_t n_reps, std::uint64_t seed, unsigned jobs = 1);

struct OutsiderResult {
  double posterior = 0.5;
  double log_odds = 0;
  std::size_t clamped = 0;  // terms clamped to +-ln(1e9)
};

/// Outside observer's posterior given which agents adopted at period 0.
/// probs[i] = (P[tau_i = 0 | H], P[tau_i = 0 | L]).
OutsiderResult outsider_posterior(const std::vector<bool>& adopted_at_zero,
                                  const std::vector<std::pair<double, double>>& probs);
OutsiderResult outsider_posterior(const ActionTrace& trace, const std::vector<std::pair<double, double>>& probs);

/// Number of worker threads from an explicit value, else SDL_JOBS, else 1.
unsigned resolve_jobs(int requested);

}  // namespace sdl
