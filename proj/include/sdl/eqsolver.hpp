#pragma once

// Exact Bayesian best responses and equilibrium search on small networks.
// Everything is templated on the scalar; instantiated for long double and
// Rational.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdl/netgraph.hpp"
#include "sdl/scalar.hpp"
#include "sdl/signals.hpp"
#include "sdl/strategies.hpp"

namespace sdl {

template <class Scalar>
struct ExactModel {
  Vec<Scalar> nu_H, nu_L;
  std::vector<double> belief;
  std::size_t size() const { return belief.size(); }
  static ExactModel from(const SignalModel& m);
};

/// Adoption probability for (agent, visible history, own atom).
template <class Scalar>
using Policy = std::function<Scalar(std::size_t, const HistoryKey&, std::size_t)>;

template <class Scalar>
struct RuleEntry {
  std::vector<Scalar> adopt;  // per atom; 0 for atoms that have surely adopted already
  std::vector<char> live;     // atom can reach this history without having adopted
  bool operator==(const RuleEntry&) const = default;
};

template <class Scalar>
struct DecisionProfile {
  std::vector<std::map<HistoryKey, RuleEntry<Scalar>>> rules;

  explicit DecisionProfile(std::size_t n = 0) : rules(n) {}
  Scalar adopt(std::size_t agent, const HistoryKey& key, std::size_t atom) const;
  Policy<Scalar> policy() const;
  bool operator==(const DecisionProfile&) const = default;
};

template <class Scalar>
DecisionProfile<Scalar> myopic_decisions(const Network& g, const SignalModel& m);

/// Wraps run-time strategies for exact enumeration.
template <class Scalar>
Policy<Scalar> policy_from_profile(const Network& g, const SignalModel& m, const Profile& p);

enum class UpdateOrder { GaussSeidel, Jacobi };

struct SolveConfig {
  double delta = 0.9;
  Time horizon = 4;
  std::size_t max_agents = 12;
  std::size_t max_worlds = 1u << 22;
  int max_sweeps = 100;
  double tolerance = 0.0;
  UpdateOrder order = UpdateOrder::GaussSeidel;
  bool raise_horizon = false;
  Time max_horizon = 12;
  bool mix_search = true;
  int mix_grid = 64;
};

template <class Scalar>
struct World {
  State state;
  Scalar weight;  // includes the 1/2 prior
  const std::vector<std::size_t>* atoms;
  const std::vector<Time>* times;
};

/// Visits every (state, signal profile, mixing branch) world of the game
/// truncated at `horizon`. `never_agent` is held at "never adopt"; its own
/// signal is not enumerated.
template <class Scalar>
void enumerate_worlds(const Network& g, const ExactModel<Scalar>& m, const Policy<Scalar>& policy, Time horizon,
                      std::optional<std::size_t> never_agent, const SolveConfig& cfg,
                      const std::function<void(const World<Scalar>&)>& visit);

template <class Scalar>
struct BestResponse {
  std::map<HistoryKey, RuleEntry<Scalar>> rule;
  Scalar value{0};                          // ex-ante expected utility (1/2 prior)
  bool threshold_form = true;               // adopting live atoms form an upper set at every history
  std::map<HistoryKey, std::vector<Scalar>> gap;  // adopt value minus continuation, per atom
};

template <class Scalar>
BestResponse<Scalar> best_response(const Network& g, const SignalModel& m, const Policy<Scalar>& others,
                                   std::size_t agent, const SolveConfig& cfg);

template <class Scalar>
Scalar exact_posterior(const Network& g, const SignalModel& m, const Policy<Scalar>& policy, std::size_t agent,
                       const HistoryKey& history, double own_belief, const SolveConfig& cfg);

template <class Scalar>
struct AgentOutcome {
  Scalar p_correct{0};
  Scalar utility{0};
  std::vector<Scalar> dist_H, dist_L;  // P[tau = t | state], t = 0..T, last slot = never
};

template <class Scalar>
std::vector<AgentOutcome<Scalar>> evaluate_profile(const Network& g, const SignalModel& m, const Policy<Scalar>& p,
                                                   const SolveConfig& cfg);

struct StructureCheck {
  bool threshold_form = true;  // profile and best responses
  bool state_monotone = true;
  double min_margin = 0;       // min over (i, t) of P[tau_i = t | H] - P[tau_i = t | L]
  bool tree = false;
  bool no_spontaneous = true;  // only meaningful on trees
  bool best_response_consistent = true;
  std::vector<std::string> failures;
  bool passed() const { return threshold_form && state_monotone && (!tree || no_spontaneous); }
};

template <class Scalar>
StructureCheck verify_structure(const Network& g, const SignalModel& m, const Policy<Scalar>& p,
                                const SolveConfig& cfg);

template <class Scalar>
struct EquilibriumReport {
  DecisionProfile<Scalar> profile;
  bool converged = false;
  int sweeps = 0;
  double residual = 0;
  std::size_t cycle_length = 0;
  bool mixed = false;
  Time horizon = 0;
  bool horizon_stable = false;
  std::vector<Time> horizons_tried;
  StructureCheck structure;
};

template <class Scalar>
EquilibriumReport<Scalar> solve_equilibrium(const Network& g, const SignalModel& m, const SolveConfig& cfg,
                                            std::optional<DecisionProfile<Scalar>> init = {});

/// Threshold-table view of a decision profile (for export and simulation).
template <class Scalar>
ThresholdTable to_threshold_table(const DecisionProfile<Scalar>& p, const SignalModel& m);

template <class Scalar>
double max_difference(const DecisionProfile<Scalar>& a, const DecisionProfile<Scalar>& b);

}  // namespace sdl

namespace sdl {

/// Exact replay of the spontaneous-adoption network under its designated signal draw.
struct SpontaneousReport {
  double q = 0, delta = 0;
  double delta_defer_B = 0;  // B and e prefer waiting at period 0 above this
  double delta_defer_d = 0;  // d prefers waiting at periods 0-1 above this
  Rational lr_period2_formula, lr_period2_enumerated;
  Rational lr_period3_formula, lr_period3_enumerated;
  double log10_lr_period2 = 0, log10_lr_period3 = 0;
  std::vector<double> f_log_lr;  // f's log likelihood ratio entering periods 0..4
  Time f_adoption = kNever;
  std::size_t neighbor_adoptions_before_f = 0;  // f's neighbours adopting in period f_adoption - 1
  std::vector<Time> trace;  // adoption times of all 115 agents

  bool ratio_below_one() const { return lr_period2_enumerated < 1; }
  bool spontaneous() const { return f_adoption != kNever && f_adoption > 0 && neighbor_adoptions_before_f == 0; }
};

/// Throws ErrorKind::Regime when delta is too small for B, e and d to defer.
SpontaneousReport verify_spontaneous_example(double q, double delta);

}  // namespace sdl
