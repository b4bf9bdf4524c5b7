#pragma once

// Information quantities (natural logs throughout) and the closed-form
// bounds they feed.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sdl/netgraph.hpp"
#include "sdl/signals.hpp"
#include "sdl/strategies.hpp"

namespace sdl {

inline constexpr double kInfiniteKL = std::numeric_limits<double>::infinity();

double kl_bernoulli(double p, double q);

/// Upper bound on the KL divergence of a product indicator when each factor's belief lies in [eps, 1-eps].
double product_signal_bound(double eps);

/// (P[B_i = 1 | S = 1], P[B_i = 1 | S = 0]) per factor.
using BinaryFamily = std::vector<std::pair<double, double>>;

double product_kl_exact(const BinaryFamily& family);

/// Smallest eps with every factor's posterior P[S = 1 | B_i = 1] in [eps, 1 - eps].
double family_belief_bound(const BinaryFamily& family);

enum class CheckResult { True, False, NotApplicable };

CheckResult power_inequality_check(double alpha, double x, double y);
double power_exponent(double alpha);

struct CkTable {
  double eps = 0, alpha = 0;
  std::size_t m = 0;
  double c0 = 0, D = 0, c1_literal = 0;
  std::vector<double> c, C;  // index k = 0..2m+2
  double pbar = 0;
  double log_one_minus_pbar = 0;  // exact even when pbar rounds to 1
};

CkTable ck_recursion(std::size_t m, double eps);

double pbar_from_info(double info);

struct InfoEstimate {
  double value = 0;
  double ci_low = 0, ci_high = 0;
  bool smoothed = false;
  bool degenerate = false;
  std::vector<std::size_t> counts_H, counts_L;
};

/// Plug-in KL of binned adoption times (bins 0..T and never) with add-one
/// smoothing on empty bins and a percentile bootstrap interval.
InfoEstimate empirical_info(const std::vector<Time>& times_H, const std::vector<Time>& times_L, Time T,
                            std::size_t bootstrap = 200, std::uint64_t seed = 1);

/// KL of two adoption-time distributions given as probability vectors.
double exact_info(const std::vector<double>& dist_H, const std::vector<double>& dist_L);

double chi_f_H(double p, double q);
double chi_f_L(double p, double q);
double chi_g_H(double p, double q);
double chi_g_L(double p, double q);

struct ChiStats {
  bool applicable = true;
  double mean_H = 0, mean_L = 0;  // E[chi_S | theta] for the supplied family
  double var_H = 0, var_L = 0;
  double rho = 0, rho_prime = 0;  // uniform constants over the region Z
  double var_bound = 0;           // |S| * rho'
  std::size_t m_min = 0;          // Chebyshev sample size for target q
  std::size_t grid_points = 0;
  bool f_signs_ok = true;         // f_H > 0 and f_L < 0 on every grid point
};

ChiStats chi_stats(const std::vector<std::pair<double, double>>& adopt_probs, double eps, double target_q,
                   double grid_step = 1e-3);

struct ImpatienceBound {
  double u0 = 0;
  Time T = 0;
  std::size_t m = 0;
  double rho = 0;
  double bound = 1;
  bool vacuous = false;
};

ImpatienceBound impatience_bound(const Network& g, const SignalModel& model, double delta, double delta_bar_target,
                                 std::size_t agent);

/// Expected utility (1/2 prior) of adopting at 0 iff belief >= 1/2.
double myopic_value(const SignalModel& model);

double delta_bar(double b);
/// True when belief pi forces adoption under delta-discounting: pi >= 1/(2 - delta).
bool adopt_forced(double pi, double delta);
inline double forced_threshold(double delta) { return 1.0 / (2.0 - delta); }

}  // namespace sdl
