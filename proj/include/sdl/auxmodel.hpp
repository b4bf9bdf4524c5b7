#pragma once

// Continuous-time root stopping problem on [0,1] with discount 1 - t.
// Children's adoption times are atomic measures on a grid; the root picks
// from two strategy families a_{1,r} and a_{2,r}.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sdl/error.hpp"
#include "sdl/scalar.hpp"
#include "sdl/signals.hpp"
#include "sdl/strategies.hpp"

namespace sdl {

template <class Scalar = double>
struct Mu {
  Vec<Scalar> grid, mass_H, mass_L;

  Eigen::Index size() const { return grid.size(); }

  void validate(double tol = 1e-12) const {
    const Eigen::Index n = grid.size();
    if (n == 0 || mass_H.size() != n || mass_L.size() != n)
      throw Error(ErrorKind::Validation, "mu arrays must be nonempty and of equal length");
    if (grid(n - 1) != Scalar(1)) throw Error(ErrorKind::Validation, "last grid point must be exactly 1");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (grid(i) < Scalar(0) || grid(i) > Scalar(1)) throw Error(ErrorKind::Validation, "grid must lie in [0,1]");
      if (i > 0 && !(grid(i - 1) < grid(i))) throw Error(ErrorKind::Validation, "grid must be strictly ascending");
      if (mass_H(i) < Scalar(0) || mass_L(i) < Scalar(0)) throw Error(ErrorKind::Validation, "negative mass");
      if (i + 1 < n && mass_H(i) < mass_L(i) - Scalar(tol))
        throw Error(ErrorKind::Validation, "mass_H must dominate mass_L below 1 (grid index " + std::to_string(i) + ")");
    }
    if (std::fabs(to_double(Scalar(mass_H.sum() - Scalar(1)))) > tol ||
        std::fabs(to_double(Scalar(mass_L.sum() - Scalar(1)))) > tol)
      throw Error(ErrorKind::Validation, "mu masses must sum to 1");
  }
};

using MuD = Mu<double>;

/// Root strategy: family 1 or 2 with parameter r in [0,1].
struct RootStrategySpec {
  int family = 1;
  double r = 0;
};

template <class Scalar>
Scalar u_of_mu(const Mu<Scalar>& mu) {
  return (mu.mass_H - mu.mass_L).dot((Vec<Scalar>::Ones(mu.size()) - mu.grid));
}

template <class Scalar>
Scalar eta_of_mu(const Mu<Scalar>& mu) {
  const Eigen::Index n = mu.size();
  Scalar wrong = Scalar(0.5) * mu.mass_H(n - 1) + Scalar(0.5) * (Scalar(1) - mu.mass_L(n - 1));
  Scalar u = u_of_mu(mu);
  return u < wrong ? u : wrong;
}

/// Stopping time of the root for child times t1, t2 and private signal above 1/2 (hi).
template <class Scalar>
Scalar root_time(const RootStrategySpec& a, const Scalar& t1, const Scalar& t2, bool hi) {
  const Scalar r(a.r);
  if (a.family == 1) return t1 > r ? t1 : (t2 > r ? t2 : r);
  if (t1 > r && !(t2 > r) && hi) return r;
  return t1;
}

/// Probabilities (under H and L) that the private belief exceeds 1/2.
std::pair<double, double> high_signal_probs(const SignalModel& model);

template <class Scalar>
Scalar w_mu(const Mu<Scalar>& mu, const SignalModel& model, const RootStrategySpec& a) {
  if (a.family != 1 && a.family != 2) throw Error(ErrorKind::InvalidParameter, "root family must be 1 or 2");
  auto [pH, pL] = high_signal_probs(model);
  const Eigen::Index n = mu.size();
  auto state_value = [&](const Vec<Scalar>& m, double p_hi) {
    Scalar total(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (m(i) == Scalar(0)) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (m(j) == Scalar(0)) continue;
        Scalar hi = Scalar(1) - root_time(a, mu.grid(i), mu.grid(j), true);
        Scalar lo = Scalar(1) - root_time(a, mu.grid(i), mu.grid(j), false);
        total += m(i) * m(j) * (Scalar(p_hi) * hi + Scalar(1 - p_hi) * lo);
      }
    }
    return total;
  };
  return state_value(mu.mass_H, pH) - state_value(mu.mass_L, pL);
}

struct PsiResult {
  double value = 0;
  RootStrategySpec argmax;
};

/// Best w over both families with r ranging over r_grid (defaults to the mu grid).
PsiResult psi(const MuD& mu, const SignalModel& model, const std::vector<double>& r_grid = {});

struct CEpsEstimate {
  double estimate = 0;  // upper estimate of the infimum ratio
  MuD argmin;
  RootStrategySpec argmin_strategy;
  std::size_t accepted = 0, rejected = 0;
  std::size_t descent_steps = 0;
  double min_gap = 0;  // smallest psi - u seen
};

using MuSampler = std::function<MuD(Rng&)>;

CEpsEstimate estimate_C_eps(double eps, const SignalModel& model, const MuSampler& sampler, std::size_t n,
                            std::uint64_t seed, std::size_t descent_iters = 200);

/// Random monotone measure on the given grid.
MuD sample_mu(const std::vector<double>& grid, Rng& rng);

/// {1 - delta^n : 0 <= n <= N} u {1}
std::vector<double> default_grid(double delta, std::size_t N);

double reparam(double delta, Time tau);

double min_delta_for(double C);

void to_json(nlohmann::json& j, const MuD& mu);
void from_json(const nlohmann::json& j, MuD& mu);

/// Induced measure of a discrete adoption-time distribution (never slot last).
MuD mu_from_discrete(const std::vector<double>& dist_H, const std::vector<double>& dist_L, double delta);

}  // namespace sdl
