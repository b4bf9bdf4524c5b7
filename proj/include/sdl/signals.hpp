#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "sdl/scalar.hpp"

namespace sdl {

enum class State { H, L };

inline const char* to_string(State s) { return s == State::H ? "H" : "L"; }

using Rng = std::mt19937_64;

/// Independent stream for replication `index` under `master`.
Rng make_stream(std::uint64_t master, std::uint64_t index);

struct Atom {
  double likelihood_H;
  double likelihood_L;
  double belief() const { return likelihood_H / (likelihood_H + likelihood_L); }
};

/**
 * Finite-atom signal distribution. Atoms are kept sorted by induced belief,
 * so atom index order is belief order.
 */
class SignalModel {
 public:
  static SignalModel binary(double q);
  static SignalModel from_atoms(std::vector<Atom> atoms);
  /// `atoms` beliefs evenly spaced on [a, b] with a + b = 1 and uniform marginal.
  static SignalModel belief_grid(double a, double b, std::size_t atoms);

  std::size_t size() const { return atoms_.size(); }
  const Atom& atom(std::size_t k) const { return atoms_.at(k); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double belief(std::size_t k) const { return beliefs_(static_cast<Eigen::Index>(k)); }
  const Eigen::VectorXd& beliefs() const { return beliefs_; }
  const Eigen::VectorXd& likelihood(State s) const { return s == State::H ? nu_H_ : nu_L_; }
  double a() const { return beliefs_.minCoeff(); }
  double b() const { return beliefs_.maxCoeff(); }

  std::size_t sample_atom(State s, Rng& rng) const;
  std::optional<std::size_t> find_atom(double belief, double tol = 1e-12) const;

  /// Likelihoods converted to Scalar (rationals via nearest_rational).
  template <class Scalar>
  Vec<Scalar> likelihood_as(State s) const {
    const auto& src = likelihood(s);
    Vec<Scalar> v(src.size());
    for (Eigen::Index k = 0; k < src.size(); ++k) v(k) = from_double<Scalar>(src(k));
    return v;
  }

 private:
  explicit SignalModel(std::vector<Atom> atoms);
  std::vector<Atom> atoms_;
  Eigen::VectorXd nu_H_, nu_L_, beliefs_;
  std::vector<double> cdf_H_, cdf_L_;
};

double sample_belief(const SignalModel& model, State s, Rng& rng);
double combine_beliefs(const std::vector<double>& beliefs);
double log_likelihood_ratio(const SignalModel& model, double belief);

inline double log_odds(double p) { return std::log(p / (1.0 - p)); }
inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace sdl
