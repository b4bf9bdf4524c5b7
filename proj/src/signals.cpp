#include "sdl/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdl/error.hpp"

namespace sdl {

Rng make_stream(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5d1u};
  return Rng(seq);
}

SignalModel::SignalModel(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw Error(ErrorKind::InvalidModel, "signal model has no atoms");
  double sH = 0, sL = 0;
  for (const auto& at : atoms_) {
    if (!(at.likelihood_H >= 0 && at.likelihood_L >= 0) || at.likelihood_H + at.likelihood_L <= 0)
      throw Error(ErrorKind::InvalidModel, "atom likelihoods must be nonnegative and not both zero");
    sH += at.likelihood_H;
    sL += at.likelihood_L;
  }
  if (std::fabs(sH - 1) > 1e-12 || std::fabs(sL - 1) > 1e-12)
    throw Error(ErrorKind::InvalidModel, "likelihoods must each sum to 1");
  std::stable_sort(atoms_.begin(), atoms_.end(), [](const Atom& x, const Atom& y) { return x.belief() < y.belief(); });
  const auto n = static_cast<Eigen::Index>(atoms_.size());
  nu_H_.resize(n);
  nu_L_.resize(n);
  beliefs_.resize(n);
  bool informative = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& at = atoms_[static_cast<std::size_t>(k)];
    nu_H_(k) = at.likelihood_H;
    nu_L_(k) = at.likelihood_L;
    beliefs_(k) = at.belief();
    if (beliefs_(k) <= 0 || beliefs_(k) >= 1)
      throw Error(ErrorKind::InvalidModel, "beliefs must lie strictly inside (0,1)");
    if (std::fabs(beliefs_(k) - 0.5) > 1e-15) informative = true;
  }
  if (!informative) throw Error(ErrorKind::InvalidModel, "signal is a point mass at the prior");
  cdf_H_.resize(atoms_.size());
  cdf_L_.resize(atoms_.size());
  std::partial_sum(nu_H_.data(), nu_H_.data() + n, cdf_H_.begin());
  std::partial_sum(nu_L_.data(), nu_L_.data() + n, cdf_L_.begin());
}

SignalModel SignalModel::binary(double q) {
  if (!(q > 0.5 && q < 1)) throw Error(ErrorKind::InvalidPrecision, "binary precision must lie in (1/2, 1)");
  return SignalModel({{1 - q, q}, {q, 1 - q}});
}

SignalModel SignalModel::from_atoms(std::vector<Atom> atoms) { return SignalModel(std::move(atoms)); }

SignalModel SignalModel::belief_grid(double a, double b, std::size_t atoms) {
  if (atoms < 2) throw Error(ErrorKind::InvalidModel, "belief grid needs at least two atoms");
  if (!(a > 0 && a < b && b < 1) || std::fabs(a + b - 1) > 1e-12)
    throw Error(ErrorKind::InvalidModel, "belief grid needs 0 < a < b < 1 with a + b = 1");
  std::vector<Atom> v;
  const double m = 1.0 / static_cast<double>(atoms);
  double sH = 0;
  for (std::size_t k = 0; k < atoms; ++k) {
    double pi = a + (b - a) * static_cast<double>(k) / static_cast<double>(atoms - 1);
    if (k == atoms - 1) pi = b;
    v.push_back({2 * pi * m, 2 * (1 - pi) * m});
    sH += 2 * pi * m;
  }
  // remove rounding drift so both columns sum to 1
  for (auto& at : v) {
    at.likelihood_H /= sH;
    at.likelihood_L /= (2.0 - sH);
  }
  return SignalModel(std::move(v));
}

static std::size_t draw(const std::vector<double>& cdf, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, cdf.back());
  double x = u(rng);
  auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
  auto k = static_cast<std::size_t>(it - cdf.begin());
  if (k >= cdf.size()) k = cdf.size() - 1;
  // skip zero-mass atoms that upper_bound can land on at the right edge
  while (k > 0 && cdf[k] == cdf[k - 1]) --k;
  return k;
}

std::size_t SignalModel::sample_atom(State s, Rng& rng) const {
  return draw(s == State::H ? cdf_H_ : cdf_L_, rng);
}

std::optional<std::size_t> SignalModel::find_atom(double belief, double tol) const {
  for (std::size_t k = 0; k < size(); ++k)
    if (std::fabs(beliefs_(static_cast<Eigen::Index>(k)) - belief) <= tol) return k;
  return std::nullopt;
}

double sample_belief(const SignalModel& model, State s, Rng& rng) { return model.belief(model.sample_atom(s, rng)); }

double combine_beliefs(const std::vector<double>& beliefs) {
  double llr = 0;
  for (double p : beliefs) {
    if (!(p > 0 && p < 1)) throw Error(ErrorKind::DegenerateBelief, "belief must lie in (0,1)");
    llr += log_odds(p);
  }
  return logistic(llr);
}

double log_likelihood_ratio(const SignalModel& model, double belief) {
  auto k = model.find_atom(belief);
  if (!k) throw Error(ErrorKind::UnknownAtom, "belief " + std::to_string(belief) + " is not an atom of the model");
  return log_odds(model.belief(*k));
}

}  // namespace sdl
