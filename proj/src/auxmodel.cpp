#include "sdl/auxmodel.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace sdl {

std::pair<double, double> high_signal_probs(const SignalModel& model) {
  double pH = 0, pL = 0;
  for (std::size_t k = 0; k < model.size(); ++k)
    if (model.belief(k) > 0.5) {
      pH += model.atom(k).likelihood_H;
      pL += model.atom(k).likelihood_L;
    }
  return {pH, pL};
}

PsiResult psi(const MuD& mu, const SignalModel& model, const std::vector<double>& r_grid) {
  std::vector<double> rs = r_grid;
  if (rs.empty()) rs.assign(mu.grid.data(), mu.grid.data() + mu.size());
  PsiResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int fam : {1, 2})
    for (double r : rs) {
      RootStrategySpec a{fam, r};
      double w = w_mu(mu, model, a);
      if (w > best.value) {
        best.value = w;
        best.argmax = a;
      }
    }
  return best;
}

MuD sample_mu(const std::vector<double>& grid, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (n < 2) throw Error(ErrorKind::InvalidSize, "sampling grid needs at least two points");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::gamma_distribution<double> shape(0.3 + 2 * unif(rng), 1.0);
  MuD mu;
  mu.grid = Eigen::Map<const Eigen::VectorXd>(grid.data(), n);
  mu.mass_L.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) mu.mass_L(i) = shape(rng);
  mu.mass_L /= mu.mass_L.sum();
  Eigen::VectorXd extra(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) extra(i) = shape(rng);
  extra /= extra.sum();
  const double moved = unif(rng) * mu.mass_L(n - 1);
  mu.mass_H = mu.mass_L;
  mu.mass_H.head(n - 1) += moved * extra;
  mu.mass_H(n - 1) = 1.0 - mu.mass_H.head(n - 1).sum();
  if (mu.mass_H(n - 1) < 0) mu.mass_H(n - 1) = 0;
  return mu;
}

namespace {

struct Scored {
  double ratio = 0, gap = 0;
  RootStrategySpec a;
};

std::optional<Scored> score(const MuD& mu, double eps, const SignalModel& model) {
  try {
    mu.validate();
  } catch (const Error&) {
    return std::nullopt;
  }
  double u = u_of_mu(mu);
  if (!(u > 0) || eta_of_mu(mu) < eps) return std::nullopt;
  auto p = psi(mu, model);
  return Scored{p.value / u, p.value - u, p.argmax};
}

}  // namespace

CEpsEstimate estimate_C_eps(double eps, const SignalModel& model, const MuSampler& sampler, std::size_t n,
                            std::uint64_t seed, std::size_t descent_iters) {
  if (!(eps > 0 && eps < 1)) throw Error(ErrorKind::Domain, "eps must lie in (0,1)");
  CEpsEstimate out;
  out.estimate = std::numeric_limits<double>::infinity();
  out.min_gap = std::numeric_limits<double>::infinity();
  Rng rng = make_stream(seed, 0);
  for (std::size_t i = 0; i < n; ++i) {
    MuD mu;
    try {
      mu = sampler(rng);
    } catch (const Error&) {
      ++out.rejected;
      continue;
    }
    auto s = score(mu, eps, model);
    if (!s) {
      ++out.rejected;
      continue;
    }
    ++out.accepted;
    out.min_gap = std::min(out.min_gap, s->gap);
    if (s->ratio < out.estimate) {
      out.estimate = s->ratio;
      out.argmin = mu;
      out.argmin_strategy = s->a;
    }
  }
  if (out.accepted == 0) return out;

  // random mass moves from the best sample, kept when the ratio drops
  Rng mv = make_stream(seed, 1);
  const Eigen::Index m = out.argmin.size();
  std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t it = 0; it < descent_iters && m > 1; ++it) {
    MuD cand = out.argmin;
    Eigen::VectorXd& vec = unif(mv) < 0.5 ? cand.mass_H : cand.mass_L;
    Eigen::Index from = pick(mv), to = pick(mv);
    if (from == to) continue;
    double amt = vec(from) * unif(mv) * 0.2;
    vec(from) -= amt;
    vec(to) += amt;
    auto s = score(cand, eps, model);
    if (!s) continue;
    out.min_gap = std::min(out.min_gap, s->gap);
    if (s->ratio < out.estimate) {
      out.estimate = s->ratio;
      out.argmin = cand;
      out.argmin_strategy = s->a;
      ++out.descent_steps;
    }
  }
  return out;
}

std::vector<double> default_grid(double delta, std::size_t N) {
  if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidParameter, "delta must lie in (0,1)");
  std::vector<double> g;
  for (std::size_t k = 0; k <= N; ++k) g.push_back(1 - std::pow(delta, static_cast<double>(k)));
  g.push_back(1.0);
  return g;
}

double reparam(double delta, Time tau) {
  if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidParameter, "delta must lie in (0,1)");
  if (tau == kNever) return 1.0;
  return 1 - std::pow(delta, static_cast<double>(tau));
}

double min_delta_for(double C) {
  if (!(C > 1)) throw Error(ErrorKind::Domain, "improvement factor must exceed 1");
  return 1 / C;
}

void to_json(nlohmann::json& j, const MuD& mu) {
  auto arr = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  j = nlohmann::json{{"grid", arr(mu.grid)}, {"mass_H", arr(mu.mass_H)}, {"mass_L", arr(mu.mass_L)}};
}

void from_json(const nlohmann::json& j, MuD& mu) {
  auto vec = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw Error(ErrorKind::Validation, std::string("mu needs array ") + key);
    auto v = j.at(key).get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  mu.grid = vec("grid");
  mu.mass_H = vec("mass_H");
  mu.mass_L = vec("mass_L");
  mu.validate();
}

MuD mu_from_discrete(const std::vector<double>& dH, const std::vector<double>& dL, double delta) {
  if (dH.size() != dL.size() || dH.size() < 2) throw Error(ErrorKind::InvalidSize, "distributions need matching sizes >= 2");
  const auto n = static_cast<Eigen::Index>(dH.size());
  MuD mu;
  mu.grid.resize(n);
  for (Eigen::Index t = 0; t + 1 < n; ++t) mu.grid(t) = reparam(delta, t);
  mu.grid(n - 1) = 1.0;
  mu.mass_H = Eigen::Map<const Eigen::VectorXd>(dH.data(), n);
  mu.mass_L = Eigen::Map<const Eigen::VectorXd>(dL.data(), n);
  return mu;
}

}  // namespace sdl
