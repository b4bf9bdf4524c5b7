#include "sdl/infobounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdl/error.hpp"

namespace sdl {

namespace {
// x log(x/y) with 0 log 0 = 0
double xlogxy(double x, double y) {
  if (x == 0) return 0;
  if (y == 0) return kInfiniteKL;
  return x * std::log(x / y);
}
}  // namespace

double kl_bernoulli(double p, double q) {
  if (!(p >= 0 && p <= 1 && q >= 0 && q <= 1)) throw Error(ErrorKind::Domain, "probabilities must lie in [0,1]");
  return xlogxy(p, q) + xlogxy(1 - p, 1 - q);
}

double product_signal_bound(double eps) {
  if (!(eps > 0 && eps < 0.5)) throw Error(ErrorKind::Domain, "eps must lie in (0, 1/2)");
  return 2.0 * std::log(eps) / std::log1p(-eps);
}

double product_kl_exact(const BinaryFamily& family) {
  if (family.empty()) throw Error(ErrorKind::InvalidSize, "family must be nonempty");
  if (family.size() > 64) throw Error(ErrorKind::SizeLimit, "family limited to 64 factors");
  // products in log space, then back; valid because factors are in (0,1)
  double l1 = 0, l0 = 0;
  for (auto [p1, p0] : family) {
    if (!(p1 > 0 && p1 < 1 && p0 > 0 && p0 < 1)) throw Error(ErrorKind::Domain, "factor probabilities must lie in (0,1)");
    l1 += std::log(p1);
    l0 += std::log(p0);
  }
  // B = 1 term from logs to keep precision for tiny products
  double t1 = std::exp(l1) * (l1 - l0);
  double t0 = xlogxy(-std::expm1(l1), -std::expm1(l0));
  return t1 + t0;
}

double family_belief_bound(const BinaryFamily& family) {
  double eps = 0.5;
  for (auto [p1, p0] : family) {
    double post = p1 / (p1 + p0);
    eps = std::min({eps, post, 1 - post});
  }
  return eps;
}

double power_exponent(double alpha) { return std::log1p(alpha) / std::log1p(1.0 / alpha); }

CheckResult power_inequality_check(double alpha, double x, double y) {
  if (!(alpha > 1) || !(x > 0 && x < 1) || !(y > 0 && y < 1)) return CheckResult::NotApplicable;
  // relative slack for rounding at the equality point
  constexpr double tol = 1e-12;
  if (!(y >= x / alpha * (1 - tol)) || !(1 - y <= alpha * (1 - x) * (1 + tol))) return CheckResult::NotApplicable;
  double rhs = std::pow(x, power_exponent(alpha));
  return y >= rhs * (1 - tol) ? CheckResult::True : CheckResult::False;
}

CkTable ck_recursion(std::size_t m, double eps) {
  if (m < 1) throw Error(ErrorKind::InvalidParameter, "segment bound m must be >= 1");
  if (!(eps > 0 && eps < 0.5)) throw Error(ErrorKind::Domain, "eps must lie in (0, 1/2)");
  CkTable t;
  t.eps = eps;
  t.m = m;
  t.alpha = (1 - eps) / eps;
  const double la = std::log(t.alpha);
  const double a2 = t.alpha * t.alpha;
  t.D = 4 * a2 * std::log(a2 + 1);
  t.c0 = la + t.D;
  t.c1_literal = std::max({t.c0, la, t.D});
  const std::size_t K = 2 * m + 2;
  t.c.assign(K + 1, 0);
  t.C.assign(K + 1, 0);
  t.c[0] = t.C[0] = t.c0;
  t.c[1] = t.C[1] = t.c1_literal;
  for (std::size_t k = 2; k <= K; ++k) {
    t.c[k] = static_cast<double>(k + 1) * t.C[k - 1];
    t.C[k] = t.c[k] + la + t.D;
  }
  t.log_one_minus_pbar = -t.C[K] - 3 - std::log(2.0);
  t.pbar = pbar_from_info(t.C[K]);
  return t;
}

double pbar_from_info(double info) {
  if (!(info >= 0)) throw Error(ErrorKind::Domain, "information must be >= 0");
  return 1.0 - 0.5 * std::exp(-info - 3.0);
}

double exact_info(const std::vector<double>& dH, const std::vector<double>& dL) {
  if (dH.size() != dL.size()) throw Error(ErrorKind::InvalidSize, "distribution sizes differ");
  double s = 0;
  for (std::size_t i = 0; i < dH.size(); ++i) s += xlogxy(dH[i], dL[i]);
  return s;
}

namespace {

std::vector<std::size_t> bin_times(const std::vector<Time>& times, Time T) {
  std::vector<std::size_t> c(static_cast<std::size_t>(T) + 2, 0);
  for (Time t : times) {
    if (t == kNever)
      ++c.back();
    else
      ++c[static_cast<std::size_t>(std::min(t, T))];
  }
  return c;
}

double plugin_kl(const std::vector<std::size_t>& cH, const std::vector<std::size_t>& cL, bool smooth) {
  double nH = 0, nL = 0;
  const double add = smooth ? 1.0 : 0.0;
  for (std::size_t i = 0; i < cH.size(); ++i) {
    nH += static_cast<double>(cH[i]) + add;
    nL += static_cast<double>(cL[i]) + add;
  }
  double s = 0;
  for (std::size_t i = 0; i < cH.size(); ++i)
    s += xlogxy((static_cast<double>(cH[i]) + add) / nH, (static_cast<double>(cL[i]) + add) / nL);
  return s;
}

bool needs_smoothing(const std::vector<std::size_t>& cH, const std::vector<std::size_t>& cL) {
  for (std::size_t i = 0; i < cH.size(); ++i)
    if ((cH[i] == 0) != (cL[i] == 0)) return true;
  return false;
}

}  // namespace

InfoEstimate empirical_info(const std::vector<Time>& tH, const std::vector<Time>& tL, Time T, std::size_t bootstrap,
                            std::uint64_t seed) {
  if (tH.empty() || tL.empty()) throw Error(ErrorKind::InvalidSize, "need traces in both states");
  InfoEstimate est;
  est.counts_H = bin_times(tH, T);
  est.counts_L = bin_times(tL, T);
  std::size_t occupied = 0;
  for (std::size_t i = 0; i < est.counts_H.size(); ++i)
    if (est.counts_H[i] + est.counts_L[i] > 0) ++occupied;
  if (occupied <= 1) {
    est.degenerate = true;
    return est;
  }
  est.smoothed = needs_smoothing(est.counts_H, est.counts_L);
  est.value = plugin_kl(est.counts_H, est.counts_L, est.smoothed);

  std::vector<double> boot;
  Rng rng = make_stream(seed, 0xb007);
  std::uniform_int_distribution<std::size_t> iH(0, tH.size() - 1), iL(0, tL.size() - 1);
  std::vector<Time> rH(tH.size()), rL(tL.size());
  for (std::size_t b = 0; b < bootstrap; ++b) {
    for (auto& x : rH) x = tH[iH(rng)];
    for (auto& x : rL) x = tL[iL(rng)];
    auto cH = bin_times(rH, T), cL = bin_times(rL, T);
    boot.push_back(plugin_kl(cH, cL, est.smoothed || needs_smoothing(cH, cL)));
  }
  if (boot.empty()) {
    est.ci_low = est.ci_high = est.value;
    return est;
  }
  std::sort(boot.begin(), boot.end());
  auto q = [&](double f) { return boot[static_cast<std::size_t>(f * static_cast<double>(boot.size() - 1))]; };
  est.ci_low = std::min(q(0.025), est.value);
  est.ci_high = std::max(q(0.975), est.value);
  return est;
}

double chi_f_H(double p, double q) { return (1 - p) * std::log((1 - p) / (1 - q)) + p * std::log(p / q); }
double chi_f_L(double p, double q) { return (1 - q) * std::log((1 - p) / (1 - q)) + q * std::log(p / q); }
double chi_g_H(double p, double q) {
  double f = chi_f_H(p, q), a = std::log((1 - p) / (1 - q)) - f, b = std::log(p / q) - f;
  return (1 - p) * a * a + p * b * b;
}
double chi_g_L(double p, double q) {
  double f = chi_f_L(p, q), a = std::log((1 - p) / (1 - q)) - f, b = std::log(p / q) - f;
  return (1 - q) * a * a + q * b * b;
}

ChiStats chi_stats(const std::vector<std::pair<double, double>>& probs, double eps, double target_q, double step) {
  if (!(eps > 0 && eps < 0.5)) throw Error(ErrorKind::Domain, "eps must lie in (0, 1/2)");
  if (!(target_q > 0.5 && target_q < 1)) throw Error(ErrorKind::Domain, "target q must lie in (1/2, 1)");
  if (!(step > 0 && step <= 1e-3)) throw Error(ErrorKind::InvalidParameter, "grid step must lie in (0, 1e-3]");
  ChiStats r;
  for (auto [pH, pL] : probs) {
    bool ok = pH >= eps && pH <= 1 - eps && pL >= eps && pL <= 1 - eps && pH >= (1 + eps) * pL;
    if (!ok) {
      r.applicable = false;
      return r;
    }
    r.mean_H += chi_f_H(pH, pL);
    r.mean_L += chi_f_L(pH, pL);
    r.var_H += chi_g_H(pH, pL);
    r.var_L += chi_g_L(pH, pL);
  }

  double rho = std::numeric_limits<double>::infinity(), rho_p = 0;
  double arg_p = 0, arg_q = 0;
  auto visit = [&](double p, double q) {
    double fh = chi_f_H(p, q), fl = chi_f_L(p, q);
    if (!(fh > 0) || !(fl < 0)) r.f_signs_ok = false;
    double v = std::min(fh, -fl);
    if (v < rho) {
      rho = v;
      arg_p = p;
      arg_q = q;
    }
    rho_p = std::max({rho_p, chi_g_H(p, q), chi_g_L(p, q)});
    ++r.grid_points;
  };
  const double lo = eps, hi = 1 - eps;
  for (double q = lo; q <= hi + 1e-15; q += step) {
    double p0 = (1 + eps) * q;
    if (p0 > hi) break;
    visit(p0, q);  // the binding edge of Z
    for (double p = std::ceil(p0 / step) * step; p <= hi + 1e-15; p += step)
      if (p > p0) visit(std::min(p, hi), q);
    visit(hi, q);
  }
  // local refinement around the minimiser
  const double fine = step / 20;
  for (double dq = -step; dq <= step; dq += fine) {
    double q = std::clamp(arg_q + dq, lo, hi);
    for (double dp = -step; dp <= step; dp += fine) {
      double p = std::clamp(arg_p + dp, lo, hi);
      if (p >= (1 + eps) * q) visit(p, q);
    }
  }
  r.rho = rho;
  r.rho_prime = rho_p;

  const double t = std::log(target_q / (1 - target_q));
  const double slack = 1 - target_q;
  auto ok = [&](double S) {
    if (!(t <= S * rho)) return false;
    double gap = S * rho - t;
    return S * rho_p <= slack * gap * gap;
  };
  // larger root of slack*rho^2 S^2 - (2 slack rho t + rho') S + slack t^2 = 0
  double A = slack * rho * rho, B = -(2 * slack * rho * t + rho_p), C = slack * t * t;
  double S0 = (-B + std::sqrt(std::max(0.0, B * B - 4 * A * C))) / (2 * A);
  double S = std::max(1.0, std::floor(std::max(S0, t / rho)) - 2);
  while (!ok(S)) S += 1;
  while (S > 1 && ok(S - 1)) S -= 1;
  r.m_min = static_cast<std::size_t>(S);
  r.var_bound = static_cast<double>(probs.size()) * rho_p;
  return r;
}

double myopic_value(const SignalModel& model) {
  double u = 0;
  for (std::size_t k = 0; k < model.size(); ++k)
    if (model.belief(k) >= 0.5) u += 0.5 * (model.atom(k).likelihood_H - model.atom(k).likelihood_L);
  return u;
}

ImpatienceBound impatience_bound(const Network& g, const SignalModel& model, double delta, double dbar,
                                 std::size_t agent) {
  if (!(delta > 0 && delta < dbar && dbar < 1))
    throw Error(ErrorKind::InvalidParameter, "need 0 < delta < delta_bar_target < 1");
  ImpatienceBound r;
  r.u0 = myopic_value(model);
  if (!(r.u0 > 0)) throw Error(ErrorKind::InvalidModel, "myopic value must be positive");
  r.T = static_cast<Time>(std::floor(std::log(r.u0) / std::log(dbar))) + 1;
  while (r.T > 1 && std::pow(dbar, static_cast<double>(r.T - 1)) < r.u0) --r.T;
  auto dist = observation_distances(g, agent);
  const auto T = static_cast<std::size_t>(r.T);
  for (std::size_t j = 0; j < g.size(); ++j)
    if (dist[j] <= T) ++r.m;
  for (auto e : g.infinite_ends())
    if (dist[e] < T)
      throw Error(ErrorKind::Truncation, "truncation boundary at distance " + std::to_string(dist[e]) +
                                             " lies inside radius T = " + std::to_string(r.T));
  r.rho = logistic(static_cast<double>(r.m) * log_odds(model.b()));
  r.bound = 1 - (1 - r.rho) / r.rho * r.u0;
  r.vacuous = r.bound >= 1 - 1e-12;
  return r;
}

double delta_bar(double b) {
  if (!(b > 0.5 && b < 1)) throw Error(ErrorKind::Domain, "max belief b must lie in (1/2, 1)");
  return 2 - 1 / b;
}

bool adopt_forced(double pi, double delta) { return pi >= forced_threshold(delta); }

}  // namespace sdl
