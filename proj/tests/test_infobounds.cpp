#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "sdl/error.hpp"
#include "sdl/infobounds.hpp"

using namespace sdl;
using doctest::Approx;

namespace {

// direct enumeration over the 2^n outcomes is overkill; B is the all-ones indicator
double product_kl_oracle(const BinaryFamily& f) {
  long double a = 1, b = 1;
  for (auto [p1, p0] : f) a *= p1, b *= p0;
  long double d = a * std::log(a / b) + (1 - a) * std::log((1 - a) / (1 - b));
  return static_cast<double>(d);
}

}  // namespace

TEST_CASE("bernoulli divergence") {
  CHECK(kl_bernoulli(0.3, 0.3) == 0);
  CHECK(kl_bernoulli(0.5, 0.5) == 0);
  CHECK(kl_bernoulli(0.36, 0.16) == Approx(0.36 * std::log(2.25) + 0.64 * std::log(0.64 / 0.84)));
  CHECK(kl_bernoulli(0.36, 0.16) == Approx(0.1179).epsilon(1e-3));
  CHECK(kl_bernoulli(0, 0) == 0);
  CHECK(kl_bernoulli(1, 1) == 0);
  CHECK(kl_bernoulli(0.5, 0) == kInfiniteKL);
  CHECK(kl_bernoulli(0, 0.5) == Approx(std::log(2)));
  CHECK_THROWS_AS(kl_bernoulli(1.2, 0.5), Error);
}

TEST_CASE("product signal bound") {
  CHECK(product_signal_bound(0.25) == Approx(9.638).epsilon(1e-3));
  CHECK(product_signal_bound(0.1) == Approx(43.71).epsilon(1e-3));
  CHECK(product_signal_bound(0.499) == Approx(2 * std::log(0.499) / std::log(0.501)));
  CHECK(product_signal_bound(0.499) == Approx(2.0).epsilon(0.01));
  CHECK(product_signal_bound(0.4999) < product_signal_bound(0.499));
  CHECK_THROWS_AS(product_signal_bound(0.5), Error);
  CHECK_THROWS_AS(product_signal_bound(0), Error);
}

TEST_CASE("product KL examples") {
  CHECK(product_kl_exact({{0.6, 0.4}}) == Approx(kl_bernoulli(0.6, 0.4)));
  CHECK(product_kl_exact({{0.6, 0.4}}) == Approx(0.0811).epsilon(1e-3));
  double two = product_kl_exact({{0.6, 0.4}, {0.6, 0.4}});
  CHECK(two == Approx(kl_bernoulli(0.36, 0.16)));
  CHECK(two <= product_signal_bound(0.4));
  CHECK(product_signal_bound(0.4) == Approx(3.587).epsilon(1e-3));
  CHECK(product_kl_exact({{0.3, 0.3}, {0.8, 0.8}}) == Approx(0.0));
  CHECK(family_belief_bound({{0.6, 0.4}, {0.6, 0.4}}) == Approx(0.4));
  CHECK_THROWS_AS(product_kl_exact({}), Error);
  CHECK_THROWS_AS(product_kl_exact(BinaryFamily(65, {0.5, 0.5})), Error);
  CHECK_THROWS_AS(product_kl_exact({{1.0, 0.5}}), Error);
}

TEST_CASE("product KL stays under the belief bound") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 10000; ++it) {
    std::size_t n = 1 + rng() % 8;
    BinaryFamily f;
    for (std::size_t i = 0; i < n; ++i) f.emplace_back(0.01 + 0.98 * u(rng), 0.01 + 0.98 * u(rng));
    double eps = family_belief_bound(f);
    if (!(eps > 0 && eps < 0.5)) continue;
    double d = product_kl_exact(f);
    CHECK(d == Approx(product_kl_oracle(f)).epsilon(1e-9));
    CHECK(d <= product_signal_bound(eps) * (1 + 1e-12));
  }
}

TEST_CASE("single indicator sandwich") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 10000; ++it) {
    double gamma = 1 + 9 * u(rng);
    double p = 0.001 + 0.998 * u(rng);
    double lo = std::pow(p, gamma), hi = std::pow(p, 1 / gamma);
    double q = lo + (hi - lo) * u(rng);
    if (!(q > 0 && q < 1)) continue;
    CHECK(kl_bernoulli(p, q) <= 2 * gamma);
  }
}

TEST_CASE("power inequality") {
  CHECK(power_inequality_check(2, 0.9, 0.45) == CheckResult::NotApplicable);
  for (double t : {0.1, 0.5, 0.9}) CHECK(power_inequality_check(3, t, t) == CheckResult::True);
  for (double a : {1.5, 2.0, 3.0, 19.0}) {
    CHECK(power_inequality_check(a, a / (1 + a), 1 / (1 + a)) == CheckResult::True);
    CHECK(std::pow(a / (1 + a), power_exponent(a)) == Approx(1 / (1 + a)).epsilon(1e-12));
  }
  CHECK(power_inequality_check(0.5, 0.5, 0.5) == CheckResult::NotApplicable);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int applicable = 0;
  for (int it = 0; it < 10000; ++it) {
    double a = std::exp(u(rng) * std::log(20.0));
    if (a <= 1) continue;
    double x = 0.001 + 0.998 * u(rng);
    double ylo = std::max(x / a, 1 - a * (1 - x)), yhi = 1.0;
    double y = ylo + (yhi - ylo) * u(rng);
    if (!(y > 0 && y < 1)) continue;
    auto r = power_inequality_check(a, x, y);
    CHECK(r == CheckResult::True);
    applicable += r != CheckResult::NotApplicable;
  }
  CHECK(applicable > 9000);
}

TEST_CASE("bound recursion") {
  auto t = ck_recursion(1, 0.25);
  CHECK(t.alpha == Approx(3));
  CHECK(t.c0 == Approx(std::log(3) + 36 * std::log(10)));
  CHECK(t.c0 == Approx(83.99).epsilon(1e-3));
  CHECK(t.c1_literal == t.c0);
  CHECK(t.c[1] == t.c[0]);
  CHECK(t.c.size() == 5);
  for (std::size_t k = 2; k < t.c.size(); ++k) {
    CHECK(t.c[k] == Approx((k + 1) * t.C[k - 1]));
    CHECK(t.C[k] == Approx(t.c[k] + std::log(3) + t.D));
  }
  CHECK(t.pbar <= 1.0);
  CHECK(t.log_one_minus_pbar < 0);
  CHECK(t.log_one_minus_pbar == Approx(-t.C.back() - 3 - std::log(2)));
  CHECK_THROWS_AS(ck_recursion(0, 0.25), Error);
  CHECK_THROWS_AS(ck_recursion(1, 0.5), Error);
}

TEST_CASE("correctness bound from information") {
  CHECK(pbar_from_info(0) == Approx(0.97511).epsilon(1e-5));
  CHECK(pbar_from_info(std::log(2)) == Approx(0.98756).epsilon(1e-5));
  CHECK(pbar_from_info(800) == 1.0);
  CHECK(pbar_from_info(1) > pbar_from_info(0.5));
}

TEST_CASE("forced adoption thresholds") {
  CHECK(delta_bar(0.75) == Approx(2.0 / 3));
  CHECK_THROWS_AS(delta_bar(0.5), Error);
  CHECK(forced_threshold(0) == 0.5);
  CHECK(forced_threshold(0.98) == Approx(0.98039).epsilon(1e-5));
  CHECK(adopt_forced(0.99, 0.98));
  CHECK_FALSE(adopt_forced(0.98, 0.98));
}

TEST_CASE("impatience bound") {
  auto m = SignalModel::binary(0.75);
  CHECK(myopic_value(m) == Approx(0.25));
  Network solo(1, {});
  auto r = impatience_bound(solo, m, 0.3, 0.6, 0);
  CHECK(r.m == 1);
  CHECK(r.rho == Approx(0.75));
  CHECK(r.bound == Approx(1 - 0.25 / 3));
  CHECK(r.bound == Approx(0.9167).epsilon(1e-4));
  CHECK_FALSE(r.vacuous);
  // T grows as the target discount approaches 1; finite lines stay fine
  auto far = impatience_bound(build_line(400, false, true), m, 0.3, 0.999, 0);
  CHECK(far.vacuous);
  CHECK_THROWS_WITH_AS(impatience_bound(build_line(5, false, false), m, 0.3, 0.9, 2), doctest::Contains("truncation"),
                       Error);
  CHECK_THROWS_AS(impatience_bound(solo, m, 0.7, 0.6, 0), Error);
}

TEST_CASE("chi statistics") {
  auto c = chi_stats({{0.6, 0.4}}, 0.1, 0.75);
  REQUIRE(c.applicable);
  CHECK(c.mean_H == Approx(0.2 * std::log(1.5)));
  CHECK(c.mean_H == Approx(0.0811).epsilon(1e-3));
  CHECK(c.mean_L == Approx(-0.0811).epsilon(1e-3));
  CHECK(c.f_signs_ok);
  CHECK(c.rho > 0);
  CHECK(c.rho_prime > 0);
  CHECK(c.m_min >= 1);
  CHECK_FALSE(chi_stats({{0.6, 0.59}}, 0.1, 0.75).applicable);
  CHECK_FALSE(chi_stats({{0.95, 0.4}}, 0.1, 0.75).applicable);
}

TEST_CASE("chi concentration by simulation") {
  const double q = 0.75;
  auto c = chi_stats({{0.6, 0.4}}, 0.1, q);
  REQUIRE(c.applicable);
  const double t = std::log(q / (1 - q)), up = std::log(0.6 / 0.4), down = std::log(0.4 / 0.6);
  std::mt19937_64 rng(14);
  std::binomial_distribution<std::size_t> k(c.m_min, 0.6);
  const int reps = 4000;
  int hits = 0;
  for (int r = 0; r < reps; ++r) {
    std::size_t a = k(rng);
    double chi = static_cast<double>(a) * up + static_cast<double>(c.m_min - a) * down;
    hits += chi >= t;
  }
  double p = static_cast<double>(hits) / reps;
  CHECK(p >= q - 2 * 1.96 * std::sqrt(p * (1 - p) / reps));
}

TEST_CASE("empirical information") {
  const double q = 0.75;
  std::mt19937_64 rng(15);
  std::bernoulli_distribution hiH(q), hiL(1 - q);
  std::vector<Time> tH, tL;
  for (int i = 0; i < 20000; ++i) {
    tH.push_back(hiH(rng) ? 0 : kNever);
    tL.push_back(hiL(rng) ? 0 : kNever);
  }
  auto e = empirical_info(tH, tL, 3);
  double exact = kl_bernoulli(q, 1 - q);
  CHECK(exact == Approx((2 * q - 1) * std::log(q / (1 - q))));
  CHECK(exact_info({q, 0, 1 - q}, {1 - q, 0, q}) == Approx(exact));
  CHECK(e.ci_low <= e.value);
  CHECK(e.value <= e.ci_high);
  CHECK(std::fabs(e.value - exact) < 3 * (e.ci_high - e.ci_low) + 1e-3);
  CHECK(e.counts_H.size() == 5);

  auto same = empirical_info(tH, tH, 3);
  CHECK(same.value == Approx(0.0));
  CHECK(same.ci_low <= 1e-12);

  auto deg = empirical_info(std::vector<Time>(50, 0), std::vector<Time>(50, 0), 2);
  CHECK(deg.degenerate);
  CHECK(deg.value == 0);

  auto sm = empirical_info({0, 0, 1}, {1, 1, kNever}, 2);
  CHECK(sm.smoothed);
  CHECK(sm.value > 0);
  CHECK(sm.value >= sm.ci_low);
}
