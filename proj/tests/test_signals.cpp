#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "sdl/error.hpp"
#include "sdl/signals.hpp"

using namespace sdl;
using doctest::Approx;

TEST_CASE("binary model") {
  auto m = SignalModel::binary(0.75);
  REQUIRE(m.size() == 2);
  CHECK(m.belief(0) == Approx(0.25));
  CHECK(m.belief(1) == Approx(0.75));
  auto w = SignalModel::binary(0.51);
  CHECK(w.belief(0) == Approx(0.49));
  CHECK(w.belief(1) == Approx(0.51));
  CHECK_THROWS_AS(SignalModel::binary(0.5), Error);
  CHECK_THROWS_AS(SignalModel::binary(1.0), Error);
  CHECK(m.a() == Approx(0.25));
  CHECK(m.b() == Approx(0.75));
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(SignalModel::from_atoms({{0.5, 0.5}, {0.4, 0.5}}), Error);
  CHECK_THROWS_AS(SignalModel::from_atoms({{0.5, 0.5}, {0.5, 0.5}}), Error);  // uninformative
  CHECK_THROWS_AS(SignalModel::from_atoms({{1.0, 0.0}, {0.0, 1.0}}), Error);  // unbounded beliefs
  auto m = SignalModel::from_atoms({{0.6, 0.2}, {0.1, 0.3}, {0.3, 0.5}});
  for (std::size_t k = 0; k < m.size(); ++k) {
    const auto& a = m.atom(k);
    CHECK(m.belief(k) == Approx(a.likelihood_H / (a.likelihood_H + a.likelihood_L)));
    if (k > 0) CHECK(m.belief(k - 1) <= m.belief(k));
  }
  auto g = SignalModel::belief_grid(0.4, 0.6, 101);
  CHECK(g.size() == 101);
  CHECK(g.a() == Approx(0.4));
  CHECK(g.b() == Approx(0.6));
  CHECK(g.likelihood(State::H).sum() == Approx(1.0));
  CHECK(g.likelihood(State::L).sum() == Approx(1.0));
  CHECK_THROWS_AS(SignalModel::belief_grid(0.3, 0.6, 11), Error);
}

TEST_CASE("belief arithmetic") {
  CHECK(combine_beliefs({0.75}) == Approx(0.75));
  CHECK(combine_beliefs({0.75, 0.75, 0.25}) == Approx(0.75));
  CHECK(combine_beliefs({0.6, 0.4}) == Approx(0.5));
  CHECK_THROWS_AS(combine_beliefs({0.0, 0.5}), Error);
  CHECK_THROWS_AS(combine_beliefs({1.0}), Error);
  auto m = SignalModel::binary(0.75);
  CHECK(log_likelihood_ratio(SignalModel::from_atoms({{0.25, 0.25}, {0.5, 0.25}, {0.25, 0.5}}), 0.5) == Approx(0.0));
  CHECK(log_likelihood_ratio(m, 0.75) == Approx(std::log(3.0)));
  CHECK(log_likelihood_ratio(m, 0.25) == Approx(-std::log(3.0)));
  CHECK_THROWS_AS(log_likelihood_ratio(m, 0.6), Error);
}

TEST_CASE("combine is permutation invariant and associative") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(1 + rep % 7);
    for (auto& x : v) x = u(rng);
    double base = combine_beliefs(v);
    auto w = v;
    std::shuffle(w.begin(), w.end(), rng);
    CHECK(combine_beliefs(w) == Approx(base).epsilon(1e-12));
    std::size_t cut = v.size() / 2;
    if (cut > 0) {
      double left = combine_beliefs({v.begin(), v.begin() + static_cast<long>(cut)});
      double right = combine_beliefs({v.begin() + static_cast<long>(cut), v.end()});
      CHECK(combine_beliefs({left, right}) == Approx(base).epsilon(1e-12));
    }
  }
}

TEST_CASE("sampling frequencies match likelihoods within 4 sigma") {
  auto m = SignalModel::from_atoms({{0.5, 0.2}, {0.3, 0.3}, {0.2, 0.5}});
  const int n = 100000;
  for (State s : {State::H, State::L}) {
    Rng rng = make_stream(5, s == State::H ? 0 : 1);
    std::vector<int> count(m.size(), 0);
    for (int i = 0; i < n; ++i) ++count[m.sample_atom(s, rng)];
    for (std::size_t k = 0; k < m.size(); ++k) {
      double p = m.likelihood(s)(static_cast<Eigen::Index>(k));
      double sd = std::sqrt(p * (1 - p) / n);
      CHECK(std::fabs(count[k] / double(n) - p) < 4 * sd);
    }
  }
  auto b = SignalModel::binary(0.75);
  Rng rng = make_stream(9, 0);
  int hi = 0;
  for (int i = 0; i < n; ++i) hi += sample_belief(b, State::H, rng) == b.belief(1);
  CHECK(std::fabs(hi / double(n) - 0.75) < 4 * std::sqrt(0.75 * 0.25 / n));
  hi = 0;
  for (int i = 0; i < n; ++i) hi += sample_belief(b, State::L, rng) == b.belief(1);
  CHECK(std::fabs(hi / double(n) - 0.25) < 4 * std::sqrt(0.75 * 0.25 / n));
}

TEST_CASE("streams are reproducible and distinct") {
  Rng a = make_stream(42, 7), b = make_stream(42, 7), c = make_stream(42, 8);
  auto x = a(), y = b(), z = c();
  CHECK(x == y);
  CHECK(x != z);
}
