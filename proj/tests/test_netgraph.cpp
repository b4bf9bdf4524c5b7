#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "sdl/error.hpp"
#include "sdl/netgraph.hpp"

using namespace sdl;

namespace {

Network undirected(std::size_t n, const std::vector<Edge>& es) {
  std::vector<Edge> both;
  for (auto [a, b] : es) {
    both.emplace_back(a, b);
    both.emplace_back(b, a);
  }
  return Network(n, both);
}

// brute-force oracle: M from the symmetrised degree sequence
std::size_t m_oracle(const Network& g) {
  std::vector<std::set<std::size_t>> nb(g.size());
  for (auto [i, j] : g.edges()) {
    nb[i].insert(j);
    nb[j].insert(i);
  }
  std::size_t m = 1;
  for (const auto& s : nb) m += s.size() > 2 ? s.size() - 2 : 0;
  return m;
}

}  // namespace

TEST_CASE("line construction") {
  auto g = build_line(3, false, false);
  std::vector<Edge> want{{0, 1}, {1, 0}, {1, 2}, {2, 1}};
  CHECK(g.edges() == want);
  CHECK(build_line(1, false, false).edge_count() == 0);
  auto ring = build_line(5, false, true);
  for (std::size_t i = 0; i < 5; ++i) CHECK(ring.out_degree(i) == 2);
  CHECK(ring.boundary() == Boundary::Ring);
  CHECK_THROWS_AS(build_line(0, false, false), Error);
  auto d = build_line(4, true, false);
  CHECK(d.observes(1, 0));
  CHECK_FALSE(d.observes(0, 1));
}

TEST_CASE("directed trees") {
  auto t = build_directed_tree(2, 2);
  CHECK(t.size() == 7);
  CHECK(t.out_degree(0) == 2);
  CHECK(build_directed_tree(3, 1).size() == 4);
  CHECK(build_directed_tree(2, 0).size() == 1);
  CHECK(build_directed_tree(2, 0).edge_count() == 0);
  CHECK_THROWS_AS(build_directed_tree(1, 3), Error);
  for (std::size_t d : {2, 3, 4})
    for (std::size_t depth = 0; depth <= 6; ++depth) {
      auto g = build_directed_tree(d, depth);
      std::size_t nodes = 0, p = 1;
      for (std::size_t l = 0; l <= depth; ++l, p *= d) nodes += p;
      CHECK(g.size() == nodes);
      CHECK(g.edge_count() == nodes - 1);
      std::size_t internal = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK((g.out_degree(i) == 0 || g.out_degree(i) == d));
        internal += g.out_degree(i) == d;
        CHECK(g.observers(i).size() == (i == 0 ? 0u : 1u));
      }
      CHECK(internal * d == nodes - 1);
    }
}

TEST_CASE("spontaneous example network") {
  auto g = build_spontaneous_example();
  using L = SpontaneousLayout;
  CHECK(g.size() == 115);
  CHECK(g.out_degree(L::f) == 111);
  for (std::size_t b = L::b_first; b < L::b_first + L::b_count; ++b) {
    CHECK(g.out_degree(b) == 2);
    CHECK(g.observes(b, L::a1));
    CHECK(g.observes(b, L::a2));
  }
  for (std::size_t c = L::c_first; c < L::c_first + L::c_count; ++c) CHECK(g.out_degree(c) == 0);
  CHECK(g.out_degree(L::a1) == 0);
  CHECK(g.out_degree(L::a2) == 0);
  CHECK(g.out_degree(L::e) == 2);
  CHECK(g.neighbors(L::d) == std::vector<std::size_t>{L::e});
  CHECK(g.observes(L::f, L::d));
}

TEST_CASE("structure analysis") {
  CHECK(analyze(build_line(10, false, false)).M == 1);
  auto fig = undirected(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {2, 5}});
  auto r = analyze(fig);
  CHECK(r.M == 2);
  CHECK(r.is_tree);
  CHECK(r.ends == 3);  // unmarked finite tree: leaves
  CHECK(analyze(build_star(4, false)).M == 3);
  for (std::size_t n = 1; n <= 12; ++n) {
    auto rep = analyze(build_line(n, false, false));
    CHECK(rep.is_tree);
    CHECK(rep.is_undirected);
    CHECK(rep.ends == (n == 1 ? 0u : 2u));
  }
  CHECK_FALSE(analyze(build_line(6, false, true)).is_tree);
  auto two = undirected(5, {{0, 1}, {2, 3}, {3, 4}});
  auto rr = analyze(two);
  CHECK_FALSE(rr.connected);
  CHECK(rr.components.size() == 2);
  CHECK_FALSE(analyze(build_directed_tree(2, 2)).is_undirected);
  CHECK(analyze(build_directed_tree(2, 2)).is_tree);
  CHECK(analyze(build_spontaneous_example()).M == m_oracle(build_spontaneous_example()));
}

TEST_CASE("M is invariant under relabelling") {
  std::mt19937_64 rng(11);
  std::vector<Network> cases{build_directed_tree(3, 3), build_star(7, false), build_spontaneous_example(),
                             undirected(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {2, 5}})};
  for (const auto& g : cases)
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<std::size_t> perm(g.size());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      auto h = permute(g, perm);
      CHECK(analyze(h).M == analyze(g).M);
      CHECK(analyze(h).M == m_oracle(h));
      CHECK(h.edge_count() == g.edge_count());
    }
}

TEST_CASE("edge list round trip") {
  std::istringstream in("# comment\n0 1\n1 0\n1 2\n0 1\n");
  auto g = load_edge_list(in);
  CHECK(g.size() == 3);
  CHECK(g.edge_count() == 3);
  std::ostringstream out;
  save_edge_list(g, out);
  std::istringstream back(out.str());
  auto h = load_edge_list(back);
  CHECK(h.edges() == g.edges());
  CHECK(h.size() == g.size());
  std::istringstream bad("0 x\n");
  CHECK_THROWS_AS(load_edge_list(bad), Error);
  std::istringstream loop("1 1\n");
  CHECK_THROWS_AS(load_edge_list(loop), Error);
}
