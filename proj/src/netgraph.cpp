#include "sdl/netgraph.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "sdl/error.hpp"

namespace sdl {

const char* to_string(Boundary b) {
  switch (b) {
    case Boundary::None: return "none";
    case Boundary::Ring: return "ring";
    case Boundary::Absorbing: return "absorbing";
  }
  return "none";
}

Network::Network(std::size_t n, const std::vector<Edge>& edges, std::string label,
                 Boundary boundary, std::vector<std::size_t> infinite_ends)
    : out_(n), in_(n), label_(std::move(label)), boundary_(boundary), ends_(std::move(infinite_ends)) {
  if (n == 0) throw Error(ErrorKind::InvalidSize, "network needs at least one agent");
  for (auto [i, j] : edges) {
    if (i >= n || j >= n)
      throw Error(ErrorKind::Validation, "edge (" + std::to_string(i) + "," + std::to_string(j) +
                                             ") out of range for n=" + std::to_string(n));
    if (i == j) throw Error(ErrorKind::Validation, "self-loop at " + std::to_string(i));
    out_[i].push_back(j);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = out_[i];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    edge_count_ += v.size();
    for (auto j : v) in_[j].push_back(i);
  }
  std::sort(ends_.begin(), ends_.end());
  ends_.erase(std::unique(ends_.begin(), ends_.end()), ends_.end());
  for (auto e : ends_)
    if (e >= n) throw Error(ErrorKind::Validation, "infinite-end marker out of range");
}

bool Network::observes(std::size_t i, std::size_t j) const {
  const auto& v = out_.at(i);
  return std::binary_search(v.begin(), v.end(), j);
}

std::vector<Edge> Network::edges() const {
  std::vector<Edge> e;
  e.reserve(edge_count_);
  for (std::size_t i = 0; i < out_.size(); ++i)
    for (auto j : out_[i]) e.emplace_back(i, j);
  return e;
}

Network build_line(std::size_t n, bool directed, bool ring) {
  if (n == 0) throw Error(ErrorKind::InvalidSize, "line needs n >= 1");
  std::vector<Edge> e;
  for (std::size_t i = 1; i < n; ++i) {
    e.emplace_back(i, i - 1);
    if (!directed) e.emplace_back(i - 1, i);
  }
  if (ring && n >= 2) {
    e.emplace_back(0, n - 1);
    if (!directed) e.emplace_back(n - 1, 0);
  }
  std::string label = std::string(directed ? "directed-" : "") + (ring ? "ring-" : "line-") + std::to_string(n);
  if (ring) return Network(n, e, label, Boundary::Ring);
  std::vector<std::size_t> ends;
  if (n > 1) ends = {0, n - 1};
  return Network(n, e, label, Boundary::Absorbing, ends);
}

Network build_directed_tree(std::size_t d, std::size_t depth) {
  if (d < 2) throw Error(ErrorKind::InvalidBranching, "branching factor must be >= 2");
  std::size_t n = 1, layer = 1;
  for (std::size_t k = 0; k < depth; ++k) {
    layer *= d;
    n += layer;
  }
  std::vector<Edge> e;
  // breadth-first numbering: children of i are d*i+1 .. d*i+d
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 1; c <= d; ++c)
      if (d * i + c < n) e.emplace_back(i, d * i + c);
  return Network(n, e, "tree-d" + std::to_string(d) + "-depth" + std::to_string(depth));
}

Network build_star(std::size_t leaves, bool directed) {
  std::vector<Edge> e;
  for (std::size_t k = 1; k <= leaves; ++k) {
    e.emplace_back(0, k);
    if (!directed) e.emplace_back(k, 0);
  }
  return Network(leaves + 1, e, std::string(directed ? "directed-" : "") + "star-" + std::to_string(leaves));
}

Network build_spontaneous_example() {
  using L = SpontaneousLayout;
  std::vector<Edge> e;
  for (std::size_t b = L::b_first; b < L::b_first + L::b_count; ++b) {
    e.emplace_back(b, L::a1);
    e.emplace_back(b, L::a2);
    e.emplace_back(L::f, b);
  }
  e.emplace_back(L::e, L::a1);
  e.emplace_back(L::e, L::a2);
  e.emplace_back(L::d, L::e);
  e.emplace_back(L::f, L::d);
  for (std::size_t c = L::c_first; c < L::c_first + L::c_count; ++c) e.emplace_back(L::f, c);
  return Network(L::size, e, "spontaneous-example");
}

StructureReport analyze(const Network& g) {
  const std::size_t n = g.size();
  if (n == 0) throw Error(ErrorKind::InvalidSize, "empty network");
  std::vector<std::set<std::size_t>> sym(n);
  bool undirected = true;
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : g.neighbors(i)) {
      sym[i].insert(j);
      sym[j].insert(i);
      if (!g.observes(j, i)) undirected = false;
    }
  std::vector<char> is_end(n, 0);
  for (auto e : g.infinite_ends()) is_end[e] = 1;
  const bool marked = !g.infinite_ends().empty();

  StructureReport rep;
  rep.is_undirected = undirected;
  std::vector<int> comp(n, -1);
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    ComponentReport c;
    std::queue<std::size_t> q;
    q.push(s);
    comp[s] = static_cast<int>(rep.components.size());
    std::size_t undirected_edges = 0;
    while (!q.empty()) {
      auto v = q.front();
      q.pop();
      c.agents.push_back(v);
      undirected_edges += sym[v].size();
      for (auto w : sym[v])
        if (comp[w] < 0) {
          comp[w] = comp[s];
          q.push(w);
        }
    }
    std::sort(c.agents.begin(), c.agents.end());
    undirected_edges /= 2;
    c.is_tree = undirected_edges + 1 == c.agents.size();
    c.M = 1;
    for (auto v : c.agents) {
      const std::size_t deg = sym[v].size();
      c.max_degree = std::max(c.max_degree, deg);
      if (deg > 2) c.M += deg - 2;
      if (marked ? (is_end[v] && deg <= 1) : (c.is_tree && deg == 1)) ++c.ends;
    }
    rep.components.push_back(std::move(c));
  }
  rep.connected = rep.components.size() == 1;
  rep.is_tree = rep.connected && rep.components[0].is_tree;
  for (const auto& c : rep.components) {
    rep.M = std::max(rep.M, c.M);
    rep.ends += c.ends;
    rep.max_degree = std::max(rep.max_degree, c.max_degree);
  }
  if (rep.connected) rep.M = rep.components[0].M;
  return rep;
}

Network permute(const Network& g, const std::vector<std::size_t>& perm) {
  if (perm.size() != g.size()) throw Error(ErrorKind::InvalidSize, "permutation size mismatch");
  std::vector<Edge> e;
  for (auto [i, j] : g.edges()) e.emplace_back(perm[i], perm[j]);
  std::vector<std::size_t> ends;
  for (auto v : g.infinite_ends()) ends.push_back(perm[v]);
  return Network(g.size(), e, g.label(), g.boundary(), ends);
}

std::vector<std::size_t> observation_distances(const Network& g, std::size_t src) {
  std::vector<std::size_t> dist(g.size(), std::numeric_limits<std::size_t>::max());
  std::queue<std::size_t> q;
  dist.at(src) = 0;
  q.push(src);
  while (!q.empty()) {
    auto v = q.front();
    q.pop();
    for (auto w : g.neighbors(v))
      if (dist[w] == std::numeric_limits<std::size_t>::max()) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
  }
  return dist;
}

Network load_edge_list(std::istream& in, std::string label) {
  std::vector<Edge> edges;
  std::size_t declared = 0, max_id = 0;
  bool have_n = false, any = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;
    auto where = " at line " + std::to_string(lineno);
    if (!(ls >> b) || (ls >> extra)) throw Error(ErrorKind::Parse, "expected two fields" + where);
    auto parse_id = [&](const std::string& s) {
      if (s.empty() || !std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
        throw Error(ErrorKind::Parse, "not a nonnegative integer '" + s + "'" + where);
      return static_cast<std::size_t>(std::stoull(s));
    };
    if (a == "n") {
      if (have_n || any) throw Error(ErrorKind::Parse, "agent-count line must come first" + where);
      declared = parse_id(b);
      have_n = true;
      continue;
    }
    auto i = parse_id(a), j = parse_id(b);
    edges.emplace_back(i, j);
    max_id = std::max({max_id, i, j});
    any = true;
  }
  std::size_t n = have_n ? declared : (any ? max_id + 1 : 0);
  if (n == 0) throw Error(ErrorKind::InvalidSize, "edge list declares no agents");
  return Network(n, edges, std::move(label));
}

Network load_edge_list_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Validation, "cannot open edge list " + path);
  return load_edge_list(f, path);
}

void save_edge_list(const Network& g, std::ostream& out) {
  out << "n " << g.size() << '\n';
  for (auto [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

}  // namespace sdl
