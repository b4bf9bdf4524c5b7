#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sdl {

using Edge = std::pair<std::size_t, std::size_t>;  // (i, j): i observes j

/// How a finite network stands in for an infinite one.
enum class Boundary { None, Ring, Absorbing };

const char* to_string(Boundary b);

/**
 * Immutable observation graph. neighbors(i) is N_i, the sorted set of agents
 * that i observes.
 */
class Network {
 public:
  Network() = default;
  Network(std::size_t n, const std::vector<Edge>& edges, std::string label = {},
          Boundary boundary = Boundary::None, std::vector<std::size_t> infinite_ends = {});

  std::size_t size() const { return out_.size(); }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return out_.at(i); }
  const std::vector<std::size_t>& observers(std::size_t i) const { return in_.at(i); }
  std::size_t out_degree(std::size_t i) const { return out_.at(i).size(); }
  bool observes(std::size_t i, std::size_t j) const;
  std::size_t edge_count() const { return edge_count_; }
  std::vector<Edge> edges() const;

  const std::string& label() const { return label_; }
  Boundary boundary() const { return boundary_; }
  /// Degree-1 vertices flagged as continuing to infinity.
  const std::vector<std::size_t>& infinite_ends() const { return ends_; }

 private:
  std::vector<std::vector<std::size_t>> out_, in_;
  std::size_t edge_count_ = 0;
  std::string label_;
  Boundary boundary_ = Boundary::None;
  std::vector<std::size_t> ends_;
};

struct ComponentReport {
  std::vector<std::size_t> agents;
  bool is_tree = false;
  std::size_t M = 0;
  std::size_t ends = 0;
  std::size_t max_degree = 0;
};

struct StructureReport {
  bool is_undirected = false;
  bool is_tree = false;
  bool connected = false;
  std::size_t M = 0;
  std::size_t ends = 0;
  std::size_t max_degree = 0;
  std::vector<ComponentReport> components;  // one entry per weak component
};

/// Directed mode: agent i observes i-1. Non-ring lines mark both ends infinite.
Network build_line(std::size_t n, bool directed, bool ring);
/// Root 0; each internal agent observes its d children.
Network build_directed_tree(std::size_t d, std::size_t depth);
/// Agent 0 is the centre. Directed mode: the centre observes the leaves only.
Network build_star(std::size_t leaves, bool directed);
Network build_spontaneous_example();

/// Agent ids in build_spontaneous_example().
struct SpontaneousLayout {
  static constexpr std::size_t a1 = 0, a2 = 1;
  static constexpr std::size_t b_first = 2, b_count = 100;
  static constexpr std::size_t c_first = 102, c_count = 10;
  static constexpr std::size_t d = 112, e = 113, f = 114;
  static constexpr std::size_t size = 115;
};

StructureReport analyze(const Network& g);

/// Relabel: agent i becomes perm[i].
Network permute(const Network& g, const std::vector<std::size_t>& perm);

/// Directed hop distance from src along observation edges; SIZE_MAX if unreachable.
std::vector<std::size_t> observation_distances(const Network& g, std::size_t src);

/// Edge-list text: optional "n K" header line, then "i j" per line, '#' comments.
Network load_edge_list(std::istream& in, std::string label = {});
Network load_edge_list_file(const std::string& path);
void save_edge_list(const Network& g, std::ostream& out);

}  // namespace sdl
