#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdl/netgraph.hpp"
#include "sdl/signals.hpp"

namespace sdl {

using Time = long long;
inline constexpr Time kNever = std::numeric_limits<Time>::max();

inline std::string time_string(Time t) { return t == kNever ? std::string("never") : std::to_string(t); }

/// Neighbour adoptions visible at the start of `period`, sorted by neighbour id.
struct HistoryKey {
  Time period = 0;
  std::vector<std::pair<std::size_t, Time>> adopted;

  auto operator<=>(const HistoryKey&) const = default;
  bool operator==(const HistoryKey&) const = default;

  /// Same history seen one or more periods earlier (drops times >= p).
  HistoryKey truncated(Time p) const;
  std::string str() const;
  static HistoryKey parse(const std::string& s);
};

/**
 * What agent `agent` may see when deciding in period `period`: its own
 * belief (and atom index) and neighbour adoption times strictly before
 * `period`.
 */
class AgentView {
 public:
  AgentView(const Network& g, std::size_t agent, Time period, double belief, std::size_t atom,
            const std::vector<Time>& times)
      : g_(&g), agent_(agent), period_(period), belief_(belief), atom_(atom), times_(&times) {}

  std::size_t agent() const { return agent_; }
  Time period() const { return period_; }
  double belief() const { return belief_; }
  std::size_t atom() const { return atom_; }
  const std::vector<std::size_t>& neighbors() const { return g_->neighbors(agent_); }
  const Network& network() const { return *g_; }

  /// Adoption time of neighbour j if before period(), else kNever.
  /// Throws StrategyViolation for non-neighbours.
  Time neighbor_time(std::size_t j) const;
  bool any_neighbor_adopted_at(Time t) const;
  HistoryKey history() const;

 private:
  const Network* g_;
  std::size_t agent_;
  Time period_;
  double belief_;
  std::size_t atom_;
  const std::vector<Time>* times_;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  /// Probability of adopting now, given the agent has not adopted yet.
  virtual double adopt_probability(const AgentView& v) const = 0;
  /// Never adopts after period 0 unless a neighbour adopted in the previous period.
  virtual bool adoption_triggered() const { return false; }
  virtual Time last_active_period() const { return kNever; }
  /// True if, with no further neighbour adoptions, the agent never adopts from v.period() on.
  virtual bool dormant(const AgentView& v) const;
  virtual std::string name() const = 0;
};

using StrategyPtr = std::shared_ptr<const Strategy>;
using Profile = std::vector<StrategyPtr>;

Profile uniform_profile(std::size_t n, StrategyPtr s);

struct ThresholdEntry {
  double threshold = 1.0;
  double mix = 0.0;
  bool operator==(const ThresholdEntry&) const = default;
};

/**
 * Adopt iff belief > threshold, with probability `mix` when belief equals
 * the threshold. Missing entries mean "do not adopt".
 */
class ThresholdTable : public Strategy {
 public:
  static constexpr std::size_t kAnyAgent = std::numeric_limits<std::size_t>::max();

  void set(std::size_t agent, const HistoryKey& key, ThresholdEntry e);
  std::optional<ThresholdEntry> find(std::size_t agent, const HistoryKey& key) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::pair<std::size_t, HistoryKey>, ThresholdEntry>& entries() const { return entries_; }

  double adopt_probability(const AgentView& v) const override;
  bool adoption_triggered() const override;
  Time last_active_period() const override;
  std::string name() const override { return "threshold-table"; }

  void save(std::ostream& out) const;
  static ThresholdTable load(std::istream& in);
  static ThresholdTable load_file(const std::string& path);

 private:
  std::map<std::pair<std::size_t, HistoryKey>, ThresholdEntry> entries_;
};

inline bool threshold_adopts(double belief, const ThresholdEntry& e, double* prob = nullptr) {
  double p = belief > e.threshold ? 1.0 : (belief == e.threshold ? e.mix : 0.0);
  if (prob) *prob = p;
  return p > 0;
}

/// Adopt at period 0 iff belief >= 1/2, never afterwards.
std::shared_ptr<ThresholdTable> myopic_rule(const SignalModel& model);

class NeverStrategy : public Strategy {
 public:
  double adopt_probability(const AgentView&) const override { return 0.0; }
  bool adoption_triggered() const override { return true; }
  Time last_active_period() const override { return -1; }
  std::string name() const override { return "never"; }
};

class FunctionStrategy : public Strategy {
 public:
  using Fn = std::function<double(const AgentView&)>;
  FunctionStrategy(Fn fn, std::string name, bool triggered = false, Time last_active = kNever)
      : fn_(std::move(fn)), name_(std::move(name)), triggered_(triggered), last_(last_active) {}
  double adopt_probability(const AgentView& v) const override { return fn_(v); }
  bool adoption_triggered() const override { return triggered_; }
  Time last_active_period() const override { return last_; }
  std::string name() const override { return name_; }

 private:
  Fn fn_;
  std::string name_;
  bool triggered_;
  Time last_;
};

/// Adopt one period after the first adoption among the agent's tree neighbours.
class FollowTreeNeighbors : public Strategy {
 public:
  explicit FollowTreeNeighbors(Network tree) : tree_(std::move(tree)) {}
  double adopt_probability(const AgentView& v) const override;
  bool adoption_triggered() const override { return true; }
  std::string name() const override { return "follow-tree"; }

 private:
  Network tree_;
};

StrategyPtr follow_tree_neighbors(const Network& tree);

struct SigmaParams {
  double eta = 1e-3;
  long long k = 50;
  double qH = 0.75;  // P[x_i = 1 | H]
  double qL = 0.25;  // P[x_i = 1 | L]
  bool two_sided = false;
};

SigmaParams sigma_params(const SignalModel& model, double eta, long long k, bool two_sided = false);

/// Adoption time implied by the left neighbour's time under sigma(eta, k).
Time sigma_eta_k_step(Time tau_prev, int x, long long k, double qH, double qL);

/**
 * The line protocol sigma(eta, k). Agent i's left neighbour is i-1 (cyclic on
 * rings). Period-0 adoption is random with probability eta, or exactly the
 * `forced` set when one is given.
 */
class SigmaProtocol : public Strategy {
 public:
  SigmaProtocol(SigmaParams p, std::size_t line_size, bool ring, std::optional<std::vector<std::size_t>> forced = {});
  double adopt_probability(const AgentView& v) const override;
  bool dormant(const AgentView& v) const override;
  std::string name() const override { return "sigma"; }
  const SigmaParams& params() const { return p_; }
  /// Target time from the currently visible history, kNever if none.
  Time target(const AgentView& v) const;

 private:
  SigmaParams p_;
  std::size_t n_;
  bool ring_;
  std::vector<char> forced_;
  bool has_forced_;
};

/// Root strategy of the auxiliary model run in discrete time.
struct AuxDiscreteSpec {
  int family = 1;          // 1 or 2
  Time r_index = 0;        // r = 1 - delta^r_index; kNever means r = 1
  std::size_t child1 = 1;
  std::size_t child2 = 2;
};

class AuxDiscreteStrategy : public Strategy {
 public:
  explicit AuxDiscreteStrategy(AuxDiscreteSpec s);
  double adopt_probability(const AgentView& v) const override;
  bool dormant(const AgentView& v) const override;
  std::string name() const override { return "aux-family" + std::to_string(spec_.family); }
  const AuxDiscreteSpec& spec() const { return spec_; }

 private:
  AuxDiscreteSpec spec_;
};

/// Discrete period for continuous time a: ceil(log(1-a)/log(delta) + 1), never for a >= 1.
Time discrete_period(double a, double delta);

/// Snap r down onto {1 - delta^n} u {1}; sets *snapped when r was off-grid.
Time snap_r_index(double r, double delta, bool* snapped = nullptr);

StrategyPtr aux_to_discrete(const AuxDiscreteSpec& s);

}  // namespace sdl
