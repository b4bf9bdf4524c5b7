#include "sdl/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sdl/error.hpp"

namespace sdl {

HistoryKey HistoryKey::truncated(Time p) const {
  HistoryKey k{p, {}};
  for (auto& pr : adopted)
    if (pr.second < p) k.adopted.push_back(pr);
  return k;
}

std::string HistoryKey::str() const {
  std::string s = std::to_string(period) + ":";
  if (adopted.empty()) return s + "-";
  for (std::size_t i = 0; i < adopted.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(adopted[i].first) + "@" + std::to_string(adopted[i].second);
  }
  return s;
}

HistoryKey HistoryKey::parse(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::Parse, "history key missing ':' in '" + s + "'");
  HistoryKey k;
  try {
    k.period = std::stoll(s.substr(0, colon));
    std::string rest = s.substr(colon + 1);
    if (rest != "-") {
      std::stringstream ss(rest);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto at = item.find('@');
        if (at == std::string::npos) throw Error(ErrorKind::Parse, "bad history item '" + item + "'");
        k.adopted.emplace_back(std::stoull(item.substr(0, at)), std::stoll(item.substr(at + 1)));
      }
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::Parse, "bad history key '" + s + "'");
  }
  std::sort(k.adopted.begin(), k.adopted.end());
  return k;
}

Time AgentView::neighbor_time(std::size_t j) const {
  if (!g_->observes(agent_, j))
    throw Error(ErrorKind::StrategyViolation,
                "agent " + std::to_string(agent_) + " consulted non-neighbour " + std::to_string(j));
  Time t = (*times_)[j];
  return t < period_ ? t : kNever;
}

bool AgentView::any_neighbor_adopted_at(Time t) const {
  if (t >= period_) return false;
  for (auto j : neighbors())
    if ((*times_)[j] == t) return true;
  return false;
}

HistoryKey AgentView::history() const {
  HistoryKey k{period_, {}};
  for (auto j : neighbors()) {
    Time t = (*times_)[j];
    if (t < period_) k.adopted.emplace_back(j, t);
  }
  return k;
}

bool Strategy::dormant(const AgentView& v) const {
  if (v.period() > last_active_period()) return true;
  if (adoption_triggered() && v.period() > 0) return !v.any_neighbor_adopted_at(v.period() - 1);
  return false;
}

Profile uniform_profile(std::size_t n, StrategyPtr s) { return Profile(n, std::move(s)); }

// ---------------------------------------------------------------- tables

void ThresholdTable::set(std::size_t agent, const HistoryKey& key, ThresholdEntry e) {
  if (!(e.threshold >= 0 && e.threshold <= 1) || !(e.mix >= 0 && e.mix <= 1))
    throw Error(ErrorKind::InvalidParameter, "threshold and mix must lie in [0,1]");
  entries_[{agent, key}] = e;
}

std::optional<ThresholdEntry> ThresholdTable::find(std::size_t agent, const HistoryKey& key) const {
  if (auto it = entries_.find({agent, key}); it != entries_.end()) return it->second;
  if (auto it = entries_.find({kAnyAgent, key}); it != entries_.end()) return it->second;
  return std::nullopt;
}

double ThresholdTable::adopt_probability(const AgentView& v) const {
  auto e = find(v.agent(), v.history());
  if (!e) return 0.0;
  double p = 0;
  threshold_adopts(v.belief(), *e, &p);
  return p;
}

bool ThresholdTable::adoption_triggered() const {
  for (const auto& [k, e] : entries_) {
    const auto& key = k.second;
    if (key.period == 0 || e.threshold >= 1) continue;
    bool fresh = std::any_of(key.adopted.begin(), key.adopted.end(),
                             [&](const auto& pr) { return pr.second == key.period - 1; });
    if (!fresh) return false;
  }
  return true;
}

Time ThresholdTable::last_active_period() const {
  Time last = -1;
  for (const auto& [k, e] : entries_)
    if (e.threshold < 1) last = std::max(last, k.second.period);
  return last;
}

void ThresholdTable::save(std::ostream& out) const {
  out << "# agent\thistory\tthreshold\tmix\n";
  char buf[64];
  for (const auto& [k, e] : entries_) {
    if (k.first == kAnyAgent)
      out << '*';
    else
      out << k.first;
    out << '\t' << k.second.str();
    std::snprintf(buf, sizeof buf, "\t%.17g\t%.17g\n", e.threshold, e.mix);
    out << buf;
  }
}

ThresholdTable ThresholdTable::load(std::istream& in) {
  ThresholdTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string agent, key;
    double thr, mix;
    if (!(ls >> agent >> key >> thr >> mix))
      throw Error(ErrorKind::Parse, "threshold table line " + std::to_string(lineno));
    std::size_t a = kAnyAgent;
    if (agent != "*") {
      try {
        a = std::stoull(agent);
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::Parse, "bad agent id '" + agent + "'");
      }
    }
    t.set(a, HistoryKey::parse(key), {thr, mix});
  }
  return t;
}

ThresholdTable ThresholdTable::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Validation, "cannot open threshold table " + path);
  return load(f);
}

std::shared_ptr<ThresholdTable> myopic_rule(const SignalModel&) {
  auto t = std::make_shared<ThresholdTable>();
  t->set(ThresholdTable::kAnyAgent, HistoryKey{0, {}}, {0.5, 1.0});
  return t;
}

// ------------------------------------------------------------ imitation

double FollowTreeNeighbors::adopt_probability(const AgentView& v) const {
  if (v.period() == 0) return 0.0;
  for (auto j : tree_.neighbors(v.agent()))
    if (v.neighbor_time(j) != kNever) return 1.0;
  return 0.0;
}

StrategyPtr follow_tree_neighbors(const Network& tree) { return std::make_shared<FollowTreeNeighbors>(tree); }

// ---------------------------------------------------------------- sigma

SigmaParams sigma_params(const SignalModel& model, double eta, long long k, bool two_sided) {
  SigmaParams p;
  p.eta = eta;
  p.k = k;
  p.two_sided = two_sided;
  p.qH = p.qL = 0;
  for (std::size_t a = 0; a < model.size(); ++a)
    if (model.belief(a) >= 0.5) {
      p.qH += model.atom(a).likelihood_H;
      p.qL += model.atom(a).likelihood_L;
    }
  return p;
}

Time sigma_eta_k_step(Time tau_prev, int x, long long k, double qH, double qL) {
  if (k < 3) throw Error(ErrorKind::InvalidParameter, "sigma protocol needs k >= 3");
  if (tau_prev == kNever) return kNever;
  const Time lo = (k - 1) * k, hi = k * k;
  if (tau_prev < lo) return tau_prev + k + x;
  if (tau_prev >= hi) return tau_prev + 1;
  // (tau - (k-1)k + x)/k > (qH + qL)/2
  if (2.0 * static_cast<double>(tau_prev - lo + x) > static_cast<double>(k) * (qH + qL)) return hi;
  return kNever;
}

SigmaProtocol::SigmaProtocol(SigmaParams p, std::size_t line_size, bool ring,
                             std::optional<std::vector<std::size_t>> forced)
    : p_(p), n_(line_size), ring_(ring), forced_(line_size, 0), has_forced_(forced.has_value()) {
  if (p_.k < 3) throw Error(ErrorKind::InvalidParameter, "sigma protocol needs k >= 3");
  if (!has_forced_ && !(p_.eta > 0 && p_.eta < 1))
    throw Error(ErrorKind::InvalidParameter, "sigma protocol needs eta in (0,1)");
  if (forced)
    for (auto i : *forced) forced_.at(i) = 1;
}

Time SigmaProtocol::target(const AgentView& v) const {
  const std::size_t i = v.agent();
  const int x = v.belief() >= 0.5 ? 1 : 0;
  Time left = kNever, right = kNever;
  if (i > 0 || ring_) left = v.neighbor_time(i > 0 ? i - 1 : n_ - 1);
  if (p_.two_sided && (i + 1 < n_ || ring_)) right = v.neighbor_time(i + 1 < n_ ? i + 1 : 0);
  if (left == kNever && right == kNever) return kNever;
  // the side whose neighbour adopted first decides; ties go left
  Time trigger = right < left ? right : left;
  return sigma_eta_k_step(trigger, x, p_.k, p_.qH, p_.qL);
}

double SigmaProtocol::adopt_probability(const AgentView& v) const {
  if (v.period() == 0) return has_forced_ ? (forced_[v.agent()] ? 1.0 : 0.0) : p_.eta;
  return target(v) == v.period() ? 1.0 : 0.0;
}

bool SigmaProtocol::dormant(const AgentView& v) const {
  if (v.period() == 0) return false;
  Time t = target(v);
  return t == kNever || t < v.period();
}

// ------------------------------------------------------------ auxiliary

AuxDiscreteStrategy::AuxDiscreteStrategy(AuxDiscreteSpec s) : spec_(s) {
  if (s.family != 1 && s.family != 2) throw Error(ErrorKind::InvalidParameter, "aux family must be 1 or 2");
  if (s.r_index < 0) throw Error(ErrorKind::InvalidParameter, "r index must be >= 0");
  if (s.child1 == s.child2) throw Error(ErrorKind::InvalidParameter, "aux strategy needs two distinct children");
}

double AuxDiscreteStrategy::adopt_probability(const AgentView& v) const {
  const Time t = v.period(), n = spec_.r_index;
  const Time t1 = v.neighbor_time(spec_.child1), t2 = v.neighbor_time(spec_.child2);
  if (t == 0) return 0.0;
  if (spec_.family == 1) {
    if (n == kNever || t1 == kNever) return 0.0;
    if (t1 > n) return t == t1 + 1 ? 1.0 : 0.0;
    if (t2 == kNever) return 0.0;
    return t == std::max(t2, n) + 1 ? 1.0 : 0.0;
  }
  if (n != kNever && t == n + 1 && t1 == kNever && t2 != kNever && v.belief() > 0.5) return 1.0;
  return (t1 != kNever && t == t1 + 1) ? 1.0 : 0.0;
}

bool AuxDiscreteStrategy::dormant(const AgentView& v) const {
  const Time t = v.period(), n = spec_.r_index;
  const Time t1 = v.neighbor_time(spec_.child1), t2 = v.neighbor_time(spec_.child2);
  auto pending = [t](Time target) { return target >= t; };
  if (spec_.family == 1) {
    if (n == kNever || t1 == kNever) return true;
    if (t1 > n) return !pending(t1 + 1);
    return t2 == kNever || !pending(std::max(t2, n) + 1);
  }
  if (t1 != kNever) return !pending(t1 + 1);
  return !(n != kNever && t2 != kNever && v.belief() > 0.5 && pending(n + 1));
}

Time discrete_period(double a, double delta) {
  if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidParameter, "delta must lie in (0,1)");
  if (a >= 1) return kNever;
  if (a < 0) throw Error(ErrorKind::InvalidParameter, "continuous time must lie in [0,1]");
  double x = std::log1p(-a) / std::log(delta) + 1.0;
  double r = std::round(x);
  if (std::fabs(x - r) < 1e-9) return static_cast<Time>(r);
  return static_cast<Time>(std::ceil(x));
}

Time snap_r_index(double r, double delta, bool* snapped) {
  if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidParameter, "delta must lie in (0,1)");
  if (snapped) *snapped = false;
  if (r >= 1) return kNever;
  if (r <= 0) {
    if (snapped && r < 0) *snapped = true;
    return 0;
  }
  double n = std::log1p(-r) / std::log(delta);
  double nr = std::round(n);
  if (std::fabs(n - nr) < 1e-9) return static_cast<Time>(nr);
  if (snapped) *snapped = true;
  return static_cast<Time>(std::floor(n));
}

StrategyPtr aux_to_discrete(const AuxDiscreteSpec& s) { return std::make_shared<AuxDiscreteStrategy>(s); }

}  // namespace sdl
