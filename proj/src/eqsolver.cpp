#include "sdl/eqsolver.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sdl/error.hpp"

namespace sdl {

template <class Scalar>
ExactModel<Scalar> ExactModel<Scalar>::from(const SignalModel& m) {
  ExactModel e;
  e.nu_H = m.likelihood_as<Scalar>(State::H);
  e.nu_L = m.likelihood_as<Scalar>(State::L);
  for (std::size_t k = 0; k < m.size(); ++k) e.belief.push_back(m.belief(k));
  return e;
}

template <class Scalar>
Scalar DecisionProfile<Scalar>::adopt(std::size_t agent, const HistoryKey& key, std::size_t atom) const {
  const auto& r = rules.at(agent);
  auto it = r.find(key);
  if (it == r.end()) return Scalar(0);
  return it->second.adopt.at(atom);
}

template <class Scalar>
Policy<Scalar> DecisionProfile<Scalar>::policy() const {
  return [this](std::size_t i, const HistoryKey& k, std::size_t a) { return adopt(i, k, a); };
}

template <class Scalar>
DecisionProfile<Scalar> myopic_decisions(const Network& g, const SignalModel& m) {
  DecisionProfile<Scalar> p(g.size());
  RuleEntry<Scalar> e;
  for (std::size_t k = 0; k < m.size(); ++k) {
    e.adopt.push_back(m.belief(k) >= 0.5 ? Scalar(1) : Scalar(0));
    e.live.push_back(1);
  }
  for (auto& r : p.rules) r[HistoryKey{0, {}}] = e;
  return p;
}

template <class Scalar>
Policy<Scalar> policy_from_profile(const Network& g, const SignalModel& m, const Profile& prof) {
  if (prof.size() != g.size()) throw Error(ErrorKind::InvalidSize, "profile must cover every agent");
  return [&g, &m, prof](std::size_t i, const HistoryKey& k, std::size_t a) {
    std::vector<Time> times(g.size(), kNever);
    for (auto [j, t] : k.adopted) times[j] = t;
    AgentView v(g, i, k.period, m.belief(a), a, times);
    double p = prof[i]->adopt_probability(v);
    if (p <= 0) return Scalar(0);
    if (p >= 1) return Scalar(1);
    return from_double<Scalar>(p);
  };
}

namespace {

HistoryKey key_of(const Network& g, std::size_t i, Time t, const std::vector<Time>& times) {
  HistoryKey k{t, {}};
  for (auto j : g.neighbors(i))
    if (times[j] < t) k.adopted.emplace_back(j, times[j]);
  return k;
}

template <class Scalar>
Scalar delta_pow(const SolveConfig& cfg, Time t) {
  return ipow(from_double<Scalar>(cfg.delta), static_cast<unsigned>(t));
}

template <class Scalar>
struct Enumerator {
  const Network& g;
  const ExactModel<Scalar>& m;
  const Policy<Scalar>& policy;
  Time T;
  std::optional<std::size_t> never;
  const std::function<void(const World<Scalar>&)>& visit;
  State state = State::H;
  std::vector<std::size_t> atoms;

  void run(Time t, std::vector<Time>& times, const Scalar& w) {
    if (t > T) {
      World<Scalar> wd{state, w, &atoms, &times};
      visit(wd);
      return;
    }
    std::vector<std::size_t> sure;
    std::vector<std::pair<std::size_t, Scalar>> mixed;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (times[j] != kNever || (never && *never == j)) continue;
      Scalar p = policy(j, key_of(g, j, t, times), atoms[j]);
      if (p <= 0) continue;
      if (p >= 1)
        sure.push_back(j);
      else
        mixed.emplace_back(j, p);
    }
    for (auto j : sure) times[j] = t;
    if (mixed.empty()) {
      run(t + 1, times, w);
    } else {
      if (mixed.size() > 20) throw Error(ErrorKind::SizeLimit, "too many simultaneous mixed actions");
      const std::size_t combos = std::size_t(1) << mixed.size();
      for (std::size_t mask = 0; mask < combos; ++mask) {
        Scalar wb = w;
        for (std::size_t b = 0; b < mixed.size(); ++b) {
          bool on = (mask >> b) & 1u;
          wb *= on ? mixed[b].second : Scalar(1 - mixed[b].second);
          times[mixed[b].first] = on ? t : kNever;
        }
        run(t + 1, times, wb);
      }
      for (auto& [j, p] : mixed) times[j] = kNever;
    }
    for (auto j : sure) times[j] = kNever;
  }
};

}  // namespace

template <class Scalar>
void enumerate_worlds(const Network& g, const ExactModel<Scalar>& m, const Policy<Scalar>& policy, Time horizon,
                      std::optional<std::size_t> never_agent, const SolveConfig& cfg,
                      const std::function<void(const World<Scalar>&)>& visit) {
  const std::size_t n = g.size();
  if (n > cfg.max_agents)
    throw Error(ErrorKind::SizeLimit, std::to_string(n) + " agents exceeds bound " + std::to_string(cfg.max_agents));
  const std::size_t K = m.size();
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < n; ++j)
    if (!never_agent || *never_agent != j) free.push_back(j);
  double worlds = std::pow(static_cast<double>(K), static_cast<double>(free.size()));
  if (worlds > static_cast<double>(cfg.max_worlds))
    throw Error(ErrorKind::SizeLimit, "signal enumeration too large");
  Enumerator<Scalar> en{g, m, policy, horizon, never_agent, visit, State::H, {}};
  en.atoms.assign(n, 0);
  std::vector<Time> times(n, kNever);
  for (State s : {State::H, State::L}) {
    en.state = s;
    const auto& nu = s == State::H ? m.nu_H : m.nu_L;
    std::vector<std::size_t> idx(free.size(), 0);
    for (;;) {
      Scalar w = Scalar(1) / 2;
      for (std::size_t f = 0; f < free.size(); ++f) {
        en.atoms[free[f]] = idx[f];
        w *= nu(static_cast<Eigen::Index>(idx[f]));
      }
      if (w != 0) en.run(0, times, w);
      std::size_t f = 0;
      while (f < idx.size() && ++idx[f] == K) idx[f++] = 0;
      if (f == idx.size()) break;
    }
  }
}

namespace {

/// P[h_t | theta] (times 1/2) for agent i's visible histories, in the world where i never adopts.
template <class Scalar>
struct HistoryTable {
  std::vector<std::map<HistoryKey, std::pair<Scalar, Scalar>>> at;  // period -> key -> (H, L)
};

template <class Scalar>
HistoryTable<Scalar> history_table(const Network& g, const ExactModel<Scalar>& m, const Policy<Scalar>& policy,
                                   std::size_t i, Time T, const SolveConfig& cfg) {
  HistoryTable<Scalar> h;
  h.at.resize(static_cast<std::size_t>(T) + 1);
  enumerate_worlds<Scalar>(g, m, policy, T, i, cfg, [&](const World<Scalar>& w) {
    for (Time t = 0; t <= T; ++t) {
      auto& cell = h.at[static_cast<std::size_t>(t)][key_of(g, i, t, *w.times)];
      (w.state == State::H ? cell.first : cell.second) += w.weight;
    }
  });
  return h;
}

template <class Scalar>
BestResponse<Scalar> backward_induction(const HistoryTable<Scalar>& h, const ExactModel<Scalar>& m,
                                        const SolveConfig& cfg) {
  BestResponse<Scalar> br;
  const std::size_t K = m.size();
  const Time T = static_cast<Time>(h.at.size()) - 1;
  std::vector<std::map<HistoryKey, std::vector<Scalar>>> V(static_cast<std::size_t>(T) + 2);
  std::map<HistoryKey, std::vector<char>> decide;
  for (Time t = T; t >= 0; --t) {
    const auto tt = static_cast<std::size_t>(t);
    std::map<HistoryKey, std::vector<Scalar>> cont;
    if (t < T)
      for (const auto& [child, v] : V[tt + 1]) {
        auto& c = cont[child.truncated(t)];
        if (c.empty()) c.assign(K, Scalar(0));
        for (std::size_t s = 0; s < K; ++s) c[s] += v[s];
      }
    const Scalar dt = delta_pow<Scalar>(cfg, t);
    for (const auto& [key, pr] : h.at[tt]) {
      std::vector<Scalar> val(K), gap(K);
      std::vector<char> adopt(K);
      auto cit = cont.find(key);
      for (std::size_t s = 0; s < K; ++s) {
        const auto ks = static_cast<Eigen::Index>(s);
        Scalar A = dt * (m.nu_H(ks) * pr.first - m.nu_L(ks) * pr.second);
        Scalar C = cit == cont.end() ? Scalar(0) : cit->second[s];
        adopt[s] = A >= C;
        val[s] = adopt[s] ? A : C;
        gap[s] = A - C;
      }
      V[tt][key] = std::move(val);
      decide[key] = std::move(adopt);
      br.gap[key] = std::move(gap);
    }
  }
  // forward pass: which atoms can still be undecided at each history
  std::map<HistoryKey, std::vector<char>> live;
  for (Time t = 0; t <= T; ++t) {
    for (const auto& [key, pr] : h.at[static_cast<std::size_t>(t)]) {
      std::vector<char> lv(K, 1);
      if (t > 0) {
        const auto& parent = key.truncated(t - 1);
        const auto& pl = live.at(parent);
        const auto& pd = decide.at(parent);
        for (std::size_t s = 0; s < K; ++s) lv[s] = pl[s] && !pd[s];
      }
      const auto& d = decide.at(key);
      RuleEntry<Scalar> e;
      e.live = lv;
      bool any = false, seen_adopt = false;
      for (std::size_t s = 0; s < K; ++s) {
        bool a = lv[s] && d[s];
        e.adopt.push_back(a ? Scalar(1) : Scalar(0));
        any = any || a;
        if (!lv[s]) continue;
        if (a) seen_adopt = true;
        else if (seen_adopt && m.belief[s] > m.belief[s - 1]) br.threshold_form = false;
      }
      live[key] = std::move(lv);
      if (any) br.rule[key] = std::move(e);
    }
  }
  br.value = Scalar(0);
  if (!h.at.empty() && !V[0].empty())
    for (const auto& v : V[0].begin()->second) br.value += v;
  return br;
}

}  // namespace

template <class Scalar>
BestResponse<Scalar> best_response(const Network& g, const SignalModel& model, const Policy<Scalar>& others,
                                   std::size_t agent, const SolveConfig& cfg) {
  if (agent >= g.size()) throw Error(ErrorKind::InvalidParameter, "agent out of range");
  if (!(cfg.delta > 0 && cfg.delta < 1)) throw Error(ErrorKind::InvalidParameter, "delta must lie in (0,1)");
  if (cfg.horizon < 1) throw Error(ErrorKind::InvalidParameter, "horizon must be >= 1");
  auto m = ExactModel<Scalar>::from(model);
  auto h = history_table<Scalar>(g, m, others, agent, cfg.horizon, cfg);
  return backward_induction(h, m, cfg);
}

template <class Scalar>
Scalar exact_posterior(const Network& g, const SignalModel& model, const Policy<Scalar>& policy, std::size_t agent,
                       const HistoryKey& history, double own_belief, const SolveConfig& cfg) {
  auto s = model.find_atom(own_belief);
  if (!s) throw Error(ErrorKind::UnknownAtom, "own belief is not an atom of the model");
  auto m = ExactModel<Scalar>::from(model);
  const Time T = std::max<Time>(history.period, 1);
  auto h = history_table<Scalar>(g, m, policy, agent, T, cfg);
  const auto& tab = h.at.at(static_cast<std::size_t>(history.period));
  auto it = tab.find(history);
  const auto ks = static_cast<Eigen::Index>(*s);
  if (it == tab.end()) throw Error(ErrorKind::ImpossibleHistory, "history " + history.str() + " has probability 0");
  Scalar jh = m.nu_H(ks) * it->second.first, jl = m.nu_L(ks) * it->second.second;
  if (jh + jl == 0) throw Error(ErrorKind::ImpossibleHistory, "history " + history.str() + " has probability 0");
  return jh / (jh + jl);
}

template <class Scalar>
std::vector<AgentOutcome<Scalar>> evaluate_profile(const Network& g, const SignalModel& model, const Policy<Scalar>& p,
                                                   const SolveConfig& cfg) {
  auto m = ExactModel<Scalar>::from(model);
  const std::size_t n = g.size();
  const auto T = cfg.horizon;
  std::vector<AgentOutcome<Scalar>> out(n);
  for (auto& o : out) {
    o.dist_H.assign(static_cast<std::size_t>(T) + 2, Scalar(0));
    o.dist_L.assign(static_cast<std::size_t>(T) + 2, Scalar(0));
  }
  std::vector<Scalar> dpow;
  for (Time t = 0; t <= T; ++t) dpow.push_back(delta_pow<Scalar>(cfg, t));
  enumerate_worlds<Scalar>(g, m, p, T, std::nullopt, cfg, [&](const World<Scalar>& w) {
    for (std::size_t i = 0; i < n; ++i) {
      Time t = (*w.times)[i];
      auto slot = t == kNever ? static_cast<std::size_t>(T) + 1 : static_cast<std::size_t>(t);
      auto& o = out[i];
      Scalar w2 = w.weight * 2;
      if (w.state == State::H) {
        o.dist_H[slot] += w2;
        if (t != kNever) {
          o.p_correct += w.weight;
          o.utility += w.weight * dpow[slot];
        }
      } else {
        o.dist_L[slot] += w2;
        if (t == kNever)
          o.p_correct += w.weight;
        else
          o.utility -= w.weight * dpow[slot];
      }
    }
  });
  return out;
}

template <class Scalar>
StructureCheck verify_structure(const Network& g, const SignalModel& model, const Policy<Scalar>& p,
                                const SolveConfig& cfg) {
  StructureCheck rep;
  auto m = ExactModel<Scalar>::from(model);
  const std::size_t n = g.size(), K = m.size();
  const Time T = cfg.horizon;

  for (std::size_t i = 0; i < n; ++i) {
    auto h = history_table<Scalar>(g, m, p, i, T, cfg);
    // (i) profile's own decisions are upper sets among live atoms
    std::map<HistoryKey, std::vector<char>> live;
    for (Time t = 0; t <= T; ++t)
      for (const auto& [key, pr] : h.at[static_cast<std::size_t>(t)]) {
        std::vector<char> lv(K, 1);
        if (t > 0) {
          auto parent = key.truncated(t - 1);
          const auto& pl = live.at(parent);
          for (std::size_t s = 0; s < K; ++s) lv[s] = pl[s] && p(i, parent, s) < 1;
        }
        bool seen = false;
        for (std::size_t s = 0; s < K; ++s) {
          if (!lv[s]) continue;
          Scalar a = p(i, key, s);
          if (a > 0) {
            seen = true;
          } else if (seen && m.belief[s] > m.belief[s - 1]) {
            rep.threshold_form = false;
            rep.failures.push_back("agent " + std::to_string(i) + " at " + key.str() + ": adoption set not an upper set");
            break;
          }
        }
        live[key] = std::move(lv);
      }
    auto br = backward_induction(h, m, cfg);
    if (!br.threshold_form) {
      rep.threshold_form = false;
      rep.failures.push_back("agent " + std::to_string(i) + ": best response not of threshold form");
    }
    for (const auto& [key, lv] : live)
      for (std::size_t s = 0; s < K; ++s) {
        if (!lv[s]) continue;
        Scalar want(0);
        if (auto it = br.rule.find(key); it != br.rule.end()) want = it->second.adopt[s];
        if (want != p(i, key, s)) rep.best_response_consistent = false;
      }
  }

  auto out = evaluate_profile<Scalar>(g, model, p, cfg);
  rep.min_margin = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (Time t = 0; t <= T; ++t) {
      auto slot = static_cast<std::size_t>(t);
      double margin = to_double(Scalar(out[i].dist_H[slot] - out[i].dist_L[slot]));
      rep.min_margin = std::min(rep.min_margin, margin);
    }
  rep.state_monotone = rep.min_margin >= -1e-9;
  if (!rep.state_monotone) rep.failures.push_back("state monotonicity margin " + std::to_string(rep.min_margin));

  rep.tree = analyze(g).is_tree;
  if (rep.tree) {
    enumerate_worlds<Scalar>(g, m, p, T, std::nullopt, cfg, [&](const World<Scalar>& w) {
      if (!rep.no_spontaneous) return;
      for (std::size_t i = 0; i < n; ++i) {
        Time t = (*w.times)[i];
        if (t == kNever || t == 0) continue;
        bool prompted = false;
        for (auto j : g.neighbors(i)) prompted = prompted || (*w.times)[j] == t - 1;
        if (!prompted) {
          rep.no_spontaneous = false;
          rep.failures.push_back("agent " + std::to_string(i) + " adopts spontaneously at " + std::to_string(t));
          return;
        }
      }
    });
  }
  return rep;
}

template <class Scalar>
double max_difference(const DecisionProfile<Scalar>& a, const DecisionProfile<Scalar>& b) {
  double worst = 0;
  auto cmp = [&](const std::map<HistoryKey, RuleEntry<Scalar>>& x, const std::map<HistoryKey, RuleEntry<Scalar>>& y) {
    for (const auto& [k, e] : x) {
      auto it = y.find(k);
      for (std::size_t s = 0; s < e.adopt.size(); ++s) {
        Scalar other = it == y.end() ? Scalar(0) : it->second.adopt[s];
        worst = std::max(worst, std::fabs(to_double(Scalar(e.adopt[s] - other))));
      }
    }
  };
  for (std::size_t i = 0; i < a.rules.size(); ++i) {
    cmp(a.rules[i], b.rules.at(i));
    cmp(b.rules[i], a.rules[i]);
  }
  return worst;
}

namespace {

template <class Scalar>
struct SweepResult {
  DecisionProfile<Scalar> profile;
  bool converged = false;
  int sweeps = 0;
  double residual = 0;
  std::size_t cycle = 0;
  bool mixed = false;
};

template <class Scalar>
DecisionProfile<Scalar> sweep_once(const Network& g, const SignalModel& m, const DecisionProfile<Scalar>& cur,
                                   const SolveConfig& cfg) {
  DecisionProfile<Scalar> next = cur;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const DecisionProfile<Scalar>& basis = cfg.order == UpdateOrder::GaussSeidel ? next : cur;
    auto br = best_response<Scalar>(g, m, basis.policy(), i, cfg);
    next.rules[i] = std::move(br.rule);
  }
  return next;
}

// On a best-response cycle, try a common mixing probability k/grid on the
// entries that oscillate and keep the one with the smallest indifference gap.
template <class Scalar>
void mix_search(const Network& g, const SignalModel& m, const std::vector<DecisionProfile<Scalar>>& cycle,
                const SolveConfig& cfg, SweepResult<Scalar>& out) {
  struct Slot { std::size_t agent; HistoryKey key; std::size_t atom; };
  std::vector<Slot> slots;
  const auto& base = cycle.front();
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::set<HistoryKey> keys;
    for (const auto& p : cycle)
      for (const auto& [k, e] : p.rules[i]) keys.insert(k);
    for (const auto& k : keys)
      for (std::size_t s = 0; s < m.size(); ++s) {
        Scalar v0 = base.adopt(i, k, s);
        for (const auto& p : cycle)
          if (p.adopt(i, k, s) != v0) {
            slots.push_back({i, k, s});
            break;
          }
      }
  }
  if (slots.empty()) return;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int num = 1; num < cfg.mix_grid; ++num) {
    DecisionProfile<Scalar> p = base;
    Scalar mix = Scalar(num) / Scalar(cfg.mix_grid);
    for (const auto& sl : slots) {
      auto& e = p.rules[sl.agent][sl.key];
      if (e.adopt.empty()) {
        e.adopt.assign(m.size(), Scalar(0));
        e.live.assign(m.size(), 1);
      }
      e.adopt[sl.atom] = mix;
    }
    double gap = 0;
    for (const auto& sl : slots) {
      auto br = best_response<Scalar>(g, m, p.policy(), sl.agent, cfg);
      auto it = br.gap.find(sl.key);
      if (it != br.gap.end()) gap = std::max(gap, std::fabs(to_double(it->second[sl.atom])));
    }
    if (gap < best_gap) {
      best_gap = gap;
      out.profile = p;
    }
  }
  out.mixed = true;
  out.residual = best_gap;
  out.converged = best_gap <= cfg.tolerance;
}

template <class Scalar>
SweepResult<Scalar> iterate(const Network& g, const SignalModel& m, const SolveConfig& cfg,
                            DecisionProfile<Scalar> start) {
  SweepResult<Scalar> r;
  std::vector<DecisionProfile<Scalar>> seen{start};
  DecisionProfile<Scalar> cur = std::move(start);
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    auto next = sweep_once(g, m, cur, cfg);
    r.sweeps = sweep;
    r.residual = max_difference(cur, next);
    cur = std::move(next);
    if (r.residual <= cfg.tolerance) {
      r.converged = true;
      break;
    }
    for (std::size_t k = 0; k < seen.size(); ++k)
      if (max_difference(seen[k], cur) == 0) {
        r.cycle = seen.size() - k;
        std::vector<DecisionProfile<Scalar>> cyc(seen.begin() + static_cast<long>(k), seen.end());
        r.profile = cur;
        if (cfg.mix_search) mix_search(g, m, cyc, cfg, r);
        return r;
      }
    seen.push_back(cur);
  }
  r.profile = std::move(cur);
  return r;
}

template <class Scalar>
bool early_periods_equal(const DecisionProfile<Scalar>& a, const DecisionProfile<Scalar>& b) {
  for (std::size_t i = 0; i < a.rules.size(); ++i) {
    auto early = [](const std::map<HistoryKey, RuleEntry<Scalar>>& r) {
      std::map<HistoryKey, std::vector<Scalar>> e;
      for (const auto& [k, v] : r)
        if (k.period <= 1) e[k] = v.adopt;
      return e;
    };
    if (early(a.rules[i]) != early(b.rules[i])) return false;
  }
  return true;
}

}  // namespace

template <class Scalar>
EquilibriumReport<Scalar> solve_equilibrium(const Network& g, const SignalModel& m, const SolveConfig& cfg,
                                            std::optional<DecisionProfile<Scalar>> init) {
  if (g.size() > cfg.max_agents)
    throw Error(ErrorKind::SizeLimit, std::to_string(g.size()) + " agents exceeds bound " + std::to_string(cfg.max_agents));
  EquilibriumReport<Scalar> rep;
  DecisionProfile<Scalar> start = init ? *init : myopic_decisions<Scalar>(g, m);
  std::optional<SweepResult<Scalar>> prev;
  const Time last = cfg.raise_horizon ? std::max(cfg.max_horizon, cfg.horizon) : cfg.horizon;
  for (Time T = cfg.horizon; T <= last; ++T) {
    SolveConfig c = cfg;
    c.horizon = T;
    auto r = iterate<Scalar>(g, m, c, start);
    rep.horizons_tried.push_back(T);
    bool stable = prev && prev->converged && r.converged && early_periods_equal(prev->profile, r.profile);
    rep.profile = r.profile;
    rep.converged = r.converged;
    rep.sweeps = r.sweeps;
    rep.residual = r.residual;
    rep.cycle_length = r.cycle;
    rep.mixed = r.mixed;
    rep.horizon = T;
    if (stable) {
      rep.horizon_stable = true;
      break;
    }
    if (!cfg.raise_horizon) break;
    start = r.profile;
    prev = std::move(r);
  }
  SolveConfig c = cfg;
  c.horizon = rep.horizon;
  rep.structure = verify_structure<Scalar>(g, m, rep.profile.policy(), c);
  return rep;
}

template <class Scalar>
ThresholdTable to_threshold_table(const DecisionProfile<Scalar>& p, const SignalModel& m) {
  ThresholdTable t;
  for (std::size_t i = 0; i < p.rules.size(); ++i)
    for (const auto& [key, e] : p.rules[i]) {
      std::size_t lowest = m.size();
      for (std::size_t s = 0; s < m.size(); ++s)
        if (e.live[s] && e.adopt[s] > 0) {
          lowest = s;
          break;
        }
      if (lowest == m.size()) continue;
      double a = to_double(e.adopt[lowest]);
      if (a < 1)
        t.set(i, key, {m.belief(lowest), a});
      else
        t.set(i, key, {lowest > 0 ? m.belief(lowest - 1) : 0.0, 0.0});
    }
  return t;
}

#define SDL_INSTANTIATE(S)                                                                                          \
  template struct ExactModel<S>;                                                                                  \
  template struct DecisionProfile<S>;                                                                             \
  template DecisionProfile<S> myopic_decisions<S>(const Network&, const SignalModel&);                            \
  template Policy<S> policy_from_profile<S>(const Network&, const SignalModel&, const Profile&);                  \
  template void enumerate_worlds<S>(const Network&, const ExactModel<S>&, const Policy<S>&, Time,                 \
                                    std::optional<std::size_t>, const SolveConfig&,                               \
                                    const std::function<void(const World<S>&)>&);                                 \
  template BestResponse<S> best_response<S>(const Network&, const SignalModel&, const Policy<S>&, std::size_t,    \
                                            const SolveConfig&);                                                  \
  template S exact_posterior<S>(const Network&, const SignalModel&, const Policy<S>&, std::size_t,                \
                                const HistoryKey&, double, const SolveConfig&);                                   \
  template std::vector<AgentOutcome<S>> evaluate_profile<S>(const Network&, const SignalModel&, const Policy<S>&, \
                                                            const SolveConfig&);                                  \
  template StructureCheck verify_structure<S>(const Network&, const SignalModel&, const Policy<S>&,               \
                                              const SolveConfig&);                                                \
  template EquilibriumReport<S> solve_equilibrium<S>(const Network&, const SignalModel&, const SolveConfig&,      \
                                                     std::optional<DecisionProfile<S>>);                          \
  template ThresholdTable to_threshold_table<S>(const DecisionProfile<S>&, const SignalModel&);                   \
  template double max_difference<S>(const DecisionProfile<S>&, const DecisionProfile<S>&);

SDL_INSTANTIATE(long double)
SDL_INSTANTIATE(Rational)

}  // namespace sdl
