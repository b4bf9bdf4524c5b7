#include <cmath>

#include "sdl/eqsolver.hpp"
#include "sdl/error.hpp"
#include "sdl/simengine.hpp"

namespace sdl {

namespace {

using L = SpontaneousLayout;

// Signals: 1 = H, 0 = L.
Time majority_time(int own, int a1, int a2) { return own + a1 + a2 >= 2 ? 1 : kNever; }
Time d_time(Time e) { return e == 1 ? 2 : kNever; }
Time myopic_time(int s) { return s ? 0 : kNever; }

bool consistent(Time predicted, Time observed, Time t) {
  Time visible = predicted < t ? predicted : kNever;
  return visible == observed;
}

struct Likelihood {
  Rational pH, pL;  // P[s = H | theta]
  Rational sig(int s, bool high) const {
    const Rational& p = high ? pH : pL;
    return s ? p : Rational(1 - p);
  }

  // P[f's observations through period t-1, f's own signal | theta]
  Rational of(const std::vector<Time>& visible, Time t, int f_signal, bool high) const {
    Rational total = 0;
    for (int a1 = 0; a1 <= 1; ++a1)
      for (int a2 = 0; a2 <= 1; ++a2) {
        Rational w = sig(a1, high) * sig(a2, high);
        for (std::size_t b = L::b_first; b < L::b_first + L::b_count && w != 0; ++b) {
          Rational pb = 0;
          for (int s = 0; s <= 1; ++s)
            if (consistent(majority_time(s, a1, a2), visible[b], t)) pb += sig(s, high);
          w *= pb;
        }
        if (w == 0) continue;
        Rational pd = 0;
        for (int se = 0; se <= 1; ++se)
          for (int sd = 0; sd <= 1; ++sd)
            if (consistent(d_time(majority_time(se, a1, a2)), visible[L::d], t))
              pd += sig(se, high) * sig(sd, high);
        total += w * pd;
      }
    for (std::size_t c = L::c_first; c < L::c_first + L::c_count; ++c) {
      Rational pc = 0;
      for (int s = 0; s <= 1; ++s)
        if (consistent(myopic_time(s), visible[c], t)) pc += sig(s, high);
      total *= pc;
    }
    return total * sig(f_signal, high);
  }
};

}  // namespace

SpontaneousReport verify_spontaneous_example(double q, double delta) {
  if (!(q > 0.5 && q < 1)) throw Error(ErrorKind::InvalidPrecision, "q must lie in (1/2, 1)");
  if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidParameter, "delta must lie in (0,1)");
  SpontaneousReport rep;
  rep.q = q;
  rep.delta = delta;

  const Rational Q = nearest_rational(q), P = 1 - Q;
  // waiting one period and following the majority of three, given an H signal
  Rational wB = Q * (1 - P * P) - P * (1 - Q * Q);
  Rational maj_H = 3 * Q * Q - 2 * Q * Q * Q, maj_L = 3 * P * P - 2 * P * P * P;
  // d waits two periods and copies e's period-1 adoption
  Rational wD = Q * maj_H - P * maj_L;
  Rational gain = 2 * Q - 1;
  rep.delta_defer_B = to_double(Rational(gain / wB));
  rep.delta_defer_d = std::sqrt(to_double(Rational(gain / wD)));
  // d's period-2 response to e must follow e in both directions
  Rational odds = Q / P;
  bool d_follows = (maj_H / maj_L) / odds > 1 && odds * ((1 - maj_H) / (1 - maj_L)) < 1;
  if (!(delta > rep.delta_defer_B))
    throw Error(ErrorKind::Regime, "B-agents adopt at period 0: need delta > " + std::to_string(rep.delta_defer_B) +
                                       " = (2q-1)/[q(1-(1-q)^2) - (1-q)(1-q^2)]");
  if (!(delta > rep.delta_defer_d))
    throw Error(ErrorKind::Regime, "agent d adopts at period 0 on a high signal: need delta > " +
                                       std::to_string(rep.delta_defer_d));
  if (!d_follows) throw Error(ErrorKind::Regime, "agent d does not copy e's period-1 decision");

  // the displayed closed forms
  Rational r = P / Q;
  rep.lr_period2_formula = ipow(r, 11) * (Q * Q + 2 * Q * P * ipow(Q, 100)) / (P * P + 2 * Q * P * ipow(P, 100));
  rep.lr_period3_formula = ipow(Rational(Q / P), 88);

  // replay the designated draw: a1 and B high, everyone else low
  Network g = build_spontaneous_example();
  SignalModel model = SignalModel::binary(q);
  std::vector<std::size_t> atoms(L::size, 0);  // atom 0 = low belief
  atoms[L::a1] = 1;
  for (std::size_t b = L::b_first; b < L::b_first + L::b_count; ++b) atoms[b] = 1;

  Likelihood lk{Q, P};
  auto myopic = myopic_rule(model);
  auto majority = std::make_shared<FunctionStrategy>(
      [](const AgentView& v) {
        if (v.period() != 1) return 0.0;
        int h = v.belief() > 0.5 ? 1 : 0;
        for (auto j : v.neighbors()) h += v.neighbor_time(j) == 0 ? 1 : 0;
        return h >= 2 ? 1.0 : 0.0;
      },
      "majority-at-1", false, 1);
  auto copy_e = std::make_shared<FunctionStrategy>(
      [](const AgentView& v) { return v.period() == 2 && v.neighbor_time(L::e) == 1 ? 1.0 : 0.0; }, "copy-e", false, 2);
  std::vector<double> f_llr;
  auto f_rule = std::make_shared<FunctionStrategy>(
      [&lk, &f_llr](const AgentView& v) {
        std::vector<Time> visible(L::size, kNever);
        for (auto j : v.neighbors()) visible[j] = v.neighbor_time(j);
        int own = v.belief() > 0.5 ? 1 : 0;
        Rational ratio = lk.of(visible, v.period(), own, true) / lk.of(visible, v.period(), own, false);
        f_llr.push_back(static_cast<double>(log_of(ratio)));
        return ratio > 1 ? 1.0 : 0.0;
      },
      "f-bayes", false, 4);

  Profile prof(L::size);
  prof[L::a1] = prof[L::a2] = myopic;
  for (std::size_t b = L::b_first; b < L::b_first + L::b_count; ++b) prof[b] = majority;
  for (std::size_t c = L::c_first; c < L::c_first + L::c_count; ++c) prof[c] = myopic;
  prof[L::e] = majority;
  prof[L::d] = copy_e;
  prof[L::f] = f_rule;

  Rng rng = make_stream(0, 0);
  ActionTrace tr = run_given(g, model, prof, 5, State::L, atoms, rng);
  rep.trace = tr.adoption_time;
  rep.f_log_lr = f_llr;
  rep.f_adoption = tr.adoption_time[L::f];

  // enumerated likelihood ratios at periods 2 and 3 from the realized trace
  auto visible_at = [&](Time t) {
    std::vector<Time> vis(L::size, kNever);
    for (auto j : g.neighbors(L::f)) vis[j] = tr.adoption_time[j] < t ? tr.adoption_time[j] : kNever;
    return vis;
  };
  for (Time t : {Time(2), Time(3)}) {
    auto vis = visible_at(t);
    Rational ratio = lk.of(vis, t, 0, true) / lk.of(vis, t, 0, false);
    (t == 2 ? rep.lr_period2_enumerated : rep.lr_period3_enumerated) = ratio;
  }
  rep.log10_lr_period2 = static_cast<double>(log_of(rep.lr_period2_enumerated) / std::log(10.0L));
  rep.log10_lr_period3 = static_cast<double>(log_of(rep.lr_period3_enumerated) / std::log(10.0L));

  if (rep.f_adoption != kNever && rep.f_adoption > 0)
    for (auto j : g.neighbors(L::f))
      if (tr.adoption_time[j] == rep.f_adoption - 1) ++rep.neighbor_adoptions_before_f;
  return rep;
}

}  // namespace sdl
