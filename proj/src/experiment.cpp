#include "sdl/experiment.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "sdl/auxmodel.hpp"
#include "sdl/eqsolver.hpp"
#include "sdl/error.hpp"
#include "sdl/infobounds.hpp"

namespace sdl {

namespace fs = std::filesystem;

namespace {

std::pair<std::string, json> unwrap(const json& spec, const char* what) {
  if (spec.is_string()) return {spec.get<std::string>(), json::object()};
  if (spec.is_object() && spec.size() == 1) return {spec.begin().key(), spec.begin().value()};
  throw Error(ErrorKind::Validation, std::string(what) + " spec must be a name or a single-key object");
}

std::string resolve(const std::string& path, const std::string& base) {
  if (base.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).string();
}

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::Validation, std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.is_object() && j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

// ---------------------------------------------------------------- config

Network network_from_json(const json& spec, const std::string& base_dir) {
  auto [name, body] = unwrap(spec, "network");
  if (name == "line")
    return build_line(need(body, "n").get<std::size_t>(), get_or(body, "directed", false), get_or(body, "ring", false));
  if (name == "tree") return build_directed_tree(need(body, "d").get<std::size_t>(), need(body, "depth").get<std::size_t>());
  if (name == "star") return build_star(need(body, "leaves").get<std::size_t>(), get_or(body, "directed", true));
  if (name == "spontaneous") return build_spontaneous_example();
  if (name == "edge_list") {
    std::string path = body.is_string() ? body.get<std::string>() : need(body, "path").get<std::string>();
    return load_edge_list_file(resolve(path, base_dir));
  }
  throw Error(ErrorKind::Validation, "unknown network kind '" + name + "'");
}

SignalModel model_from_json(const json& spec) {
  auto [name, body] = unwrap(spec, "signal");
  if (name == "binary") return SignalModel::binary(body.get<double>());
  if (name == "atoms") {
    std::vector<Atom> atoms;
    for (const auto& a : body) {
      if (a.is_array() && a.size() == 2)
        atoms.push_back({a[0].get<double>(), a[1].get<double>()});
      else
        atoms.push_back({need(a, "H").get<double>(), need(a, "L").get<double>()});
    }
    return SignalModel::from_atoms(atoms);
  }
  if (name == "belief_grid")
    return SignalModel::belief_grid(need(body, "a").get<double>(), need(body, "b").get<double>(),
                                    need(body, "atoms").get<std::size_t>());
  throw Error(ErrorKind::Validation, "unknown signal kind '" + name + "'");
}

StrategyPtr strategy_from_json(const json& spec, const Network& g, const SignalModel& model,
                               const std::string& base_dir) {
  auto [name, body] = unwrap(spec, "strategy");
  if (name == "myopic") return myopic_rule(model);
  if (name == "never") return std::make_shared<NeverStrategy>();
  if (name == "follow_tree") return follow_tree_neighbors(g);
  if (name == "sigma") {
    auto p = sigma_params(model, get_or(body, "eta", 1e-3), get_or(body, "k", 50LL), get_or(body, "two_sided", false));
    std::optional<std::vector<std::size_t>> forced;
    if (body.contains("forced")) forced = body.at("forced").get<std::vector<std::size_t>>();
    return std::make_shared<SigmaProtocol>(p, g.size(), g.boundary() == Boundary::Ring, forced);
  }
  if (name == "aux") {
    AuxDiscreteSpec s;
    s.family = get_or(body, "family", 1);
    if (body.contains("r_index")) {
      s.r_index = body.at("r_index").is_string() ? kNever : body.at("r_index").get<Time>();
    } else if (body.contains("r")) {
      s.r_index = snap_r_index(body.at("r").get<double>(), need(body, "delta").get<double>());
    }
    s.child1 = get_or<std::size_t>(body, "child1", 1);
    s.child2 = get_or<std::size_t>(body, "child2", 2);
    return aux_to_discrete(s);
  }
  if (name == "threshold_table") {
    std::string path = body.is_string() ? body.get<std::string>() : need(body, "path").get<std::string>();
    return std::make_shared<ThresholdTable>(ThresholdTable::load_file(resolve(path, base_dir)));
  }
  throw Error(ErrorKind::Validation, "unknown strategy '" + name + "'");
}

Profile profile_from_json(const json& config, const Network& g, const SignalModel& model,
                          const std::string& base_dir) {
  Profile p = uniform_profile(g.size(), strategy_from_json(need(config, "strategy"), g, model, base_dir));
  if (config.contains("overrides"))
    for (const auto& o : config.at("overrides")) {
      auto s = strategy_from_json(need(o, "strategy"), g, model, base_dir);
      for (auto i : need(o, "agents").get<std::vector<std::size_t>>()) {
        if (i >= g.size()) throw Error(ErrorKind::Validation, "override agent out of range");
        p[i] = s;
      }
    }
  return p;
}

std::string canonical_json(const json& j) { return j.dump(); }

std::string config_hash(const json& j) {
  std::string body = canonical_json(j);
  std::string blob = "blob " + std::to_string(body.size());
  blob.push_back('\0');
  blob += body;
  unsigned char md[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), md);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : md) {
    out.push_back(hex[c >> 4]);
    out.push_back(hex[c & 15]);
  }
  return out;
}

// ---------------------------------------------------------------- output

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_estimates_csv(std::ostream& out, const std::string& run_id, const EstimateReport& r, bool header) {
  if (header) out << "run_id,agent,p_hat,ci,utility,truncated_fraction\n";
  for (std::size_t i = 0; i < r.agents.size(); ++i) {
    const auto& a = r.agents[i];
    out << run_id << ',' << i << ',' << format_number(a.p_hat) << ',' << format_number(a.ci) << ','
        << format_number(a.utility) << ',' << format_number(a.truncated_fraction) << '\n';
  }
}

std::string monotone_flag(const std::vector<PlotPoint>& s) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < s.size(); ++i) {
    double slack = s[i].ci + s[i - 1].ci;
    if (s[i].y < s[i - 1].y - slack) up = false;
    if (s[i].y > s[i - 1].y + slack) down = false;
  }
  return up ? "nondecreasing" : down ? "nonincreasing" : "none";
}

void write_plotdata(std::ostream& out, const std::vector<PlotPoint>& points) {
  out << "series,x,y,ci,monotone\n";
  std::vector<std::string> order;
  for (const auto& p : points)
    if (std::find(order.begin(), order.end(), p.series) == order.end()) order.push_back(p.series);
  for (const auto& name : order) {
    std::vector<PlotPoint> s;
    for (const auto& p : points)
      if (p.series == name) s.push_back(p);
    std::string flag = monotone_flag(s);
    for (const auto& p : s)
      out << p.series << ',' << format_number(p.x) << ',' << format_number(p.y) << ',' << format_number(p.ci) << ','
          << flag << '\n';
  }
}

// ---------------------------------------------------------------- σ on a ring

std::vector<Time> ring_sigma_times(const SigmaParams& p, const std::vector<char>& seeds, const std::vector<int>& x) {
  const std::size_t n = seeds.size();
  if (x.size() != n) throw Error(ErrorKind::InvalidSize, "seed and signal vectors differ in length");
  std::vector<Time> t(n, kNever);
  auto first = std::find(seeds.begin(), seeds.end(), 1);
  if (first == seeds.end()) return t;
  const std::size_t s = static_cast<std::size_t>(first - seeds.begin());
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t i = (s + step) % n;
    t[i] = seeds[i] ? 0 : sigma_eta_k_step(t[(i + n - 1) % n], x[i], p.k, p.qH, p.qL);
  }
  return t;
}

RingSigmaEstimate ring_sigma_estimate(std::size_t n, const SignalModel&, const SigmaParams& p, std::size_t agent,
                                      std::size_t reps, std::uint64_t seed, double delta, unsigned jobs) {
  if (n < 3) throw Error(ErrorKind::InvalidSize, "ring needs at least 3 agents");
  if (agent >= n) throw Error(ErrorKind::InvalidParameter, "agent out of range");
  if (reps == 0) throw Error(ErrorKind::InvalidParameter, "need at least one replication");
  // the ring is symmetric, so only the walk back to the nearest seed matters
  struct Rep {
    bool correct = false;
    double utility = 0;
    std::size_t dist = 0;
    bool seeded = false;
  };
  std::vector<Rep> out(reps);
  auto one = [&](std::size_t r) {
    Rng rng = make_stream(seed, r);
    std::bernoulli_distribution coin(0.5), seed_draw(p.eta);
    const State s = coin(rng) ? State::H : State::L;
    std::bernoulli_distribution xd(s == State::H ? p.qH : p.qL);
    std::vector<int> xs;  // xs[d] belongs to agent - d
    Rep res;
    std::size_t d = 0;
    for (; d < n; ++d) {
      bool sd = seed_draw(rng);
      xs.push_back(xd(rng) ? 1 : 0);
      if (sd) {
        res.seeded = true;
        break;
      }
    }
    Time tau = kNever;
    if (res.seeded) {
      tau = 0;
      for (std::size_t back = d; back-- > 0;) tau = sigma_eta_k_step(tau, xs[back], p.k, p.qH, p.qL);
      res.dist = d;
    }
    res.correct = (tau != kNever) == (s == State::H);
    res.utility = realized_utility(tau, s, delta);
    out[r] = res;
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(reps)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < reps;) one(r);
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RingSigmaEstimate e;
  e.reps = reps;
  double c = 0, u = 0, dist = 0, seeded = 0, none = 0;
  for (const auto& r : out) {
    c += r.correct;
    u += r.utility;
    if (r.seeded) {
      dist += static_cast<double>(r.dist);
      ++seeded;
    } else {
      ++none;
    }
  }
  const double R = static_cast<double>(reps);
  e.p_hat = c / R;
  e.ci = ci_halfwidth(e.p_hat, reps);
  e.utility = u / R;
  e.mean_wave_distance = seeded > 0 ? dist / seeded : 0;
  e.no_seed_fraction = none / R;
  return e;
}

// ---------------------------------------------------------------- star centre

namespace {

std::vector<double> binomial_pmf(std::size_t n, double p) {
  std::vector<double> out(n + 1);
  const double N = static_cast<double>(n);
  for (std::size_t c = 0; c <= n; ++c) {
    const double C = static_cast<double>(c);
    double lg = std::lgamma(N + 1) - std::lgamma(C + 1) - std::lgamma(N - C + 1);
    double lp = (c > 0 ? C * std::log(p) : 0) + (c < n ? (N - C) * std::log1p(-p) : 0);
    out[c] = std::exp(lg + lp);
  }
  return out;
}

}  // namespace

StarCenterRule star_center_rule(std::size_t leaves, const SignalModel& model, double delta) {
  if (leaves == 0) throw Error(ErrorKind::InvalidSize, "star needs at least one leaf");
  if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidParameter, "delta must lie in (0,1)");
  double lH = 0, lL = 0;
  for (std::size_t k = 0; k < model.size(); ++k)
    if (model.belief(k) >= 0.5) {
      lH += model.atom(k).likelihood_H;
      lL += model.atom(k).likelihood_L;
    }
  const auto bH = binomial_pmf(leaves, lH), bL = binomial_pmf(leaves, lL);
  StarCenterRule r;
  r.leaves = leaves;
  r.delta = delta;
  double cH = 0, cL = 0, uH = 0, uL = 0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double pi = model.belief(k);
    const double nH = model.atom(k).likelihood_H, nL = model.atom(k).likelihood_L;
    std::vector<char> at1(leaves + 1);
    double wait = 0;
    for (std::size_t c = 0; c <= leaves; ++c) {
      double v = pi * bH[c] - (1 - pi) * bL[c];
      at1[c] = v >= 0;
      wait += std::max(0.0, v);
    }
    const bool now = 2 * pi - 1 >= delta * wait;
    r.adopt_at_zero.push_back(now);
    r.adopt_at_one.push_back(at1);
    if (now) {
      cH += nH;
      uH += nH;
      uL += nL;
    } else {
      for (std::size_t c = 0; c <= leaves; ++c)
        if (at1[c]) {
          cH += nH * bH[c];
          uH += delta * nH * bH[c];
          uL += delta * nL * bL[c];
        } else {
          cL += nL * bL[c];
        }
    }
  }
  r.p_correct = 0.5 * (cH + cL);
  r.utility = 0.5 * (uH - uL);
  return r;
}

Profile star_center_profile(const StarCenterRule& rule, const SignalModel& model) {
  Profile p = uniform_profile(rule.leaves + 1, myopic_rule(model));
  auto fn = [rule](const AgentView& v) {
    if (v.period() == 0) return rule.adopt_at_zero[v.atom()] ? 1.0 : 0.0;
    if (v.period() > 1) return 0.0;
    std::size_t c = 0;
    for (auto j : v.neighbors())
      if (v.neighbor_time(j) == 0) ++c;
    return rule.adopt_at_one[v.atom()][c] ? 1.0 : 0.0;
  };
  p[0] = std::make_shared<FunctionStrategy>(fn, "star-centre-best-reply", false, 1);
  return p;
}

// ---------------------------------------------------------------- runner

namespace {

struct Ctx {
  const RunOptions& opts;
  std::string base_dir;
  unsigned jobs = 1;
  RunResult result;

  std::string path(const std::string& name) const { return (fs::path(opts.out_dir) / name).string(); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(path(name), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path(name));
    f << content;
    result.files.push_back(name);
  }

  void fail(const std::string& why) {
    result.exit_code = kExitAssertion;
    if (!result.message.empty()) result.message += "; ";
    result.message += why;
  }
};

EstimateReport simulate_once(const json& cfg, Ctx& ctx, std::uint64_t seed) {
  Network g = network_from_json(need(cfg, "network"), ctx.base_dir);
  SignalModel m = model_from_json(need(cfg, "signal"));
  Profile p = profile_from_json(cfg, g, m, ctx.base_dir);
  return estimate(g, m, p, need(cfg, "horizon").get<Time>(), get_or(cfg, "delta", 0.9),
                  need(cfg, "replications").get<std::size_t>(), seed, ctx.jobs);
}

void run_simulate(const json& cfg, Ctx& ctx, std::uint64_t seed) {
  std::ostringstream csv;
  csv << "run_id,agent,p_hat,ci,utility,truncated_fraction\n";
  const std::string run_id = get_or<std::string>(cfg, "run_id", "run");
  if (cfg.contains("sweep")) {
    const auto& sw = cfg.at("sweep");
    json::json_pointer ptr(need(sw, "pointer").get<std::string>());
    const auto agent = get_or<std::size_t>(sw, "agent", 0);
    std::vector<PlotPoint> pts;
    json rows = json::array();
    for (const auto& v : need(sw, "values")) {
      json c = cfg;
      c.erase("sweep");
      c[ptr] = v;
      auto rep = simulate_once(c, ctx, seed);
      std::string id = run_id + ":" + v.dump();
      write_estimates_csv(csv, id, rep, false);
      if (agent >= rep.agents.size()) throw Error(ErrorKind::Validation, "sweep agent out of range");
      pts.push_back({"p_hat[" + std::to_string(agent) + "]", v.get<double>(), rep.agents[agent].p_hat,
                     rep.agents[agent].ci});
      rows.push_back({{"value", v}, {"p_hat", rep.agents[agent].p_hat}, {"ci", rep.agents[agent].ci}});
    }
    std::ostringstream plot;
    write_plotdata(plot, pts);
    ctx.write("plotdata.csv", plot.str());
    ctx.result.report["sweep"] = rows;
    ctx.result.report["monotone"] = monotone_flag(pts);
  } else {
    auto rep = simulate_once(cfg, ctx, seed);
    write_estimates_csv(csv, run_id, rep, false);
    ctx.result.report["truncated_fraction"] = rep.truncated_fraction;
    ctx.result.report["replications"] = rep.reps;
    if (ctx.opts.verify) {
      auto again = simulate_once(cfg, ctx, seed);
      std::ostringstream a, b;
      write_estimates_csv(a, run_id, rep);
      write_estimates_csv(b, run_id, again);
      if (a.str() != b.str()) ctx.fail("repeated run differs");
      for (const auto& ag : rep.agents)
        if (!(ag.p_hat >= 0 && ag.p_hat <= 1)) ctx.fail("p_hat outside [0,1]");
    }
  }
  ctx.write("results.csv", csv.str());
}

template <class Scalar>
void run_solve_as(const json& cfg, Ctx& ctx) {
  Network g = network_from_json(need(cfg, "network"), ctx.base_dir);
  SignalModel m = model_from_json(need(cfg, "signal"));
  SolveConfig sc;
  sc.delta = get_or(cfg, "delta", sc.delta);
  sc.horizon = get_or(cfg, "horizon", sc.horizon);
  sc.max_agents = get_or(cfg, "max_agents", sc.max_agents);
  sc.max_sweeps = get_or(cfg, "max_sweeps", sc.max_sweeps);
  sc.raise_horizon = get_or(cfg, "raise_horizon", sc.raise_horizon);
  sc.max_horizon = get_or(cfg, "max_horizon", sc.max_horizon);
  sc.mix_search = get_or(cfg, "mix_search", sc.mix_search);
  std::string order = get_or<std::string>(cfg, "order", "gauss-seidel");
  if (order == "jacobi")
    sc.order = UpdateOrder::Jacobi;
  else if (order != "gauss-seidel")
    throw Error(ErrorKind::Validation, "order must be gauss-seidel or jacobi");

  auto rep = solve_equilibrium<Scalar>(g, m, sc);
  SolveConfig ev = sc;
  ev.horizon = rep.horizon;
  auto outcomes = evaluate_profile<Scalar>(g, m, rep.profile.policy(), ev);

  std::ostringstream table;
  to_threshold_table(rep.profile, m).save(table);
  ctx.write("thresholds.tsv", table.str());

  std::ostringstream csv;
  csv << "run_id,agent,p_hat,ci,utility,truncated_fraction\n";
  const std::string run_id = get_or<std::string>(cfg, "run_id", "solve");
  json agents = json::array();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    double p = to_double(outcomes[i].p_correct), u = to_double(outcomes[i].utility);
    csv << run_id << ',' << i << ',' << format_number(p) << ",0," << format_number(u) << ",0\n";
    agents.push_back({{"agent", i}, {"p_correct", p}, {"utility", u}});
  }
  ctx.write("results.csv", csv.str());

  const auto& s = rep.structure;
  ctx.result.report["converged"] = rep.converged;
  ctx.result.report["sweeps"] = rep.sweeps;
  ctx.result.report["residual"] = rep.residual;
  ctx.result.report["cycle_length"] = rep.cycle_length;
  ctx.result.report["mixed"] = rep.mixed;
  ctx.result.report["horizon"] = rep.horizon;
  ctx.result.report["horizon_stable"] = rep.horizon_stable;
  ctx.result.report["agents"] = agents;
  ctx.result.report["structure"] = {{"threshold_form", s.threshold_form},
                                    {"state_monotone", s.state_monotone},
                                    {"min_margin", s.min_margin},
                                    {"tree", s.tree},
                                    {"no_spontaneous", s.no_spontaneous},
                                    {"best_response_consistent", s.best_response_consistent},
                                    {"failures", s.failures},
                                    {"passed", s.passed()}};
  if ((ctx.opts.verify || get_or(cfg, "assert_structure", false)) && !s.passed())
    ctx.fail("structure check failed");
}

void run_solve(const json& cfg, Ctx& ctx) {
  if (get_or(cfg, "exact", false))
    run_solve_as<Rational>(cfg, ctx);
  else
    run_solve_as<long double>(cfg, ctx);
}

std::string rational_string(const Rational& r) {
  std::ostringstream o;
  o << r;
  return o.str();
}

void run_spontaneous(const json& cfg, Ctx& ctx) {
  auto r = verify_spontaneous_example(get_or(cfg, "q", 0.9), get_or(cfg, "delta", 0.99));
  json trace = json::array();
  for (Time t : r.trace) trace.push_back(t == kNever ? json("never") : json(t));
  ctx.result.report = {{"q", r.q},
                       {"delta", r.delta},
                       {"delta_defer_B", r.delta_defer_B},
                       {"delta_defer_d", r.delta_defer_d},
                       {"lr_period2", to_double(r.lr_period2_enumerated)},
                       {"lr_period2_formula_matches", r.lr_period2_formula == r.lr_period2_enumerated},
                       {"log10_lr_period2", r.log10_lr_period2},
                       {"log10_lr_period3", r.log10_lr_period3},
                       {"lr_period3_formula_matches", r.lr_period3_formula == r.lr_period3_enumerated},
                       {"lr_period2_exact", rational_string(r.lr_period2_enumerated)},
                       {"f_log_lr", r.f_log_lr},
                       {"f_adoption", time_string(r.f_adoption)},
                       {"neighbor_adoptions_before_f", r.neighbor_adoptions_before_f},
                       {"spontaneous", r.spontaneous()},
                       {"trace", trace}};
  ctx.write("spontaneous.json", ctx.result.report.dump(2) + "\n");
  if (!r.ratio_below_one()) ctx.fail("period-2 likelihood ratio is not below 1");
  if (!r.spontaneous()) ctx.fail("f did not adopt spontaneously");
  if (r.lr_period2_formula != r.lr_period2_enumerated || r.lr_period3_formula != r.lr_period3_enumerated)
    ctx.fail("closed-form likelihood ratio disagrees with enumeration");
}

void run_bounds(const json& cfg, Ctx& ctx) {
  json out;
  const double eps = need(cfg, "eps").get<double>();
  const auto m = get_or<std::size_t>(cfg, "m", 1);
  auto t = ck_recursion(m, eps);
  out["input"] = {{"eps", eps}, {"m", m}};
  out["alpha"] = t.alpha;
  out["c_0"] = t.c0;
  out["D"] = t.D;
  out["c_1"] = t.c1_literal;
  out["c_k"] = t.c;
  out["C_k"] = t.C;
  out["pbar"] = t.pbar;
  out["log_one_minus_pbar"] = t.log_one_minus_pbar;
  out["product_signal_bound"] = product_signal_bound(eps);
  if (ctx.opts.verify) {
    if (!(t.pbar < 1) && !(t.log_one_minus_pbar < 0)) ctx.fail("pbar not below 1");
    if (t.c1_literal != t.c0) ctx.fail("c_1 differs from c_0");
  }
  if (cfg.contains("family")) {
    BinaryFamily fam;
    for (const auto& p : cfg.at("family")) fam.emplace_back(p[0].get<double>(), p[1].get<double>());
    double e = family_belief_bound(fam), kl = product_kl_exact(fam);
    out["family"] = {{"eps", e}, {"kl_exact", kl}};
    if (e > 0 && e < 0.5) {
      double b = product_signal_bound(e);
      out["family"]["bound"] = b;
      if (kl > b) ctx.fail("product KL exceeds its bound");
    }
  }
  if (cfg.contains("chi")) {
    const auto& c = cfg.at("chi");
    std::vector<std::pair<double, double>> pairs;
    for (const auto& p : need(c, "pairs")) pairs.emplace_back(p[0].get<double>(), p[1].get<double>());
    auto s = chi_stats(pairs, get_or(c, "eps", eps), get_or(c, "target_q", 0.9), get_or(c, "grid_step", 1e-3));
    out["chi"] = {{"applicable", s.applicable}, {"mean_H", s.mean_H}, {"mean_L", s.mean_L},
                  {"var_H", s.var_H},           {"var_L", s.var_L},   {"rho", s.rho},
                  {"rho_prime", s.rho_prime},   {"var_bound", s.var_bound}, {"m_min", s.m_min},
                  {"f_signs_ok", s.f_signs_ok}};
    if (ctx.opts.verify && s.applicable && !s.f_signs_ok) ctx.fail("f_H/f_L sign condition failed");
  }
  if (cfg.contains("impatience")) {
    const auto& c = cfg.at("impatience");
    Network g = network_from_json(need(c, "network"), ctx.base_dir);
    SignalModel sm = model_from_json(need(c, "signal"));
    auto b = impatience_bound(g, sm, need(c, "delta").get<double>(), need(c, "delta_bar_target").get<double>(),
                              get_or<std::size_t>(c, "agent", 0));
    out["impatience"] = {{"u0", b.u0}, {"T", b.T}, {"m", b.m}, {"rho", b.rho}, {"bound", b.bound},
                         {"vacuous", b.vacuous}};
  }
  if (cfg.contains("b")) {
    double b = cfg.at("b").get<double>();
    out["delta_bar"] = delta_bar(b);
  }
  ctx.result.report = out;
  ctx.write("bounds.json", out.dump(2) + "\n");
}

void run_auxmodel(const json& cfg, Ctx& ctx, std::uint64_t seed) {
  SignalModel m = model_from_json(need(cfg, "signal"));
  json out;
  if (cfg.contains("mu")) {
    MuD mu = cfg.at("mu").get<MuD>();
    double u = u_of_mu(mu), w21 = w_mu(mu, m, {2, 1.0}), w11 = w_mu(mu, m, {1, 1.0});
    auto p = psi(mu, m);
    out["mu"] = {{"u", u},
                 {"eta", eta_of_mu(mu)},
                 {"psi", p.value},
                 {"psi_family", p.argmax.family},
                 {"psi_r", p.argmax.r},
                 {"w_a21", w21},
                 {"w_a11", w11}};
    if (ctx.opts.verify) {
      if (std::fabs(w21 - u) > 1e-12) ctx.fail("w(a_{2,1}) != u");
      if (std::fabs(w11) > 1e-12) ctx.fail("w(a_{1,1}) != 0");
    }
  }
  if (cfg.contains("sample")) {
    const auto& s = cfg.at("sample");
    auto grid = default_grid(get_or(s, "delta", 0.9), get_or<std::size_t>(s, "N", 6));
    const double eps = get_or(s, "eps", 0.05);
    auto est = estimate_C_eps(
        eps, m, [&](Rng& r) { return sample_mu(grid, r); }, get_or<std::size_t>(s, "count", 1000), seed,
        get_or<std::size_t>(s, "descent", 200));
    out["C_eps"] = {{"eps", eps},
                    {"estimate", est.estimate},
                    {"accepted", est.accepted},
                    {"rejected", est.rejected},
                    {"descent_steps", est.descent_steps},
                    {"min_gap", est.min_gap},
                    {"argmin", est.argmin},
                    {"argmin_family", est.argmin_strategy.family},
                    {"argmin_r", est.argmin_strategy.r}};
    if (est.accepted > 0 && est.estimate > 1) out["C_eps"]["min_delta"] = min_delta_for(est.estimate);
    if (ctx.opts.verify && est.accepted > 0 && !(est.min_gap > 0)) ctx.fail("psi did not exceed u on some sample");
  }
  ctx.result.report = out;
  ctx.write("auxmodel.json", out.dump(2) + "\n");
}

void run_protocol_sigma(const json& cfg, Ctx& ctx, std::uint64_t seed) {
  SignalModel m = model_from_json(need(cfg, "signal"));
  const auto n = need(cfg, "n").get<std::size_t>();
  auto p = sigma_params(m, get_or(cfg, "eta", 1e-3), get_or(cfg, "k", 50LL));
  const auto agent = get_or<std::size_t>(cfg, "agent", n / 2);
  auto e = ring_sigma_estimate(n, m, p, agent, need(cfg, "replications").get<std::size_t>(), seed,
                               get_or(cfg, "delta", 0.99), ctx.jobs);
  std::ostringstream csv;
  csv << "run_id,agent,p_hat,ci,utility,truncated_fraction\n";
  csv << get_or<std::string>(cfg, "run_id", "sigma") << ',' << agent << ',' << format_number(e.p_hat) << ','
      << format_number(e.ci) << ',' << format_number(e.utility) << ",0\n";
  ctx.write("results.csv", csv.str());
  ctx.result.report = {{"p_hat", e.p_hat},
                       {"ci", e.ci},
                       {"utility", e.utility},
                       {"mean_wave_distance", e.mean_wave_distance},
                       {"no_seed_fraction", e.no_seed_fraction},
                       {"k", p.k},
                       {"eta", p.eta},
                       {"qH", p.qH},
                       {"qL", p.qL}};
  if (cfg.contains("min_p_hat") && e.p_hat - e.ci < cfg.at("min_p_hat").get<double>())
    ctx.fail("p_hat below the required level");
}

void run_outsider(const json& cfg, Ctx& ctx, std::uint64_t seed) {
  Network g = network_from_json(need(cfg, "network"), ctx.base_dir);
  SignalModel m = model_from_json(need(cfg, "signal"));
  Profile p = profile_from_json(cfg, g, m, ctx.base_dir);
  std::vector<std::pair<double, double>> probs(g.size());
  const std::vector<Time> none(g.size(), kNever);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t k = 0; k < m.size(); ++k) {
      AgentView v(g, i, 0, m.belief(k), k, none);
      double a = p[i]->adopt_probability(v);
      probs[i].first += m.atom(k).likelihood_H * a;
      probs[i].second += m.atom(k).likelihood_L * a;
    }
  const auto reps = need(cfg, "replications").get<std::size_t>();
  const Time horizon = get_or<Time>(cfg, "horizon", 1);
  std::ostringstream csv;
  csv << "rep,state,posterior,log_odds,clamped\n";
  double on_truth = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng = make_stream(seed, r);
    auto tr = run_profile(g, m, p, horizon, rng);
    auto o = outsider_posterior(tr, probs);
    on_truth += tr.state == State::H ? o.posterior : 1 - o.posterior;
    csv << r << ',' << to_string(tr.state) << ',' << format_number(o.posterior) << ',' << format_number(o.log_odds)
        << ',' << o.clamped << '\n';
  }
  ctx.write("outsider.csv", csv.str());
  ctx.result.report = {{"replications", reps}, {"mean_posterior_on_truth", on_truth / static_cast<double>(reps)}};
}

}  // namespace

RunResult run_experiment(json cfg, const RunOptions& opts) {
  Ctx ctx{opts, {}, resolve_jobs(opts.jobs), {}};
  if (!opts.config_path.empty()) ctx.base_dir = fs::path(opts.config_path).parent_path().string();
  try {
    if (!cfg.is_object()) throw Error(ErrorKind::Validation, "config must be a JSON object");
    if (opts.seed) cfg["seed"] = *opts.seed;
    if (!cfg.contains("seed") || !cfg.at("seed").is_number_integer())
      throw Error(ErrorKind::Validation, "config needs an integer 'seed'");
    const auto seed = cfg.at("seed").get<std::uint64_t>();
    const std::string kind = need(cfg, "experiment").get<std::string>();
    fs::create_directories(opts.out_dir);
    ctx.result.report = json::object();
    if (kind == "simulate")
      run_simulate(cfg, ctx, seed);
    else if (kind == "solve")
      run_solve(cfg, ctx);
    else if (kind == "verify-spontaneous")
      run_spontaneous(cfg, ctx);
    else if (kind == "bounds")
      run_bounds(cfg, ctx);
    else if (kind == "auxmodel")
      run_auxmodel(cfg, ctx, seed);
    else if (kind == "protocol-sigma")
      run_protocol_sigma(cfg, ctx, seed);
    else if (kind == "outsider")
      run_outsider(cfg, ctx, seed);
    else
      throw Error(ErrorKind::Validation, "unknown experiment kind '" + kind + "'");
  } catch (const Error& e) {
    ctx.result.exit_code = kExitValidation;
    ctx.result.message = e.what();
  } catch (const json::exception& e) {
    ctx.result.exit_code = kExitValidation;
    ctx.result.message = std::string("config: ") + e.what();
  } catch (const std::exception& e) {
    ctx.result.exit_code = kExitRuntime;
    ctx.result.message = e.what();
  }
  ctx.result.report["config_hash"] = config_hash(cfg);
  return ctx.result;
}

RunResult run_config_file(const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  json cfg;
  {
    std::ifstream f(opts.config_path);
    if (!f) {
      RunResult r;
      r.exit_code = kExitValidation;
      r.message = "cannot read config " + opts.config_path;
      return r;
    }
    try {
      cfg = json::parse(f);
    } catch (const json::exception& e) {
      RunResult r;
      r.exit_code = kExitValidation;
      r.message = std::string("config parse error: ") + e.what();
      return r;
    }
  }
  RunResult r = run_experiment(cfg, opts);
  if (opts.seed && cfg.is_object()) cfg["seed"] = *opts.seed;
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = {{"config_hash", config_hash(cfg)},
                   {"tool_version", kToolVersion},
                   {"wall_time_seconds", wall},
                   {"exit_code", r.exit_code},
                   {"message", r.message},
                   {"files", r.files},
                   {"config", cfg},
                   {"report", r.report}};
  try {
    fs::create_directories(opts.out_dir);
    std::ofstream(fs::path(opts.out_dir) / "manifest.json") << manifest.dump(2) << "\n";
  } catch (const std::exception&) {
  }
  return r;
}

}  // namespace sdl
