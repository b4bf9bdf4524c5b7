#include "sdl/simengine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "sdl/error.hpp"

namespace sdl {

ActionTrace run_profile(const Network& g, const SignalModel& model, const Profile& profile, Time horizon, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  State s = coin(rng) ? State::H : State::L;
  std::vector<std::size_t> atoms(g.size());
  for (auto& a : atoms) a = model.sample_atom(s, rng);
  return run_given(g, model, profile, horizon, s, atoms, rng);
}

ActionTrace run_given(const Network& g, const SignalModel& model, const Profile& profile, Time horizon, State state,
                      const std::vector<std::size_t>& atoms, Rng& rng) {
  const std::size_t n = g.size();
  if (horizon < 1) throw Error(ErrorKind::InvalidParameter, "horizon must be >= 1");
  if (profile.size() != n || atoms.size() != n)
    throw Error(ErrorKind::InvalidSize, "profile and signals must cover every agent");
  for (const auto& s : profile)
    if (!s) throw Error(ErrorKind::InvalidParameter, "profile has an undefined strategy");

  ActionTrace tr;
  tr.adoption_time.assign(n, kNever);
  tr.atoms = atoms;
  tr.beliefs.resize(n);
  for (std::size_t i = 0; i < n; ++i) tr.beliefs[i] = model.belief(atoms[i]);
  tr.state = state;
  tr.horizon = horizon;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> adopters;
  for (Time t = 0; t <= horizon; ++t) {
    adopters.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (tr.adoption_time[i] != kNever) continue;
      AgentView v(g, i, t, tr.beliefs[i], atoms[i], tr.adoption_time);
      double p = profile[i]->adopt_probability(v);
      if (p >= 1.0 || (p > 0.0 && unif(rng) < p)) adopters.push_back(i);
    }
    for (auto i : adopters) tr.adoption_time[i] = t;
    tr.halted_at = t;
    bool quiet = true;
    for (std::size_t i = 0; i < n && quiet; ++i) {
      if (tr.adoption_time[i] != kNever) continue;
      AgentView v(g, i, t + 1, tr.beliefs[i], atoms[i], tr.adoption_time);
      quiet = profile[i]->dormant(v);
    }
    if (quiet) return tr;
  }
  tr.truncated = true;
  return tr;
}

std::vector<bool> adjudicate(const ActionTrace& tr) {
  std::vector<bool> ok(tr.adoption_time.size());
  for (std::size_t i = 0; i < ok.size(); ++i) {
    bool adopted = tr.adoption_time[i] != kNever;
    ok[i] = adopted == (tr.state == State::H);
  }
  return ok;
}

double realized_utility(Time tau, State s, double delta) {
  if (tau == kNever) return 0.0;
  double v = std::pow(delta, static_cast<double>(tau));
  return s == State::H ? v : -v;
}

double ci_halfwidth(double p, std::size_t n) {
  return n == 0 ? 0.0 : 1.96 * std::sqrt(std::max(0.0, p * (1 - p)) / static_cast<double>(n));
}

namespace {

struct Accum {
  std::vector<double> correct, util, util_cens, cens_count, trunc;
  double runs_truncated = 0;
  explicit Accum(std::size_t n) : correct(n), util(n), util_cens(n), cens_count(n), trunc(n) {}
  void add(const Accum& o) {
    for (std::size_t i = 0; i < correct.size(); ++i) {
      correct[i] += o.correct[i];
      util[i] += o.util[i];
      util_cens[i] += o.util_cens[i];
      cens_count[i] += o.cens_count[i];
      trunc[i] += o.trunc[i];
    }
    runs_truncated += o.runs_truncated;
  }
};

constexpr std::size_t kBlock = 256;

}  // namespace

EstimateReport estimate(const Network& g, const SignalModel& model, const Profile& profile, Time horizon, double delta,
                        std::size_t n_reps, std::uint64_t seed, unsigned jobs) {
  if (n_reps < 1) throw Error(ErrorKind::InvalidParameter, "need at least one replication");
  if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidParameter, "delta must lie in (0,1)");
  const std::size_t n = g.size();
  const std::size_t blocks = (n_reps + kBlock - 1) / kBlock;
  std::vector<Accum> parts(blocks, Accum(n));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr err;
  std::mutex err_mu;

  auto worker = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= blocks || failed) return;
      try {
        Accum& acc = parts[b];
        for (std::size_t r = b * kBlock; r < std::min(n_reps, (b + 1) * kBlock); ++r) {
          Rng rng = make_stream(seed, r);
          ActionTrace tr = run_profile(g, model, profile, horizon, rng);
          auto ok = adjudicate(tr);
          acc.runs_truncated += tr.truncated ? 1 : 0;
          for (std::size_t i = 0; i < n; ++i) {
            double u = realized_utility(tr.adoption_time[i], tr.state, delta);
            acc.correct[i] += ok[i] ? 1 : 0;
            acc.util[i] += u;
            bool censored = tr.truncated && tr.adoption_time[i] == kNever;
            acc.trunc[i] += censored ? 1 : 0;
            if (!censored) {
              acc.util_cens[i] += u;
              acc.cens_count[i] += 1;
            }
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        failed = true;
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(blocks)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);

  Accum total(n);
  for (const auto& p : parts) total.add(p);
  EstimateReport rep;
  rep.reps = n_reps;
  rep.seed = seed;
  rep.truncated_fraction = total.runs_truncated / static_cast<double>(n_reps);
  const double N = static_cast<double>(n_reps);
  rep.agents.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& a = rep.agents[i];
    a.p_hat = total.correct[i] / N;
    a.ci = ci_halfwidth(a.p_hat, n_reps);
    a.utility = total.util[i] / N;
    a.utility_censored = total.cens_count[i] > 0 ? total.util_cens[i] / total.cens_count[i] : 0.0;
    a.truncated_fraction = total.trunc[i] / N;
  }
  return rep;
}

OutsiderResult outsider_posterior(const std::vector<bool>& adopted, const std::vector<std::pair<double, double>>& probs) {
  if (adopted.size() != probs.size()) throw Error(ErrorKind::InvalidSize, "one probability pair per agent");
  static const double kClamp = std::log(1e9);
  OutsiderResult r;
  for (std::size_t i = 0; i < adopted.size(); ++i) {
    auto [pH, pL] = probs[i];
    if (!(pH >= 0 && pH <= 1 && pL >= 0 && pL <= 1))
      throw Error(ErrorKind::InvalidParameter, "adoption probabilities must lie in [0,1]");
    double num = adopted[i] ? pH : 1 - pH, den = adopted[i] ? pL : 1 - pL;
    double term;
    if (num == 0 && den == 0) {
      ++r.clamped;
      term = 0;
    } else if (num == 0 || den == 0) {
      ++r.clamped;
      term = num == 0 ? -kClamp : kClamp;
    } else {
      term = std::log(num / den);
      if (std::fabs(term) > kClamp) {
        ++r.clamped;
        term = std::copysign(kClamp, term);
      }
    }
    r.log_odds += term;
  }
  r.posterior = logistic(r.log_odds);
  return r;
}

OutsiderResult outsider_posterior(const ActionTrace& tr, const std::vector<std::pair<double, double>>& probs) {
  std::vector<bool> a(tr.adoption_time.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = tr.adoption_time[i] == 0;
  return outsider_posterior(a, probs);
}

unsigned resolve_jobs(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("SDL_JOBS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace sdl
