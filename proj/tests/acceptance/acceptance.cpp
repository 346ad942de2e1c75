// Acceptance checks: one PASS/FAIL line per criterion, indented detail lines
// below it. Exit status is the number of failed criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "spreadlab/experiments.hpp"

using namespace spreadlab;

namespace {

struct Outcome {
  bool passed = false;
  std::vector<std::string> details;
};

int g_failed = 0;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void criterion(const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.passed = false;
    o.details.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = limit_seconds <= 0 || secs < limit_seconds;
  if (!in_time) o.details.push_back(fmt("runtime %.1f s exceeds the %.0f s limit", secs, limit_seconds));
  const bool ok = o.passed && in_time;
  if (!ok) ++g_failed;
  std::printf("%s  %s  [%.1f s]\n", ok ? "PASS" : "FAIL", name.c_str(), secs);
  for (const auto& d : o.details) std::printf("      %s\n", d.c_str());
  std::fflush(stdout);
}

int jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<NodeId> subset(const std::vector<NodeId>& from, std::mt19937_64& g) {
  std::vector<NodeId> out;
  for (NodeId i : from)
    if (g() % 2) out.push_back(i);
  return out;
}

std::vector<NodeId> complement(const std::vector<NodeId>& all, const std::vector<NodeId>& part) {
  std::vector<NodeId> out;
  for (NodeId i : all)
    if (std::find(part.begin(), part.end(), i) == part.end()) out.push_back(i);
  return out;
}

// Monte Carlo mean of C(t+1) - C(t) after testing and isolating K, against S(V \ K).
struct OneStep {
  double mean = 0.0, se = 0.0, predicted = 0.0;
};

OneStep one_step(const Adjacency& adj, const std::vector<State>& sigma, const std::vector<NodeId>& tested,
                 const ModelParams& p, int runs, std::uint64_t seed) {
  const NodeId n = static_cast<NodeId>(sigma.size());
  const auto net = ContactNetwork::make_static(n, adj);
  GroundTruthState base;
  base.sigma = sigma;
  base.isolated.assign(n, false);
  base.ever_infected.resize(n);
  for (NodeId i = 0; i < n; ++i) base.ever_infected[i] = sigma[i] != State::S;
  Rng rng(seed);
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < runs; ++r) {
    auto s = base;
    auto live = net;
    const auto obs = run_tests(s, live, tested);
    isolate_positives(live, s, obs);
    const int before = cumulative_infections(s);
    step(s, live, p, rng);
    const double d = cumulative_infections(s) - before;
    sum += d;
    sumsq += d * d;
  }
  OneStep o;
  o.mean = sum / runs;
  o.se = std::sqrt(std::max(0.0, sumsq / runs - o.mean * o.mean) / (runs - 1));
  std::vector<ProbVector> v(n);
  for (NodeId i = 0; i < n; ++i) v[i] = ProbVector::one_hot(sigma[i]);
  const auto snap = make_snapshot(adj, v, p.beta);
  std::vector<NodeId> all(n);
  for (NodeId i = 0; i < n; ++i) all[i] = i;
  o.predicted = expected_new_infections(complement(all, tested), snap);
  return o;
}

Adjacency from_edges(NodeId n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
  Adjacency adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& r : adj) std::sort(r.begin(), r.end());
  return adj;
}

}  // namespace

int main() {
  std::printf("acceptance checks (%d worker threads)\n", jobs());

  criterion("supermodularity and monotonicity of S: 500 instances, N <= 12", 10.0, [] {
    std::mt19937_64 g(101);
    int mono = 0, super = 0;
    for (int rep = 0; rep < 500; ++rep) {
      const auto snap = oracle::random_snapshot(2 + static_cast<NodeId>(g() % 11), g);
      const auto b = subset(snap.nodes, g);
      const auto a = subset(b, g);
      const double sa = expected_new_infections(a, snap), sb = expected_new_infections(b, snap);
      if (sa > sb + 1e-9) ++mono;
      const auto outside = complement(snap.nodes, b);
      if (outside.empty()) continue;
      const NodeId x = outside[g() % outside.size()];
      auto ax = a, bx = b;
      ax.push_back(x);
      bx.push_back(x);
      if (expected_new_infections(ax, snap) - sa > expected_new_infections(bx, snap) - sb + 1e-9) ++super;
    }
    return Outcome{mono == 0 && super == 0, {fmt("monotonicity violations %d, supermodularity violations %d", mono, super)}};
  });

  criterion("reward-sum upper bound on S(V \\ K): 500 instances, N <= 12", 0, [] {
    std::mt19937_64 g(202);
    int violations = 0;
    double worst = -1e300;
    for (int rep = 0; rep < 500; ++rep) {
      const auto snap = oracle::random_snapshot(2 + static_cast<NodeId>(g() % 11), g);
      const auto k = subset(snap.nodes, g);
      double bound = expected_new_infections(snap.nodes, snap);
      for (NodeId i : k) bound -= reward(i, snap);
      const double gap = expected_new_infections(complement(snap.nodes, k), snap) - bound;
      worst = std::max(worst, gap);
      if (gap > 1e-9) ++violations;
    }
    return Outcome{violations == 0, {fmt("violations %d, largest S(V\\K) - bound %.3g", violations, worst)}};
  });

  criterion("greedy within (1 + eps) of the exhaustive optimum: 200 instances, N <= 10, all budgets", 60.0, [] {
    std::mt19937_64 g(303);
    int violations = 0, unbounded = 0, cases = 0;
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      const auto snap = oracle::random_snapshot(2 + static_cast<NodeId>(g() % 9), g);
      const auto st = steepness_epsilon(snap);
      if (st.unbounded) ++unbounded;
      for (int b = 0; b <= snap.size(); ++b) {
        ++cases;
        const double value = expected_new_infections(complement(snap.nodes, greedy_select(snap, b)), snap);
        const double opt = brute_force_opt(snap, b).value;
        if (opt > 0) worst = std::max(worst, value / opt);
        if (!st.unbounded && value > (1.0 + st.epsilon) * opt + 1e-9) ++violations;
      }
    }
    return Outcome{violations == 0,
                   {fmt("%d (instance, budget) cases, violations %d, unbounded eps %d, worst greedy/opt %.4f", cases,
                        violations, unbounded, worst)}};
  });

  criterion("one-step expected infections match S(V \\ K): 5-node graph, 1e5 steps", 0, [] {
    ModelParams p{0.3, 0.5, 0.1, true};
    // Every susceptible node's infectious neighbors lie all inside or all outside K.
    const auto adj = from_edges(5, {{0, 1}, {0, 2}, {1, 2}, {2, 4}, {3, 4}});
    const std::vector<State> sigma{State::I, State::I, State::S, State::I, State::S};
    const auto r = one_step(adj, sigma, {3}, p, 100000, 7);
    Outcome o;
    o.passed = std::abs(r.mean - r.predicted) <= 3 * r.se;
    o.details.push_back(fmt("mean dC %.5f, S(V\\K) %.5f, sigma %.5f, |diff|/sigma %.2f", r.mean, r.predicted, r.se,
                            std::abs(r.mean - r.predicted) / r.se));
    // A susceptible node with infectious neighbors on both sides of K: isolation
    // removes K's pressure, while S(V \ K) still discounts it.
    const auto mixed = one_step(from_edges(3, {{0, 2}, {1, 2}}), {State::I, State::I, State::S}, {1}, p, 100000, 8);
    o.details.push_back(fmt("mixed instance (not a criterion): mean dC %.5f vs S(V\\K) %.5f, gap %.5f = beta^2 %.5f",
                            mixed.mean, mixed.predicted, mixed.mean - mixed.predicted, p.beta * p.beta));
    return o;
  });

  criterion("belief engine matches joint enumeration: <= 5 nodes, horizon <= 3, 100 patterns, 1e-12", 0, [] {
    std::mt19937_64 g(404);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    int patterns = 0;
    double worst = 0.0;
    while (patterns < 100) {
      const NodeId n = 2 + static_cast<NodeId>(g() % 4);
      const auto adj = oracle::random_graph(n, 0.6, g);
      ModelParams p{u(g), u(g), u(g), g() % 2 == 0};
      const int horizon = 1 + static_cast<int>(g() % 3);
      std::vector<ProbVector> w(n);
      for (auto& v : w) v = oracle::random_vector(g, false);
      std::vector<int> truth(n);
      for (NodeId i = 0; i < n; ++i) {
        std::discrete_distribution<int> d(w[i].p.begin(), w[i].p.end());
        truth[i] = d(g);
      }
      for (int day = 0; day < horizon && patterns < 100; ++day) {
        std::vector<int> next(n);
        for (NodeId i = 0; i < n; ++i) {
          int inf = 0;
          for (NodeId j : adj[i]) inf += truth[j] == 0;
          const auto r = oracle::row(truth[i], inf, p);
          std::discrete_distribution<int> d(r.begin(), r.end());
          next[i] = d(g);
        }
        truth = next;
        std::vector<TestOutcome> outcomes(n, TestOutcome::kNone);
        for (NodeId i = 0; i < n; ++i)
          if (g() % 2) outcomes[i] = truth[i] == 0 ? TestOutcome::kPositive : TestOutcome::kNegative;
        Rng rng(1);
        const auto e = backward_update(w, outcomes, adj, p, {}, rng);
        const auto w_next = posterior_from_e(e, outcomes, adj, p);
        for (NodeId i = 0; i < n; ++i) {
          const auto oe = oracle::corrected_posterior(i, w, outcomes, adj, p);
          const auto ow = oracle::posterior(i, e, outcomes[i], adj, p);
          for (int k = 0; k < 4; ++k) {
            worst = std::max(worst, std::abs(e[i].p[k] - oe.p[k]));
            worst = std::max(worst, std::abs(w_next[i].p[k] - ow.p[k]));
          }
        }
        w = w_next;
        ++patterns;
      }
    }
    return Outcome{worst <= 1e-12, {fmt("%d patterns, largest deviation %.3g", patterns, worst)}};
  });

  criterion("backward-forward beliefs recover the line: N = 20, exact zero by t = 2N, forward-only >= 0.5N at 10N",
            30.0, [] {
              const NodeId n = 20;
              const auto r = theorem2_errors(n);
              int first_zero = -1;
              bool stays = true;
              for (std::size_t t = 0; t < r.bf_error.size(); ++t) {
                if (r.bf_error[t] == 0.0 && first_zero < 0) first_zero = static_cast<int>(t);
                if (first_zero >= 0 && r.bf_error[t] != 0.0) stays = false;
              }
              const double naive = r.naive_error.back();
              Outcome o;
              o.passed = first_zero >= 0 && first_zero <= 2 * n && stays && naive >= 0.5 * n;
              o.details.push_back(fmt("backward-forward error first 0 at t = %d and %s; forward-only error at t = %d: %.4f",
                                      first_zero, stays ? "stays 0" : "does not stay 0",
                                      static_cast<int>(r.naive_error.size()) - 1, naive));
              return o;
            });

  criterion("exploration is necessary: line N = 200, B = 10, 100 paired seeds, C ratio >= 2 in >= 90%", 300.0, [] {
    const auto r = theorem3_runs(200, 10, 100, 20240101);
    int hits = 0;
    double mean_rbex = 0, mean_mixed = 0;
    for (std::size_t k = 0; k < r.rbex.size(); ++k) {
      hits += r.rbex[k] >= 2 * r.mixed[k];
      mean_rbex += r.rbex[k] / 100.0;
      mean_mixed += r.mixed[k] / 100.0;
    }
    Outcome o;
    o.passed = hits >= 90;
    o.details.push_back(fmt("ratio >= 2 in %d of 100 runs; mean C: exploit-only %.2f, 9 exploit + 1 random %.2f", hits,
                            mean_rbex, mean_mixed));
    // Lowest-id tie breaking sends the zero-reward tests to node 0, where the
    // infection starts. Skipping zero-reward nodes removes that shortcut.
    const auto v = theorem3_runs(200, 10, 100, 20240101, 0.01, true);
    int v_hits = 0;
    for (std::size_t k = 0; k < v.rbex.size(); ++k) v_hits += v.rbex[k] >= 2 * v.mixed[k];
    o.details.push_back(fmt("positive-reward-only variant (not a criterion): ratio >= 2 in %d of 100 runs", v_hits));
    return o;
  });

  criterion("WS(300,4,0.03) trend: Ratio positive, non-decreasing in ell, ell=3 within 0.097 +- 0.08, 200 reps", 1800.0,
            [] {
              Outcome o;
              std::vector<double> ratios;
              for (int ell : {3, 5, 7, 9, 11}) {
                auto c = scenario_config("ws");
                c.ell = ell;
                c.replications = 200;
                c.seed = 20240101;
                const auto p = paired_point(c, jobs());
                ratios.push_back(p.ratio);
                o.details.push_back(fmt("ell=%2d Ratio %.4f  dErr %.4f  mean C rbex %.2f reer %.2f none %.2f", ell, p.ratio,
                                        p.delta_err, p.mean_rbex, p.mean_reer, p.mean_none));
              }
              bool positive = true, nondecreasing = true;
              for (std::size_t k = 0; k < ratios.size(); ++k) {
                positive = positive && ratios[k] > 0;
                if (k > 0) nondecreasing = nondecreasing && ratios[k] >= ratios[k - 1];
              }
              const bool band = std::abs(ratios[0] - 0.097) <= 0.08;
              o.passed = positive && nondecreasing && band;
              o.details.push_back(fmt("positive %s, non-decreasing %s, ell=3 in band %s", positive ? "yes" : "no",
                                      nondecreasing ? "yes" : "no", band ? "yes" : "no"));
              return o;
            });

  criterion("SBM(300,10,.274,.02) at ell=5: Ratio negative, 200 reps", 0, [] {
    auto c = scenario_config("sbm");
    c.ell = 5;
    c.replications = 200;
    c.seed = 20240101;
    const auto p = paired_point(c, jobs());
    return Outcome{p.ratio < 0, {fmt("Ratio %.4f  dErr %.4f  mean C rbex %.2f reer %.2f none %.2f", p.ratio,
                                     p.delta_err, p.mean_rbex, p.mean_reer, p.mean_none)}};
  });

  criterion("topology metrics: WS(300,4,0) clustering 0.5, triangle 1, P3 path length 4/3", 0, [] {
    const double ws = topology_metrics(gen_watts_strogatz(300, 4, 0.0, 1), 0).gamma_c;
    const auto tri = topology_metrics(ContactNetwork::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}), 0);
    const auto p3 = topology_metrics(gen_line(3), 0);
    Outcome o;
    o.passed = ws == 0.5 && tri.gamma_c == 1.0 && p3.l_p && *p3.l_p == 4.0 / 3.0;
    o.details.push_back(fmt("WS gamma_c %.17g, triangle gamma_c %.17g, P3 L_p %.17g", ws, tri.gamma_c,
                            p3.l_p ? *p3.l_p : std::nan("")));
    return o;
  });

  criterion("determinism: reruns give byte-identical runs.csv", 0, [] {
    Outcome o;
    o.passed = true;
    for (const std::string policy : {"rbex", "reer", "acf", "logistic", "contact-tracing"}) {
      auto c = scenario_config("ws");
      c.policy.name = policy;
      c.replications = 8;
      c.horizon = 25;
      c.seed = 7;
      std::ostringstream a, b, d;
      write_runs_csv(a, run_replications(c, 1));
      write_runs_csv(b, run_replications(c, 1));
      write_runs_csv(d, run_replications(c, 4));
      const bool same = a.str() == b.str() && a.str() == d.str();
      o.passed = o.passed && same;
      o.details.push_back(fmt("%-16s %zu bytes, %s", policy.c_str(), a.str().size(), same ? "identical" : "DIFFERENT"));
    }
    return o;
  });

  std::printf("%d criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
