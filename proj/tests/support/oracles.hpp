#pragma once

// Brute-force references used by the unit and acceptance tests. They share no
// code with the library beyond its plain data types.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "spreadlab/belief.hpp"
#include "spreadlab/objective.hpp"

namespace oracle {

using spreadlab::Adjacency;
using spreadlab::ModelParams;
using spreadlab::NodeId;
using spreadlab::ProbVector;
using spreadlab::TestOutcome;

// Row of the one-day kernel for a node in state `from` whose neighbors hold
// `infectious_neighbors` infectious nodes, each transmitting with beta.
inline std::array<double, 4> row(int from, int infectious_neighbors, const ModelParams& p) {
  const double infect = 1.0 - std::pow(1.0 - p.beta, infectious_neighbors);
  switch (from) {
    case 0: return {1.0 - p.gamma, 0.0, p.gamma, 0.0};
    case 1: return {p.lambda, 1.0 - p.lambda, 0.0, 0.0};
    case 2: return {0.0, 0.0, 1.0, 0.0};
    default:
      if (p.latent_enabled) return {0.0, infect, 0.0, 1.0 - infect};
      return {infect, 0.0, 0.0, 1.0 - infect};
  }
}

inline bool consistent(int state, TestOutcome y) {
  if (y == TestOutcome::kNone) return true;
  return (state == 0) == (y == TestOutcome::kPositive);
}

// Corrected posterior of node i: the day t-1 joint is the product of w_prev,
// every node moves independently given that joint, and the evidence is the
// day t results of tested nodes in i's closed neighborhood.
inline ProbVector corrected_posterior(NodeId i, const std::vector<ProbVector>& w_prev,
                                      const std::vector<TestOutcome>& outcomes, const Adjacency& prev,
                                      const ModelParams& p) {
  const NodeId n = static_cast<NodeId>(w_prev.size());
  std::vector<NodeId> evidence;
  if (outcomes[i] != TestOutcome::kNone) evidence.push_back(i);
  for (NodeId j : prev[i])
    if (outcomes[j] != TestOutcome::kNone) evidence.push_back(j);
  std::array<double, 4> acc{0, 0, 0, 0};
  std::vector<int> x(n, 0);
  long long total = 1;
  for (NodeId k = 0; k < n; ++k) total *= 4;
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    double prior = 1.0;
    for (NodeId k = 0; k < n; ++k) {
      x[k] = static_cast<int>(c % 4);
      c /= 4;
      prior *= w_prev[k].p[x[k]];
    }
    if (prior == 0.0) continue;
    double like = 1.0;
    for (NodeId j : evidence) {
      int inf = 0;
      for (NodeId l : prev[j]) inf += x[l] == 0;
      const auto r = row(x[j], inf, p);
      like *= outcomes[j] == TestOutcome::kPositive ? r[0] : 1.0 - r[0];
    }
    acc[x[i]] += prior * like;
  }
  ProbVector e;
  const double s = acc[0] + acc[1] + acc[2] + acc[3];
  for (int k = 0; k < 4; ++k) e.p[k] = acc[k] / s;
  return e;
}

// Posterior at day t: each row of i's kernel, averaged over independent
// neighbor states drawn from e_prev, is conditioned on i's own result; rows
// without consistent mass are kept as they are.
inline ProbVector posterior(NodeId i, const std::vector<ProbVector>& e_prev, TestOutcome y, const Adjacency& prev,
                            const ModelParams& p) {
  const auto& nb = prev[i];
  const std::size_t m = nb.size();
  ProbVector w;
  w.p = {0, 0, 0, 0};
  for (int from = 0; from < 4; ++from) {
    std::array<double, 4> avg{0, 0, 0, 0};
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      double pr = 1.0;
      int inf = 0;
      for (std::size_t k = 0; k < m; ++k) {
        const double pi = e_prev[nb[k]].p[0];
        if (mask >> k & 1u) {
          pr *= pi;
          ++inf;
        } else {
          pr *= 1.0 - pi;
        }
      }
      const auto r = row(from, inf, p);
      for (int to = 0; to < 4; ++to) avg[to] += pr * r[to];
    }
    double keep = 0.0;
    for (int to = 0; to < 4; ++to) keep += consistent(to, y) ? avg[to] : 0.0;
    for (int to = 0; to < 4; ++to) {
      const double v = keep > 0.0 ? (consistent(to, y) ? avg[to] / keep : 0.0) : avg[to];
      w.p[to] += e_prev[i].p[from] * v;
    }
  }
  const double s = w.sum();
  for (double& v : w.p) v /= s;
  return w;
}

// Eq.-level reference for expected new infections through D.
inline double expected_F(NodeId i, const std::vector<char>& in_d, const Adjacency& adj,
                         const std::vector<ProbVector>& v, double beta) {
  double outside = 1.0, inside = 1.0;
  for (NodeId j : adj[i]) (in_d[j] ? inside : outside) *= 1.0 - beta * v[j].p[0];
  return v[i].p[3] * outside * (1.0 - inside);
}

inline double S(const std::vector<char>& in_d, const Adjacency& adj, const std::vector<ProbVector>& v, double beta) {
  double s = 0.0;
  for (NodeId i = 0; i < static_cast<NodeId>(adj.size()); ++i) s += expected_F(i, in_d, adj, v, beta);
  return s;
}

inline ProbVector random_vector(std::mt19937_64& g, bool allow_zeros = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ProbVector v;
  double s = 0.0;
  for (double& x : v.p) {
    x = u(g);
    if (allow_zeros && u(g) < 0.2) x = 0.0;
    s += x;
  }
  if (s == 0.0) {
    v.p = {0, 0, 0, 1};
    return v;
  }
  for (double& x : v.p) x /= s;
  return v;
}

inline Adjacency random_graph(NodeId n, double p, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Adjacency adj(n);
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b)
      if (u(g) < p) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
  return adj;
}

// Random belief snapshot with n nodes, edge probability and beta drawn fresh.
inline spreadlab::BeliefSnapshot random_snapshot(NodeId n, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double p = 0.2 + 0.6 * u(g);
  auto adj = random_graph(n, p, g);
  std::vector<ProbVector> v(n);
  for (auto& x : v) x = random_vector(g);
  return spreadlab::make_snapshot(std::move(adj), std::move(v), 0.05 + 0.9 * u(g));
}

}  // namespace oracle
