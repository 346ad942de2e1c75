#include "spreadlab/objective.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace spreadlab {

BeliefSnapshot make_snapshot(const ContactNetwork& net, Day t, std::vector<ProbVector> v, double beta) {
  if (static_cast<NodeId>(v.size()) != net.size()) throw InvalidParameter("snapshot size does not match network");
  BeliefSnapshot s;
  s.adjacency = net.snapshot(t);
  s.v = std::move(v);
  s.nodes = net.active_nodes(t);
  s.beta = beta;
  s.day = t;
  return s;
}

BeliefSnapshot make_snapshot(Adjacency adjacency, std::vector<ProbVector> v, double beta) {
  if (adjacency.size() != v.size()) throw InvalidParameter("snapshot size does not match adjacency");
  BeliefSnapshot s;
  s.adjacency = std::move(adjacency);
  s.v = std::move(v);
  s.nodes.resize(s.v.size());
  for (NodeId i = 0; i < s.size(); ++i) s.nodes[i] = i;
  s.beta = beta;
  return s;
}

NodeMask to_mask(std::span<const NodeId> nodes, NodeId n) {
  NodeMask m(n, 0);
  for (NodeId i : nodes) m.at(i) = 1;
  return m;
}

double expected_F(NodeId i, const NodeMask& D, const BeliefSnapshot& snap) {
  const double vs = snap.v[i].S();
  if (vs == 0.0) return 0.0;
  double outside = 1.0, inside = 1.0;
  for (NodeId j : snap.adjacency[i]) {
    const double f = 1.0 - snap.beta * snap.v[j].I();
    if (D[j])
      inside *= f;
    else
      outside *= f;
  }
  return vs * outside * (1.0 - inside);
}

double expected_new_infections(const NodeMask& D, const BeliefSnapshot& snap) {
  double total = 0.0;
  for (NodeId i : snap.nodes) total += expected_F(i, D, snap);
  return total;
}

double expected_new_infections(std::span<const NodeId> D, const BeliefSnapshot& snap) {
  return expected_new_infections(to_mask(D, snap.size()), snap);
}

double reward(NodeId i, const BeliefSnapshot& snap) {
  // Only the neighbors of i have a non-zero term in S({i}).
  const double pi = snap.v[i].I();
  if (pi == 0.0) return 0.0;
  double r = 0.0;
  for (NodeId k : snap.adjacency[i]) {
    const double vs = snap.v[k].S();
    if (vs == 0.0) continue;
    double outside = 1.0;
    for (NodeId j : snap.adjacency[k])
      if (j != i) outside *= 1.0 - snap.beta * snap.v[j].I();
    r += vs * outside * snap.beta * pi;
  }
  return r;
}

std::vector<double> rewards(const BeliefSnapshot& snap) {
  std::vector<double> r(snap.size(), 0.0);
  for (NodeId i : snap.nodes) r[i] = reward(i, snap);
  return r;
}

Steepness steepness_epsilon(const BeliefSnapshot& snap) {
  NodeMask all(snap.size(), 0);
  for (NodeId i : snap.nodes) all[i] = 1;
  const double s_all = expected_new_infections(all, snap);
  Steepness out;
  bool any = false;
  for (NodeId a : snap.nodes) {
    all[a] = 0;
    const double denom = s_all - expected_new_infections(all, snap);
    all[a] = 1;
    if (!(denom > 0.0)) continue;
    const double q = (denom - reward(a, snap)) / denom;
    out.eps_prime = any ? std::max(out.eps_prime, q) : q;
    any = true;
  }
  if (!any) return {};
  out.eps_prime = std::max(out.eps_prime, 0.0);
  if (out.eps_prime >= 1.0) {
    out.unbounded = true;
    out.epsilon = std::numeric_limits<double>::infinity();
  } else {
    out.epsilon = out.eps_prime / (4.0 * (1.0 - out.eps_prime));
  }
  return out;
}

std::vector<NodeId> greedy_select(const BeliefSnapshot& snap, int budget) {
  if (budget < 0) throw InvalidParameter("budget must be non-negative");
  const NodeId active = static_cast<NodeId>(snap.nodes.size());
  std::vector<char> remaining(snap.size(), 0);
  for (NodeId i : snap.nodes) remaining[i] = 1;
  if (budget >= active) return snap.nodes;

  NodeMask removed(snap.size(), 0);
  double current = 0.0;
  constexpr double kTie = 1e-12;
  for (NodeId step = 0; step < active - budget; ++step) {
    NodeId best = -1;
    double best_value = 0.0;
    for (NodeId a : snap.nodes) {
      if (!remaining[a]) continue;
      // Adding a to D only changes the terms of a's neighbors.
      double delta = 0.0;
      for (NodeId k : snap.adjacency[a]) delta -= expected_F(k, removed, snap);
      removed[a] = 1;
      for (NodeId k : snap.adjacency[a]) delta += expected_F(k, removed, snap);
      removed[a] = 0;
      const double value = current + delta;
      if (best < 0 || value < best_value - kTie) {
        best = a;
        best_value = value;
      }
    }
    removed[best] = 1;
    remaining[best] = 0;
    current = best_value;
  }
  std::vector<NodeId> kept;
  for (NodeId i : snap.nodes)
    if (remaining[i]) kept.push_back(i);
  return kept;
}

BruteForceResult brute_force_opt(const BeliefSnapshot& snap, int budget) {
  const NodeId active = static_cast<NodeId>(snap.nodes.size());
  if (active > kBruteForceLimit) throw InvalidParameter("brute force refused above 20 active nodes");
  if (budget < 0) throw InvalidParameter("budget must be non-negative");
  BruteForceResult best;
  bool found = false;
  NodeMask D(snap.size(), 0);
  for (std::uint32_t mask = 0; mask < (1u << active); ++mask) {
    if (std::popcount(mask) > budget) continue;
    for (NodeId k = 0; k < active; ++k) D[snap.nodes[k]] = (mask >> k) & 1u ? 0 : 1;
    const double value = expected_new_infections(D, snap);
    if (!found || value < best.value) {
      found = true;
      best.value = value;
      best.tested.clear();
      for (NodeId k = 0; k < active; ++k)
        if ((mask >> k) & 1u) best.tested.push_back(snap.nodes[k]);
    }
  }
  return best;
}

}  // namespace spreadlab
