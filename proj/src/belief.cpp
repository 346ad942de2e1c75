#include "spreadlab/belief.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace spreadlab {

double xi(std::span<const double> neighbor_infectious, double beta) {
  double stay = 1.0;
  for (double p : neighbor_infectious) stay *= 1.0 - p * beta;
  return 1.0 - stay;
}

Transition local_transition(double xi, const ModelParams& params) {
  const double g = params.gamma, l = params.lambda;
  Transition m{};
  m[0] = {1.0 - g, 0.0, g, 0.0};
  m[1] = {l, 1.0 - l, 0.0, 0.0};
  m[2] = {0.0, 0.0, 1.0, 0.0};
  if (params.latent_enabled)
    m[3] = {0.0, xi, 0.0, 1.0 - xi};
  else
    m[3] = {xi, 0.0, 0.0, 1.0 - xi};
  return m;
}

Transition modified_transition(const Transition& m, TestOutcome outcome) {
  if (outcome == TestOutcome::kNone) return m;
  Transition out = m;
  const bool positive = outcome == TestOutcome::kPositive;
  if (positive) {
    out[0] = {1.0, 0.0, 0.0, 0.0};
    out[1] = {1.0, 0.0, 0.0, 0.0};
  } else {
    out[0] = {0.0, 0.0, 1.0, 0.0};
    out[1] = {0.0, 1.0, 0.0, 0.0};
  }
  for (int r : {2, 3}) {
    auto row = m[r];
    double kept = 0.0;
    for (int c = 0; c < 4; ++c) {
      const bool consistent = (c == 0) == positive;
      if (!consistent) row[c] = 0.0;
      kept += row[c];
    }
    if (kept > 0.0) {
      for (double& x : row) x /= kept;
      out[r] = row;
    }
  }
  return out;
}

ProbVector propagate(const ProbVector& v, const Transition& m) {
  ProbVector out;
  out.p = {0.0, 0.0, 0.0, 0.0};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out.p[c] += v.p[r] * m[r][c];
  return out;
}

namespace {

std::vector<NodeId> closed(const Adjacency& adj, NodeId i) {
  std::vector<NodeId> out = adj[i];
  out.insert(std::lower_bound(out.begin(), out.end(), i), i);
  return out;
}

bool tested(std::span<const TestOutcome> outcomes, NodeId j) { return outcomes[j] != TestOutcome::kNone; }

std::vector<NodeId> sorted_unique(std::vector<NodeId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Pr(Y = 1 | previous state s, no-transmission probability q).
double positive_given(int s, double q, const ModelParams& params) {
  switch (s) {
    case 0: return 1.0 - params.gamma;
    case 1: return params.lambda;
    case 2: return 0.0;
    default: return params.latent_enabled ? 0.0 : 1.0 - q;
  }
}

double kernel(int s, double q, bool positive, const ModelParams& params) {
  const double p = positive_given(s, q, params);
  return positive ? p : 1.0 - p;
}

}  // namespace

ObservationSets observation_sets(NodeId i, std::span<const TestOutcome> outcomes, const Adjacency& prev) {
  ObservationSets sets;
  for (NodeId j : closed(prev, i))
    if (tested(outcomes, j)) sets.psi.push_back(j);
  for (NodeId k : sets.psi)
    for (NodeId l : closed(prev, k))
      if (l != i) sets.phi.push_back(l);
  for (NodeId k = 0; k < static_cast<NodeId>(outcomes.size()); ++k) {
    if (!tested(outcomes, k)) continue;
    for (NodeId l : closed(prev, k))
      if (l != i) sets.theta.push_back(l);
  }
  sets.phi = sorted_unique(std::move(sets.phi));
  sets.theta = sorted_unique(std::move(sets.theta));
  return sets;
}

std::array<double, 4> likelihood(NodeId i, std::span<const TestOutcome> outcomes,
                                 std::span<const ProbVector> w_prev, const Adjacency& prev,
                                 const ModelParams& params, const EnumerationCap& cap) {
  std::array<double, 4> out{1.0, 1.0, 1.0, 1.0};
  std::vector<NodeId> psi;
  for (NodeId j : closed(prev, i))
    if (tested(outcomes, j)) psi.push_back(j);
  if (psi.empty()) return out;

  // A tested node's result depends on its neighbors only when S leads straight to I.
  const bool neighbors_matter = !params.latent_enabled;
  std::map<NodeId, int> occurrences;
  for (NodeId j : psi) {
    if (j != i) ++occurrences[j];
    if (neighbors_matter)
      for (NodeId l : prev[j])
        if (l != i) ++occurrences[l];
  }
  std::map<NodeId, int> coupled_index;
  std::vector<NodeId> coupled;
  int coupled_psi = 0, coupled_phi = 0;
  for (auto [node, count] : occurrences) {
    if (count < 2) continue;
    coupled_index[node] = static_cast<int>(coupled.size());
    coupled.push_back(node);
    if (tested(outcomes, node))
      ++coupled_psi;
    else
      ++coupled_phi;
  }
  if (coupled_psi > cap.max_psi || coupled_phi > cap.max_phi || 2 * coupled_psi + coupled_phi > cap.max_bits)
    throw EnumerationTooWide("likelihood enumeration for node " + std::to_string(i) + " exceeds cap");

  struct Factor {
    bool positive = false;
    int own = -1;  // -1: node i, >= 0: coupled index, -2: summed out here
    NodeId node = 0;
    bool touches_i = false;
    double private_q = 1.0;
    std::vector<int> coupled_neighbors;
  };
  std::vector<Factor> factors;
  for (NodeId j : psi) {
    Factor f;
    f.node = j;
    f.positive = outcomes[j] == TestOutcome::kPositive;
    if (j == i)
      f.own = -1;
    else if (auto it = coupled_index.find(j); it != coupled_index.end())
      f.own = it->second;
    else
      f.own = -2;
    if (neighbors_matter)
      for (NodeId l : prev[j]) {
        if (l == i) {
          f.touches_i = true;
        } else if (auto it = coupled_index.find(l); it != coupled_index.end()) {
          f.coupled_neighbors.push_back(it->second);
        } else {
          f.private_q *= 1.0 - params.beta * w_prev[l].I();
        }
      }
    factors.push_back(std::move(f));
  }

  // Alphabet of each coupled variable with its prior weight, zero weights dropped.
  struct Symbol {
    int state;  // 0..3, or 4 for "not infectious"
    double weight;
  };
  std::vector<std::vector<Symbol>> alphabet(coupled.size());
  for (std::size_t c = 0; c < coupled.size(); ++c) {
    const ProbVector& w = w_prev[coupled[c]];
    if (tested(outcomes, coupled[c])) {
      for (int s = 0; s < 4; ++s)
        if (w.p[s] > 0.0) alphabet[c].push_back({s, w.p[s]});
    } else {
      if (w.I() > 0.0) alphabet[c].push_back({0, w.I()});
      if (w.I() < 1.0) alphabet[c].push_back({4, 1.0 - w.I()});
    }
    if (alphabet[c].empty()) return {0.0, 0.0, 0.0, 0.0};
  }

  std::array<double, 4> total{0.0, 0.0, 0.0, 0.0};
  std::vector<std::size_t> digit(coupled.size(), 0);
  const double pass = 1.0 - params.beta;
  while (true) {
    double weight = 1.0;
    for (std::size_t c = 0; c < coupled.size(); ++c) weight *= alphabet[c][digit[c]].weight;
    std::array<double, 4> prod{weight, weight, weight, weight};
    for (const Factor& f : factors) {
      double q = f.private_q;
      for (int c : f.coupled_neighbors)
        if (alphabet[c][digit[c]].state == 0) q *= pass;
      for (int x = 0; x < 4; ++x) {
        const double qx = (f.touches_i && x == 0) ? q * pass : q;
        double val;
        if (f.own == -1) {
          val = kernel(x, qx, f.positive, params);
        } else if (f.own >= 0) {
          val = kernel(alphabet[f.own][digit[f.own]].state, qx, f.positive, params);
        } else {
          const ProbVector& wj = w_prev[f.node];
          val = 0.0;
          for (int s = 0; s < 4; ++s)
            if (wj.p[s] > 0.0) val += wj.p[s] * kernel(s, qx, f.positive, params);
        }
        prod[x] *= val;
      }
    }
    for (int x = 0; x < 4; ++x) total[x] += prod[x];

    std::size_t c = 0;
    while (c < digit.size() && ++digit[c] == alphabet[c].size()) digit[c++] = 0;
    if (c == digit.size()) break;
  }
  return total;
}

double likelihood(NodeId i, State x, std::span<const TestOutcome> outcomes,
                  std::span<const ProbVector> w_prev, const Adjacency& prev, const ModelParams& params,
                  const EnumerationCap& cap) {
  return likelihood(i, outcomes, w_prev, prev, params, cap)[index_of(x)];
}

Adjacency alpha_subgraph(const Adjacency& adj, double alpha, Rng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidParameter("alpha must lie in [0,1]");
  if (alpha == 1.0) return adj;
  Adjacency out(adj.size());
  for (NodeId u = 0; u < static_cast<NodeId>(adj.size()); ++u)
    for (NodeId v : adj[u])
      if (u < v && uniform01(rng) < alpha) {
        out[u].push_back(v);
        out[v].push_back(u);
      }
  for (auto& row : out) std::sort(row.begin(), row.end());
  return out;
}

namespace {

// Flat prior over the previous state, conditioned on the node's own result.
constexpr double kResetShare = 1e-60;

// States the model can occupy: L needs the latent state, R needs recovery.
bool reachable(int s, const ModelParams& params) {
  if (s == index_of(State::L)) return params.latent_enabled;
  if (s == index_of(State::R)) return params.gamma > 0.0;
  return true;
}

// Flat over the reachable states consistent with the outcome.
ProbVector flat_consistent(TestOutcome outcome, const ModelParams& params) {
  if (outcome == TestOutcome::kPositive) return ProbVector::one_hot(State::I);
  ProbVector v;
  for (int s = 0; s < 4; ++s)
    v.p[s] = reachable(s, params) && !(outcome == TestOutcome::kNegative && s == index_of(State::I)) ? 1.0 : 0.0;
  normalize(v);
  return v;
}

ProbVector evidence_only(TestOutcome outcome, double q, const ModelParams& params) {
  ProbVector v;
  const bool positive = outcome == TestOutcome::kPositive;
  for (int s = 0; s < 4; ++s) v.p[s] = reachable(s, params) ? kernel(s, q, positive, params) : 0.0;
  if (!normalize(v)) v = flat_consistent(outcome, params);
  return v;
}

double expected_no_transmission(NodeId i, std::span<const ProbVector> w, const Adjacency& adj, double beta) {
  double q = 1.0;
  for (NodeId j : adj[i]) q *= 1.0 - beta * w[j].I();
  return q;
}

}  // namespace

std::vector<ProbVector> backward_update(std::span<const ProbVector> w_prev,
                                        std::span<const TestOutcome> outcomes, const Adjacency& prev,
                                        const ModelParams& params, const BackwardOptions& options,
                                        Rng& rng, BeliefStats* stats) {
  const NodeId n = static_cast<NodeId>(w_prev.size());
  std::vector<ProbVector> e(w_prev.begin(), w_prev.end());
  std::vector<ProbVector> smoothed;  // built on the first inconsistent node
  for (NodeId i = 0; i < n; ++i) {
    const Adjacency* adj = &prev;
    Adjacency thin;
    std::array<double, 4> like;
    try {
      like = likelihood(i, outcomes, w_prev, prev, params, options.cap);
    } catch (const EnumerationTooWide&) {
      if (stats) ++stats->thinned_nodes;
      double alpha = 0.8;
      while (true) {
        thin = alpha_subgraph(prev, alpha, rng);
        try {
          like = likelihood(i, outcomes, w_prev, thin, params, options.cap);
          adj = &thin;
          break;
        } catch (const EnumerationTooWide&) {
          alpha = alpha < 0.01 ? 0.0 : alpha * 0.8;
        }
      }
    }
    ProbVector v;
    for (int x = 0; x < 4; ++x) v.p[x] = like[x] * w_prev[i].p[x];
    if (normalize(v)) {
      e[i] = v;
      continue;
    }
    if (options.on_inconsistent == OnInconsistent::kThrow)
      throw InconsistentEvidence("backward step: evidence has zero probability for node " + std::to_string(i));
    if (stats) ++stats->resets;
    // Masses lost to underflow come back as a tiny flat share over the reachable states.
    if (smoothed.empty()) {
      smoothed.assign(w_prev.begin(), w_prev.end());
      const ProbVector flat = flat_consistent(TestOutcome::kNone, params);
      for (auto& s : smoothed)
        for (int x = 0; x < 4; ++x) s.p[x] = (1.0 - kResetShare) * s.p[x] + kResetShare * flat.p[x];
    }
    const auto like_s = likelihood(i, outcomes, smoothed, *adj, params, options.cap);
    for (int x = 0; x < 4; ++x) v.p[x] = like_s[x] * smoothed[i].p[x];
    if (normalize(v)) {
      e[i] = v;
      continue;
    }
    e[i] = tested(outcomes, i)
               ? evidence_only(outcomes[i], expected_no_transmission(i, w_prev, prev, params.beta), params)
               : w_prev[i];
  }
  return e;
}

std::vector<ProbVector> posterior_from_e(std::span<const ProbVector> e_prev,
                                         std::span<const TestOutcome> outcomes, const Adjacency& prev,
                                         const ModelParams& params, OnInconsistent on_inconsistent,
                                         BeliefStats* stats) {
  const NodeId n = static_cast<NodeId>(e_prev.size());
  std::vector<ProbVector> w(n);
  std::vector<double> infectious;
  for (NodeId i = 0; i < n; ++i) {
    infectious.clear();
    for (NodeId j : prev[i]) infectious.push_back(e_prev[j].I());
    const Transition m = modified_transition(local_transition(xi(infectious, params.beta), params), outcomes[i]);
    w[i] = propagate(e_prev[i], m);
    if (normalize(w[i])) continue;
    if (on_inconsistent == OnInconsistent::kThrow)
      throw InconsistentEvidence("posterior has zero mass for node " + std::to_string(i));
    if (stats) ++stats->resets;
    w[i] = flat_consistent(outcomes[i], params);
  }
  return w;
}

std::vector<ProbVector> forward_update(std::span<const ProbVector> w, const Adjacency& adj,
                                       const ModelParams& params) {
  const NodeId n = static_cast<NodeId>(w.size());
  std::vector<ProbVector> u(n);
  std::vector<double> infectious;
  for (NodeId i = 0; i < n; ++i) {
    infectious.clear();
    for (NodeId j : adj[i]) infectious.push_back(w[j].I());
    u[i] = propagate(w[i], local_transition(xi(infectious, params.beta), params));
    normalize(u[i]);
  }
  return u;
}

ProbVector local_condition(const ProbVector& v, TestOutcome outcome, OnInconsistent on_inconsistent,
                           BeliefStats* stats) {
  if (outcome == TestOutcome::kNone) return v;
  if (outcome == TestOutcome::kPositive) return ProbVector::one_hot(State::I);
  ProbVector out = v;
  out.p[0] = 0.0;
  if (normalize(out)) return out;
  if (on_inconsistent == OnInconsistent::kThrow)
    throw InconsistentEvidence("negative test for a node believed infectious with certainty");
  if (stats) ++stats->resets;
  out.p = {0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return out;
}

BeliefState make_belief_state(std::vector<ProbVector> prior, Day day, const ContactNetwork& net) {
  if (static_cast<NodeId>(prior.size()) != net.size()) throw InvalidParameter("prior size does not match network");
  BeliefState s;
  s.day = day;
  for (auto& v : prior)
    if (!normalize(v)) throw InvalidParameter("prior vector has no mass");
  s.u = std::move(prior);
  s.w = s.u;
  s.e = s.u;
  s.active.resize(net.size());
  for (NodeId i = 0; i < net.size(); ++i) s.active[i] = net.is_active(i, day);
  return s;
}

std::vector<TestOutcome> outcomes_for(std::span<const Observation> observations, NodeId n, Day day) {
  std::vector<TestOutcome> out(n, TestOutcome::kNone);
  for (const auto& o : observations) {
    if (o.day != day) throw InvalidParameter("observation dated " + std::to_string(o.day) + " on day " + std::to_string(day));
    if (o.node < 0 || o.node >= n) throw InvalidParameter("observation of unknown node");
    out[o.node] = o.positive ? TestOutcome::kPositive : TestOutcome::kNegative;
  }
  return out;
}

namespace {

void finish_day(BeliefState& state, std::vector<ProbVector> w_now, std::span<const Observation> observations,
                const ContactNetwork& net, const ModelParams& params) {
  const Day t = state.day;
  const NodeId n = net.size();
  const Adjacency today = net.snapshot(t);
  const std::vector<ProbVector> u_next = forward_update(w_now, today, params);
  for (NodeId i = 0; i < n; ++i) {
    state.active[i] = net.is_active(i, t);
    if (!state.active[i]) continue;
    state.w[i] = w_now[i];
    state.u[i] = u_next[i];
  }
  state.log.insert(state.log.end(), observations.begin(), observations.end());
  state.has_posterior = true;
  state.day = t + 1;
}

}  // namespace

void bf_step(BeliefState& state, std::span<const Observation> observations, const ContactNetwork& net,
             const ModelParams& params, const BeliefOptions& options, Rng& rng) {
  const Day t = state.day;
  const NodeId n = net.size();
  const auto outcomes = outcomes_for(observations, n, t);
  const OnInconsistent mode = options.backward.on_inconsistent;
  std::vector<ProbVector> w_now;
  if (!state.has_posterior) {
    // No posterior for day t-1 yet: condition the prior on the node's own result.
    w_now = state.u;
    for (NodeId i = 0; i < n; ++i) w_now[i] = local_condition(state.u[i], outcomes[i], mode, &state.stats);
  } else {
    const Adjacency prev = net.snapshot(t - 1);
    if (options.alpha < 1.0) {
      const Adjacency thin = alpha_subgraph(prev, options.alpha, rng);
      state.e = backward_update(state.w, outcomes, thin, params, options.backward, rng, &state.stats);
    } else {
      state.e = backward_update(state.w, outcomes, prev, params, options.backward, rng, &state.stats);
    }
    w_now = posterior_from_e(state.e, outcomes, prev, params, mode, &state.stats);
  }
  finish_day(state, std::move(w_now), observations, net, params);
}

void naive_forward_step(BeliefState& state, std::span<const Observation> observations,
                        const ContactNetwork& net, const ModelParams& params, OnInconsistent on_inconsistent) {
  const NodeId n = net.size();
  const auto outcomes = outcomes_for(observations, n, state.day);
  std::vector<ProbVector> w_now = state.u;
  for (NodeId i = 0; i < n; ++i) w_now[i] = local_condition(state.u[i], outcomes[i], on_inconsistent, &state.stats);
  finish_day(state, std::move(w_now), observations, net, params);
}

}  // namespace spreadlab
