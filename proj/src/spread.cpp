#include "spreadlab/spread.hpp"

#include <cmath>
#include <numeric>

namespace spreadlab {

void ModelParams::validate() const {
  auto check = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter(std::string(name) + " must lie in [0,1]");
  };
  check(beta, "beta");
  check(lambda, "lambda");
  check(gamma, "gamma");
}

std::vector<std::string> ModelParams::warnings() const {
  std::vector<std::string> out;
  if (latent_enabled && lambda == 0.0)
    out.emplace_back("lambda = 0 with the latent state enabled: infected nodes never become infectious");
  return out;
}

GroundTruthState init_state(const ContactNetwork& net, int n0, Rng& rng, State seed_state) {
  const NodeId n = net.size();
  if (n0 < 0 || n0 > n) throw InvalidParameter("seed count must lie in [0, N]");
  GroundTruthState s;
  s.sigma.assign(n, State::S);
  s.ever_infected.assign(n, false);
  s.isolated.assign(n, false);
  std::vector<NodeId> all(n);
  std::iota(all.begin(), all.end(), 0);
  s.initial_seeds = sample_without_replacement(std::move(all), static_cast<std::size_t>(n0), rng);
  for (NodeId i : s.initial_seeds) {
    s.sigma[i] = seed_state;
    s.ever_infected[i] = true;
  }
  return s;
}

void step(GroundTruthState& state, const ContactNetwork& net, const ModelParams& params, Rng& rng) {
  const NodeId n = net.size();
  const Day t = state.day;
  std::vector<State> next = state.sigma;
  for (NodeId i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    switch (state.sigma[i]) {
      case State::S: {
        if (!net.is_active(i, t)) break;
        int k = 0;
        for (NodeId j : net.contacts(i, t))
          if (state.sigma[j] == State::I && net.is_active(j, t)) ++k;
        if (k == 0) break;
        const double p = 1.0 - std::pow(1.0 - params.beta, k);
        if (u < p) {
          next[i] = params.latent_enabled ? State::L : State::I;
          state.ever_infected[i] = true;
        }
        break;
      }
      case State::L:
        if (u < params.lambda) next[i] = State::I;
        break;
      case State::I:
        if (u < params.gamma) next[i] = State::R;
        break;
      case State::R:
        break;
    }
  }
  state.sigma = std::move(next);
  ++state.day;
}

std::vector<Observation> run_tests(const GroundTruthState& state, const ContactNetwork& net,
                                   std::span<const NodeId> nodes) {
  std::vector<Observation> out;
  out.reserve(nodes.size());
  for (NodeId i : nodes) {
    if (i < 0 || i >= net.size()) throw InvalidParameter("test of unknown node " + std::to_string(i));
    if (!net.is_active(i, state.day))
      throw InvalidParameter("test of isolated node " + std::to_string(i));
    out.push_back({i, state.day, state.sigma[i] == State::I});
  }
  return out;
}

void isolate_positives(ContactNetwork& net, GroundTruthState& state,
                       std::span<const Observation> observations) {
  for (const auto& o : observations)
    if (o.positive) {
      net.remove_node(o.node, state.day);
      state.isolated[o.node] = true;
    }
}

void run_unregulated(GroundTruthState& state, const ContactNetwork& net, const ModelParams& params,
                     int ell, Rng& rng) {
  if (ell < 0) throw InvalidParameter("unregulated delay must be non-negative");
  for (int k = 0; k < ell; ++k) step(state, net, params, rng);
}

NodeId reveal_seed(const GroundTruthState& state, Rng& rng) {
  if (state.initial_seeds.empty()) throw InvalidParameter("no initial seeds to reveal");
  std::vector<NodeId> live;
  for (NodeId i : state.initial_seeds)
    if (state.sigma[i] == State::I) live.push_back(i);
  const auto& pool = live.empty() ? state.initial_seeds : live;
  return pool[uniform_below(rng, pool.size())];
}

int cumulative_infections(const GroundTruthState& state) {
  int c = 0;
  for (bool b : state.ever_infected) c += b ? 1 : 0;
  return c;
}

int active_infectious(const GroundTruthState& state, const ContactNetwork& net) {
  int c = 0;
  for (NodeId i = 0; i < net.size(); ++i)
    if (state.sigma[i] == State::I && net.is_active(i, state.day)) ++c;
  return c;
}

}  // namespace spreadlab
