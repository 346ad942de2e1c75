#pragma once

#include <span>
#include <string>
#include <vector>

#include "spreadlab/graph.hpp"
#include "spreadlab/rng.hpp"
#include "spreadlab/types.hpp"

namespace spreadlab {

struct ModelParams {
  double beta = 0.0;    // per-contact transmission probability
  double lambda = 0.0;  // probability of leaving L per day
  double gamma = 0.0;   // probability of recovering per day
  bool latent_enabled = true;

  // Throws InvalidParameter for probabilities outside [0,1].
  void validate() const;
  // Non-fatal concerns, e.g. lambda = 0 with the latent state enabled.
  std::vector<std::string> warnings() const;
};

struct GroundTruthState {
  std::vector<State> sigma;
  std::vector<bool> ever_infected;
  std::vector<bool> isolated;
  std::vector<NodeId> initial_seeds;
  Day day = 0;
};

struct Observation {
  NodeId node = 0;
  Day day = 0;
  bool positive = false;
  bool operator==(const Observation&) const = default;
};

GroundTruthState init_state(const ContactNetwork& net, int n0, Rng& rng, State seed_state = State::I);

// One synchronous day. Draws exactly one uniform per node, in id order, so
// runs that share a generator state share their coin flips.
void step(GroundTruthState& state, const ContactNetwork& net, const ModelParams& params, Rng& rng);

std::vector<Observation> run_tests(const GroundTruthState& state, const ContactNetwork& net,
                                   std::span<const NodeId> nodes);

void isolate_positives(ContactNetwork& net, GroundTruthState& state,
                       std::span<const Observation> observations);

void run_unregulated(GroundTruthState& state, const ContactNetwork& net, const ModelParams& params,
                     int ell, Rng& rng);

NodeId reveal_seed(const GroundTruthState& state, Rng& rng);

int cumulative_infections(const GroundTruthState& state);

// Active nodes currently in state I.
int active_infectious(const GroundTruthState& state, const ContactNetwork& net);

}  // namespace spreadlab
