#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "spreadlab/graph.hpp"
#include "spreadlab/rng.hpp"
#include "spreadlab/spread.hpp"
#include "spreadlab/types.hpp"

namespace spreadlab {

enum class TestOutcome : std::uint8_t { kNone, kNegative, kPositive };

// Row-stochastic; rows and columns in (I, L, R, S) order.
using Transition = std::array<std::array<double, 4>, 4>;

// 1 - prod(1 - beta * p_I) over the given neighbor I-probabilities; 0 when empty.
double xi(std::span<const double> neighbor_infectious, double beta);

Transition local_transition(double xi, const ModelParams& params);

// Rows I and L are replaced by unit rows as dictated by the outcome. Rows S
// and R keep only the entries consistent with the outcome (renormalized) and
// are left unchanged when no consistent mass exists.
Transition modified_transition(const Transition& m, TestOutcome outcome);

ProbVector propagate(const ProbVector& v, const Transition& m);

struct ObservationSets {
  std::vector<NodeId> psi;    // tested nodes in the closed neighborhood of i
  std::vector<NodeId> phi;    // closed neighborhoods of psi, without i
  std::vector<NodeId> theta;  // closed neighborhoods of all tested nodes, without i
};

// `prev` is the day t-1 adjacency, outcomes are the day-t tests.
ObservationSets observation_sets(NodeId i, std::span<const TestOutcome> outcomes, const Adjacency& prev);

struct EnumerationCap {
  int max_psi = 12;   // tested nodes whose own state is enumerated jointly
  int max_phi = 20;   // neighbor variables enumerated jointly
  int max_bits = 24;  // log2 of the joint configuration count
};

// Pr(Y_psi(t) | state of i at t-1 = x) for each x. Neighbor variables that
// touch a single tested node are summed out in closed form; the rest are
// enumerated over (I, not-I). Throws EnumerationTooWide beyond the cap.
std::array<double, 4> likelihood(NodeId i, std::span<const TestOutcome> outcomes,
                                 std::span<const ProbVector> w_prev, const Adjacency& prev,
                                 const ModelParams& params, const EnumerationCap& cap = {});

double likelihood(NodeId i, State x, std::span<const TestOutcome> outcomes,
                  std::span<const ProbVector> w_prev, const Adjacency& prev, const ModelParams& params,
                  const EnumerationCap& cap = {});

enum class OnInconsistent { kThrow, kResetToEvidence };

struct BeliefStats {
  long long thinned_nodes = 0;  // nodes whose backward step needed extra edge thinning
  long long resets = 0;         // vectors rebuilt from local evidence after impossible evidence
};

struct BackwardOptions {
  EnumerationCap cap;
  OnInconsistent on_inconsistent = OnInconsistent::kThrow;
};

// Corrected posteriors e(t-1). Only nodes with a non-empty neighbor list or a
// test are touched; `prev` must list active nodes only.
std::vector<ProbVector> backward_update(std::span<const ProbVector> w_prev,
                                        std::span<const TestOutcome> outcomes, const Adjacency& prev,
                                        const ModelParams& params, const BackwardOptions& options,
                                        Rng& rng, BeliefStats* stats = nullptr);

// w(t) from e(t-1) through the observation-modified transition of each node.
std::vector<ProbVector> posterior_from_e(std::span<const ProbVector> e_prev,
                                         std::span<const TestOutcome> outcomes, const Adjacency& prev,
                                         const ModelParams& params,
                                         OnInconsistent on_inconsistent = OnInconsistent::kThrow,
                                         BeliefStats* stats = nullptr);

// u(t+1) from w(t); `adj` is the active day-t adjacency.
std::vector<ProbVector> forward_update(std::span<const ProbVector> w, const Adjacency& adj,
                                       const ModelParams& params);

// Keeps each undirected edge independently with probability alpha.
Adjacency alpha_subgraph(const Adjacency& adj, double alpha, Rng& rng);

// Conditions a single vector on its own test result.
ProbVector local_condition(const ProbVector& v, TestOutcome outcome,
                           OnInconsistent on_inconsistent = OnInconsistent::kThrow,
                           BeliefStats* stats = nullptr);

struct BeliefOptions {
  double alpha = 1.0;  // edge keep-probability for the backward step
  BackwardOptions backward;
};

struct BeliefState {
  Day day = 0;                  // u is the prior for this day
  std::vector<ProbVector> u;    // prior at `day`
  std::vector<ProbVector> w;    // posterior at `day` - 1
  std::vector<ProbVector> e;    // corrected posterior at `day` - 2
  std::vector<bool> active;     // nodes with live vectors
  bool has_posterior = false;   // false until the first observation day is processed
  std::vector<Observation> log;
  BeliefStats stats;
};

BeliefState make_belief_state(std::vector<ProbVector> prior, Day day, const ContactNetwork& net);

std::vector<TestOutcome> outcomes_for(std::span<const Observation> observations, NodeId n, Day day);

// One backward-forward day: day-t observations in, prior for t+1 out. Nodes
// isolated on day t must already be removed from `net`.
void bf_step(BeliefState& state, std::span<const Observation> observations, const ContactNetwork& net,
             const ModelParams& params, const BeliefOptions& options, Rng& rng);

// Local overwrite of tested nodes followed by the forward update only.
void naive_forward_step(BeliefState& state, std::span<const Observation> observations,
                        const ContactNetwork& net, const ModelParams& params,
                        OnInconsistent on_inconsistent = OnInconsistent::kThrow);

}  // namespace spreadlab
