#pragma once

#include <span>
#include <vector>

#include "spreadlab/graph.hpp"
#include "spreadlab/types.hpp"

namespace spreadlab {

struct BeliefSnapshot {
  Adjacency adjacency;         // active-only neighbor lists for day `day`
  std::vector<ProbVector> v;   // indexed by node id
  std::vector<NodeId> nodes;   // active nodes, ascending
  double beta = 0.0;
  Day day = 0;

  NodeId size() const { return static_cast<NodeId>(v.size()); }
};

BeliefSnapshot make_snapshot(const ContactNetwork& net, Day t, std::vector<ProbVector> v, double beta);
// Every node of `adjacency` is active.
BeliefSnapshot make_snapshot(Adjacency adjacency, std::vector<ProbVector> v, double beta);

// Membership mask over node ids.
using NodeMask = std::vector<char>;

NodeMask to_mask(std::span<const NodeId> nodes, NodeId n);

// Expected indicator that susceptible node i is infected through D and not
// through its other neighbors.
double expected_F(NodeId i, const NodeMask& D, const BeliefSnapshot& snap);

// Sum of expected_F over the active nodes.
double expected_new_infections(const NodeMask& D, const BeliefSnapshot& snap);
double expected_new_infections(std::span<const NodeId> D, const BeliefSnapshot& snap);

double reward(NodeId i, const BeliefSnapshot& snap);
// Rewards for all node ids; zero for inactive nodes.
std::vector<double> rewards(const BeliefSnapshot& snap);

struct Steepness {
  double eps_prime = 0.0;
  double epsilon = 0.0;
  bool unbounded = false;  // eps_prime == 1
};

Steepness steepness_epsilon(const BeliefSnapshot& snap);

// Nodes left after removing the N(t) - B cheapest nodes one at a time; ascending.
std::vector<NodeId> greedy_select(const BeliefSnapshot& snap, int budget);

struct BruteForceResult {
  std::vector<NodeId> tested;
  double value = 0.0;
};

inline constexpr NodeId kBruteForceLimit = 20;

// Exhaustive minimum of S(V \ K) over |K| <= B; refuses more than 20 active nodes.
BruteForceResult brute_force_opt(const BeliefSnapshot& snap, int budget);

}  // namespace spreadlab
