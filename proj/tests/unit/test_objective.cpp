#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spreadlab/objective.hpp"

using namespace spreadlab;

namespace {

BeliefSnapshot triangle() {
  return make_snapshot(Adjacency{{1, 2}, {0, 2}, {0, 1}},
                       {ProbVector::one_hot(State::I), ProbVector::one_hot(State::I), ProbVector::one_hot(State::S)},
                       0.5);
}

std::vector<NodeId> random_subset(const std::vector<NodeId>& from, std::mt19937_64& g) {
  std::vector<NodeId> out;
  for (NodeId i : from)
    if (g() % 2) out.push_back(i);
  return out;
}

NodeMask mask_of(std::span<const NodeId> nodes, NodeId n) { return to_mask(nodes, n); }

}  // namespace

TEST_CASE("expected new infections") {
  const auto pair = make_snapshot(Adjacency{{1}, {0}}, {ProbVector::one_hot(State::I), ProbVector::one_hot(State::S)}, 0.4);
  CHECK(expected_F(1, NodeMask{0, 0}, pair) == 0.0);
  CHECK(expected_F(1, NodeMask{1, 0}, pair) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(expected_F(0, NodeMask{0, 1}, pair) == 0.0);

  Adjacency star{{1, 2, 3}, {0}, {0}, {0}};
  std::vector<ProbVector> v(4, ProbVector::one_hot(State::S));
  v[0] = ProbVector::one_hot(State::I);
  const auto s = make_snapshot(star, v, 0.5);
  CHECK(expected_new_infections(std::vector<NodeId>{}, s) == 0.0);
  CHECK(expected_new_infections(std::vector<NodeId>{0}, s) == 1.5);

  const auto tri = triangle();
  CHECK(expected_new_infections(std::vector<NodeId>{0}, tri) == 0.25);
  CHECK(expected_new_infections(std::vector<NodeId>{0, 1}, tri) == 0.75);
}

TEST_CASE("expected_F agrees with the direct formula") {
  std::mt19937_64 g(17);
  for (int rep = 0; rep < 200; ++rep) {
    const auto snap = oracle::random_snapshot(2 + static_cast<NodeId>(g() % 9), g);
    const auto D = mask_of(random_subset(snap.nodes, g), snap.size());
    CHECK(expected_new_infections(D, snap) ==
          doctest::Approx(oracle::S(D, snap.adjacency, snap.v, snap.beta)).epsilon(1e-12));
  }
}

TEST_CASE("rewards") {
  const auto tri = triangle();
  CHECK(reward(0, tri) == 0.25);
  CHECK(reward(2, tri) == 0.0);
  std::mt19937_64 g(3);
  for (int rep = 0; rep < 100; ++rep) {
    auto snap = oracle::random_snapshot(3 + static_cast<NodeId>(g() % 8), g);
    const NodeId i = static_cast<NodeId>(g() % snap.size());
    const std::vector<NodeId> single{i};
    CHECK(reward(i, snap) == doctest::Approx(expected_new_infections(single, snap)).epsilon(1e-12));
    // Entries of nodes at distance three or more do not matter.
    const double before = reward(i, snap);
    for (NodeId k = 0; k < snap.size(); ++k) {
      bool near = k == i;
      for (NodeId a : snap.adjacency[i]) {
        near = near || a == k;
        for (NodeId b : snap.adjacency[a]) near = near || b == k;
      }
      if (!near) snap.v[k] = oracle::random_vector(g);
    }
    CHECK(reward(i, snap) == before);
  }
}

TEST_CASE("steepness") {
  const auto pairs = make_snapshot(Adjacency{{1}, {0}, {3}, {2}},
                                   {ProbVector::one_hot(State::I), ProbVector::one_hot(State::S),
                                    ProbVector::one_hot(State::I), ProbVector::one_hot(State::S)},
                                   0.3);
  CHECK(std::abs(steepness_epsilon(pairs).eps_prime) < 1e-12);
  CHECK(std::abs(steepness_epsilon(pairs).epsilon) < 1e-12);

  const auto tri = steepness_epsilon(triangle());
  CHECK(tri.eps_prime == 0.5);
  CHECK(tri.epsilon == 0.25);
  CHECK_FALSE(tri.unbounded);

  const auto quiet = make_snapshot(Adjacency{{1}, {0}}, {ProbVector::one_hot(State::S), ProbVector::one_hot(State::S)}, 0.3);
  CHECK(steepness_epsilon(quiet).eps_prime == 0.0);
  CHECK(steepness_epsilon(quiet).epsilon == 0.0);
}

TEST_CASE("greedy and exhaustive selection") {
  const auto tri = triangle();
  CHECK(greedy_select(tri, 3) == std::vector<NodeId>{0, 1, 2});
  CHECK(greedy_select(tri, 1) == std::vector<NodeId>{1});
  const auto opt = brute_force_opt(tri, 1);
  CHECK(opt.value == 0.25);
  CHECK(brute_force_opt(tri, 0).value == 0.75);
  CHECK(brute_force_opt(tri, 0).tested.empty());
  CHECK(brute_force_opt(tri, 3).value == 0.0);
  CHECK_THROWS_AS(greedy_select(tri, -1), InvalidParameter);

  std::mt19937_64 g(4);
  const auto big = oracle::random_snapshot(21, g);
  CHECK_THROWS_AS(brute_force_opt(big, 2), InvalidParameter);
}

TEST_CASE("supermodularity and monotonicity") {
  std::mt19937_64 g(1);
  int violations = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const auto snap = oracle::random_snapshot(2 + static_cast<NodeId>(g() % 11), g);
    const auto b = random_subset(snap.nodes, g);
    std::vector<NodeId> a;
    for (NodeId i : b)
      if (g() % 2) a.push_back(i);
    std::vector<NodeId> outside;
    for (NodeId i : snap.nodes)
      if (std::find(b.begin(), b.end(), i) == b.end()) outside.push_back(i);
    const double sa = expected_new_infections(a, snap), sb = expected_new_infections(b, snap);
    if (sa > sb + 1e-9) ++violations;
    if (outside.empty()) continue;
    const NodeId x = outside[g() % outside.size()];
    auto ax = a, bx = b;
    ax.push_back(x);
    bx.push_back(x);
    if (expected_new_infections(ax, snap) - sa > expected_new_infections(bx, snap) - sb + 1e-9) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("reward sum bounds the untested set") {
  std::mt19937_64 g(2);
  int violations = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const auto snap = oracle::random_snapshot(2 + static_cast<NodeId>(g() % 11), g);
    const auto k = random_subset(snap.nodes, g);
    std::vector<NodeId> rest;
    for (NodeId i : snap.nodes)
      if (std::find(k.begin(), k.end(), i) == k.end()) rest.push_back(i);
    double bound = expected_new_infections(snap.nodes, snap);
    for (NodeId i : k) bound -= reward(i, snap);
    if (expected_new_infections(rest, snap) > bound + 1e-9) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("greedy stays within the steepness factor") {
  std::mt19937_64 g(5);
  int violations = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const auto snap = oracle::random_snapshot(2 + static_cast<NodeId>(g() % 7), g);
    const double eps = steepness_epsilon(snap).epsilon;
    for (int b = 0; b <= snap.size(); ++b) {
      const auto kept = greedy_select(snap, b);
      std::vector<NodeId> rest;
      for (NodeId i : snap.nodes)
        if (std::find(kept.begin(), kept.end(), i) == kept.end()) rest.push_back(i);
      CHECK(static_cast<int>(kept.size()) == b);
      const double value = expected_new_infections(rest, snap);
      if (value > (1.0 + eps) * brute_force_opt(snap, b).value + 1e-9) ++violations;
    }
  }
  CHECK(violations == 0);
}
