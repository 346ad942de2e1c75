#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spreadlab/graph.hpp"
#include "spreadlab/objective.hpp"
#include "spreadlab/rng.hpp"
#include "spreadlab/spread.hpp"

namespace spreadlab {

// Nodes that tested positive, with the day of the positive test.
using PositiveLedger = std::map<NodeId, Day>;

struct PolicyContext {
  Day day = 0;
  const ContactNetwork* net = nullptr;
  const BeliefSnapshot* snapshot = nullptr;  // prior u(t) over the active nodes
  const PositiveLedger* ledger = nullptr;
  std::span<const Observation> history;
  const ModelParams* params = nullptr;
  Rng* rng = nullptr;

  std::vector<NodeId> active_nodes() const;
};

struct BudgetRule {
  enum class Mode { kFixed, kExpectedInfected };
  Mode mode = Mode::kExpectedInfected;
  int fixed = 0;
};

// Realized count of active infectious nodes stands in for the expected count.
int budget(const BudgetRule& rule, const GroundTruthState& state, const ContactNetwork& net);

// positive_only leaves the budget unused rather than testing zero-reward nodes.
std::vector<NodeId> rbex_select(const PolicyContext& ctx, int budget, bool positive_only = false);

struct ReerDraw {
  std::vector<double> inclusion;  // per node id
  double unused = 0.0;            // c(t)
};

ReerDraw reer_probabilities(std::span<const double> rewards, std::span<const NodeId> active, int budget);
std::vector<NodeId> reer_select(const PolicyContext& ctx, int budget);

std::vector<NodeId> greedy_policy_select(const PolicyContext& ctx, int budget);

// Active neighbors of recent positives, taken on the last day each positive was in contact.
std::vector<NodeId> tracing_candidates(const PolicyContext& ctx);
std::vector<NodeId> contact_tracing_select(const PolicyContext& ctx, int budget);

std::vector<NodeId> random_select(const PolicyContext& ctx, int budget);

std::vector<NodeId> acf_select(const PolicyContext& ctx, int budget, double random_share = 0.05);

// Top rewards for all but `random_count` tests, which go to uniform picks.
std::vector<NodeId> exploit_random_select(const PolicyContext& ctx, int budget, int random_count,
                                          bool positive_only = false);

std::vector<NodeId> round_robin_select(const PolicyContext& ctx, int budget);

class LogisticModel {
 public:
  static constexpr double kFeatureOffset = 0.1;
  static constexpr int kSteps = 100;
  static constexpr double kStepSize = 0.1;

  static std::array<double, 2> feature(int isolated_contacts);
  double score(const std::array<double, 2>& x) const;
  void add(const std::array<double, 2>& x, bool positive);
  // Gradient ascent on the mean log-likelihood from zero; single-class buffers keep the old weights.
  void refit();

  const std::array<double, 2>& weights() const { return weights_; }
  void set_weights(const std::array<double, 2>& w) { weights_ = w; }
  std::size_t buffer_size() const { return rows_.size(); }

 private:
  std::array<double, 2> weights_{0.0, 0.0};
  std::vector<std::pair<std::array<double, 2>, bool>> rows_;
};

// Number of isolated nodes that i has met on any day up to and including t.
std::vector<int> isolated_contact_counts(const ContactNetwork& net, Day t);

std::vector<NodeId> logistic_select(const PolicyContext& ctx, int budget, const LogisticModel& model,
                                    std::span<const int> isolated_contacts);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual std::vector<NodeId> select(const PolicyContext& ctx, int budget) = 0;
  virtual void observe(const PolicyContext&, std::span<const Observation>) {}
  // Whether |selection| may exceed the budget (probabilistic rules).
  virtual bool may_exceed_budget() const { return false; }
};

struct PolicySpec {
  std::string name = "rbex";  // rbex, reer, greedy, contact-tracing, random, acf, logistic, exploit-random, round-robin, none
  double random_share = 0.05;  // acf
  int random_count = 1;        // exploit-random
  bool positive_only = false;  // rbex, exploit-random: never test zero-reward nodes
};

std::unique_ptr<Policy> make_policy(const PolicySpec& spec);
const std::vector<std::string>& policy_names();

}  // namespace spreadlab
