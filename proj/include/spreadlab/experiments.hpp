#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spreadlab/config.hpp"

namespace spreadlab {

struct DayRow {
  Day day = 0;
  int budget = 0;
  std::vector<NodeId> selected;
  int positives = 0;
  int cumulative = 0;
  double err = 0.0;  // NaN before testing starts
  int active = 0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string policy;
  std::string truth_mode;
  double gamma_c = 0.0;
  std::optional<double> l_p;
  double wall_seconds = 0.0;
  NodeId revealed = -1;
  int final_cumulative = 0;  // C(T), after the last recorded day
  double final_err = 0.0;    // Err on the last recorded day
  BeliefStats belief_stats;
  std::vector<DayRow> rows;
  std::vector<std::vector<ProbVector>> priors;  // u(t) for t >= ell, kept when dumping beliefs
};

ContactNetwork build_network(const NetworkSpec& spec, std::uint64_t seed);

RunRecord run_episode(const ExperimentConfig& cfg, std::uint64_t seed);

// Seeds of all replications, derived from the master seed.
std::vector<std::uint64_t> replication_seeds(const ExperimentConfig& cfg);

// Runs every replication; results are in replication order regardless of `jobs`.
std::vector<RunRecord> run_replications(const ExperimentConfig& cfg, int jobs = 1);

double estimation_error(std::span<const ProbVector> u, std::span<const ProbVector> truth,
                        std::span<const NodeId> active);

std::vector<ProbVector> one_hot_truth(const GroundTruthState& state);

// What the truth oracle needs from a realized episode.
struct TrajectoryLog {
  std::vector<NodeId> initial_seeds;
  int ell = 0;
  int horizon = 0;
  std::vector<std::vector<Observation>> tests;  // by day; empty before ell
};

// Per-day estimate of each node's state distribution given the observation log.
std::vector<std::vector<ProbVector>> truth_oracle(const ExperimentConfig& cfg, const ContactNetwork& fresh_net,
                                                  const TrajectoryLog& log, TruthMode mode,
                                                  const std::vector<std::vector<State>>& realized, int reps,
                                                  std::uint64_t seed);

double mean_final_cumulative(std::span<const RunRecord> records);
double mean_final_err(std::span<const RunRecord> records);
// (mean C_rbex - mean C_reer) / mean C_baseline; NaN when the baseline mean is 0.
double ratio(std::span<const RunRecord> rbex, std::span<const RunRecord> reer, std::span<const RunRecord> baseline);
double delta_err(std::span<const RunRecord> rbex, std::span<const RunRecord> reer);

void write_runs_csv(std::ostream& out, std::span<const RunRecord> records, bool header = true);
void write_episodes_csv(std::ostream& out, std::span<const RunRecord> records, bool header = true);
void write_beliefs_csv(std::ostream& out, std::span<const RunRecord> records, int ell);

struct ScenarioOptions {
  int reps = 0;  // 0 keeps the scenario default: 100 seeds for theorem3, 200 elsewhere
  int jobs = 1;
  NodeId n = 0;  // 0 keeps the scenario default
  std::uint64_t seed = 20240101;
};

struct ScenarioReport {
  std::string name;
  bool passed = false;
  std::string predicate;
  std::vector<std::string> lines;  // human-readable findings
  std::string csv;                 // raw numbers
};

const std::vector<std::string>& scenario_names();
ScenarioReport reproduce_scenario(const std::string& name, const ScenarioOptions& options);

// Scenario building blocks, exposed for tests.
struct Theorem2Result {
  std::vector<double> bf_error;     // sum of L1 errors of u(t), t = 0..10N
  std::vector<double> naive_error;
};
Theorem2Result theorem2_errors(NodeId n);

struct Theorem3Result {
  std::vector<int> rbex;  // C(T) per seed
  std::vector<int> mixed;
};
// positive_only switches both policies to the variant that never tests zero-reward nodes.
Theorem3Result theorem3_runs(NodeId n, int budget, int seeds, std::uint64_t master, double epsilon = 0.01,
                             bool positive_only = false);

struct PairedPoint {
  std::string label;
  double swept = 0.0;
  double ratio = 0.0;
  double delta_err = 0.0;
  double mean_rbex = 0.0, mean_reer = 0.0, mean_none = 0.0;
  double gamma_c = 0.0, l_p = 0.0;
};

// Runs rbex, reer and no testing on the same seeds.
PairedPoint paired_point(const ExperimentConfig& cfg, int jobs);

ExperimentConfig scenario_config(const std::string& family);

}  // namespace spreadlab
