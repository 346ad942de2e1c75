#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "spreadlab/belief.hpp"
#include "spreadlab/graph.hpp"
#include "spreadlab/policies.hpp"
#include "spreadlab/spread.hpp"

namespace spreadlab {

struct NetworkSpec {
  std::string kind = "ws";  // line, ws, sf, sbm, vsbm, file
  NodeId n = 300;
  int degree = 4;
  double rewire = 0.03;
  double exponent = 2.5;
  int clusters = 10;
  double p_intra = 0.2736;
  double p_inter = 0.02;
  std::string path;
  int replicate = 1;
  int compress = 1;
};

enum class TruthMode { kOneHot, kMonteCarlo };

struct ExperimentConfig {
  NetworkSpec network;
  ModelParams model{0.4, 0.5, 0.1, true};
  int n0 = 3;
  int ell = 3;
  int horizon = 50;  // days 0..horizon-1 are recorded
  State seed_state = State::I;
  PolicySpec policy;
  BudgetRule budget;
  std::string engine = "bf";  // bf or naive
  BeliefOptions belief{1.0, {{}, OnInconsistent::kResetToEvidence}};
  int replications = 1;
  std::uint64_t seed = 1;
  bool dump_beliefs = false;
  TruthMode truth = TruthMode::kOneHot;
  int truth_reps = 2000;

  // Throws InvalidParameter listing every offending key.
  void validate() const;
};

// One entry per key, in schema order.
struct ConfigKey {
  std::string name;
  std::string help;
};
const std::vector<ConfigKey>& config_keys();

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// `key = value` lines; `#` comments; blank lines ignored.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
std::string config_value(const ExperimentConfig& cfg, const std::string& key);
// Every key with its resolved value.
std::string to_text(const ExperimentConfig& cfg);
// FNV-1a of to_text, hex.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace spreadlab
