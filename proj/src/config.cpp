#include "spreadlab/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace spreadlab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(v, &pos);
  } catch (...) {
    throw InvalidParameter(key + ": expected a number, got '" + v + "'");
  }
  if (pos != v.size()) throw InvalidParameter(key + ": expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long x;
  try {
    x = std::stoll(v, &pos);
  } catch (...) {
    throw InvalidParameter(key + ": expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) throw InvalidParameter(key + ": expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long x;
  try {
    if (!v.empty() && v[0] == '-') throw 0;
    x = std::stoull(v, &pos);
  } catch (...) {
    throw InvalidParameter(key + ": expected an unsigned integer, got '" + v + "'");
  }
  if (pos != v.size()) throw InvalidParameter(key + ": expected an unsigned integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidParameter(key + ": expected true or false, got '" + v + "'");
}

struct Field {
  ConfigKey key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define NUM_FIELD(NAME, HELP, MEMBER)                                                   \
  Field {                                                                               \
    {NAME, HELP}, [](const ExperimentConfig& c) { return fmt_double(c.MEMBER); },       \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_double(NAME, v); } \
  }
#define INT_FIELD(NAME, HELP, MEMBER)                                                                      \
  Field {                                                                                                  \
    {NAME, HELP}, [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); },                      \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = static_cast<decltype(c.MEMBER)>(to_int(NAME, v)); } \
  }
#define STR_FIELD(NAME, HELP, MEMBER)                                             \
  Field {                                                                         \
    {NAME, HELP}, [](const ExperimentConfig& c) { return c.MEMBER; },             \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = v; }           \
  }
#define BOOL_FIELD(NAME, HELP, MEMBER)                                                          \
  Field {                                                                                       \
    {NAME, HELP}, [](const ExperimentConfig& c) { return std::string(c.MEMBER ? "true" : "false"); }, \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_bool(NAME, v); }          \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      STR_FIELD("network.kind", "line, ws, sf, sbm, vsbm or file", network.kind),
      INT_FIELD("network.n", "node count", network.n),
      INT_FIELD("network.degree", "ws: even lattice degree", network.degree),
      NUM_FIELD("network.rewire", "ws: rewiring probability", network.rewire),
      NUM_FIELD("network.exponent", "sf: power-law exponent", network.exponent),
      INT_FIELD("network.clusters", "sbm/vsbm: cluster count", network.clusters),
      NUM_FIELD("network.p_intra", "sbm/vsbm: intra-cluster edge probability", network.p_intra),
      NUM_FIELD("network.p_inter", "sbm/vsbm: inter-cluster edge probability", network.p_inter),
      STR_FIELD("network.path", "file: edge list path", network.path),
      INT_FIELD("network.replicate", "file: repeat the day sequence k times", network.replicate),
      INT_FIELD("network.compress", "file: merge blocks of k days", network.compress),
      NUM_FIELD("model.beta", "transmission probability per contact", model.beta),
      NUM_FIELD("model.lambda", "latent exit probability per day", model.lambda),
      NUM_FIELD("model.gamma", "recovery probability per day", model.gamma),
      BOOL_FIELD("model.latent", "use the latent state", model.latent_enabled),
      INT_FIELD("run.n0", "initial infectious nodes", n0),
      INT_FIELD("run.ell", "days before testing starts", ell),
      INT_FIELD("run.horizon", "recorded days", horizon),
      Field{{"run.seed_state", "state of initial seeds: I or L"},
            [](const ExperimentConfig& c) { return std::string(1, state_char(c.seed_state)); },
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "I")
                c.seed_state = State::I;
              else if (v == "L")
                c.seed_state = State::L;
              else
                throw InvalidParameter("run.seed_state: expected I or L");
            }},
      INT_FIELD("run.reps", "replications", replications),
      Field{{"run.seed", "master seed (64-bit unsigned)"},
            [](const ExperimentConfig& c) { return std::to_string(c.seed); },
            [](ExperimentConfig& c, const std::string& v) { c.seed = to_u64("run.seed", v); }},
      STR_FIELD("policy.name", "rbex, reer, greedy, contact-tracing, random, acf, logistic, exploit-random, round-robin, none", policy.name),
      NUM_FIELD("policy.random_share", "acf: share of the budget tested at random", policy.random_share),
      INT_FIELD("policy.random_count", "exploit-random: random tests per day", policy.random_count),
      BOOL_FIELD("policy.positive_only", "rbex, exploit-random: skip zero-reward nodes", policy.positive_only),
      Field{{"budget.mode", "expected-infected or fixed"},
            [](const ExperimentConfig& c) {
              return std::string(c.budget.mode == BudgetRule::Mode::kFixed ? "fixed" : "expected-infected");
            },
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "fixed")
                c.budget.mode = BudgetRule::Mode::kFixed;
              else if (v == "expected-infected")
                c.budget.mode = BudgetRule::Mode::kExpectedInfected;
              else
                throw InvalidParameter("budget.mode: expected fixed or expected-infected");
            }},
      INT_FIELD("budget.fixed", "tests per day in fixed mode", budget.fixed),
      STR_FIELD("belief.engine", "bf (backward-forward) or naive (forward only)", engine),
      NUM_FIELD("belief.alpha", "edge keep-probability for the backward step", belief.alpha),
      INT_FIELD("belief.max_psi", "enumerated tested neighbors per node", belief.backward.cap.max_psi),
      INT_FIELD("belief.max_phi", "enumerated untested neighbors per node", belief.backward.cap.max_phi),
      INT_FIELD("belief.max_bits", "log2 of enumerated configurations per node", belief.backward.cap.max_bits),
      Field{{"belief.on_inconsistent", "reset (rebuild from local evidence) or throw"},
            [](const ExperimentConfig& c) {
              return std::string(c.belief.backward.on_inconsistent == OnInconsistent::kThrow ? "throw" : "reset");
            },
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "throw")
                c.belief.backward.on_inconsistent = OnInconsistent::kThrow;
              else if (v == "reset")
                c.belief.backward.on_inconsistent = OnInconsistent::kResetToEvidence;
              else
                throw InvalidParameter("belief.on_inconsistent: expected reset or throw");
            }},
      BOOL_FIELD("output.dump_beliefs", "write per-node priors to beliefs.csv", dump_beliefs),
      Field{{"output.truth", "one-hot or monte-carlo"},
            [](const ExperimentConfig& c) {
              return std::string(c.truth == TruthMode::kOneHot ? "one-hot" : "monte-carlo");
            },
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "one-hot")
                c.truth = TruthMode::kOneHot;
              else if (v == "monte-carlo")
                c.truth = TruthMode::kMonteCarlo;
              else
                throw InvalidParameter("output.truth: expected one-hot or monte-carlo");
            }},
      INT_FIELD("output.truth_reps", "monte-carlo truth: simulated trajectories", truth_reps),
  };
  return f;
}

const Field& field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key.name == key) return f;
  throw InvalidParameter("unknown config key '" + key + "'");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  field(key).set(cfg, value);
}

std::string config_value(const ExperimentConfig& cfg, const std::string& key) { return field(key).get(cfg); }

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("expected `key = value`", lineno);
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    try {
      apply_setting(base, key, value);
    } catch (const InvalidParameter& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  return parse_config(in, std::move(base));
}

std::string to_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  for (const auto& f : fields()) out << f.key.name << " = " << f.get(cfg) << "\n";
  return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };
  const auto& k = network.kind;
  need(k == "line" || k == "ws" || k == "sf" || k == "sbm" || k == "vsbm" || k == "file",
       "network.kind: unknown kind '" + k + "'");
  if (k != "file") need(network.n >= 2, "network.n: must be at least 2");
  if (k == "ws") need(network.degree % 2 == 0 && network.degree < network.n, "network.degree: must be even and below n");
  if (k == "ws") need(network.rewire >= 0 && network.rewire <= 1, "network.rewire: must lie in [0,1]");
  if (k == "sf") need(network.exponent > 1, "network.exponent: must exceed 1");
  if (k == "sbm" || k == "vsbm") {
    need(network.clusters > 0 && network.n % network.clusters == 0, "network.clusters: must divide network.n");
    need(network.p_intra >= 0 && network.p_intra <= 1, "network.p_intra: must lie in [0,1]");
    need(network.p_inter >= 0 && network.p_inter <= 1, "network.p_inter: must lie in [0,1]");
  }
  if (k == "file") need(!network.path.empty(), "network.path: required for file networks");
  need(network.replicate >= 1 && network.compress >= 1, "network.replicate/network.compress: must be >= 1");
  need(network.replicate == 1 || network.compress == 1, "network.replicate/network.compress: mutually exclusive");
  try {
    model.validate();
  } catch (const InvalidParameter& e) {
    errors.push_back(std::string("model: ") + e.what());
  }
  need(n0 >= 1, "run.n0: must be at least 1");
  if (k != "file") need(n0 <= network.n, "run.n0: exceeds network.n");
  need(ell >= 0, "run.ell: must be non-negative");
  need(horizon > ell, "run.horizon: must exceed run.ell");
  need(replications >= 1, "run.reps: must be at least 1");
  need(std::find(policy_names().begin(), policy_names().end(), policy.name) != policy_names().end(),
       "policy.name: unknown policy '" + policy.name + "'");
  need(policy.random_share >= 0 && policy.random_share <= 1, "policy.random_share: must lie in [0,1]");
  need(policy.random_count >= 0, "policy.random_count: must be non-negative");
  need(budget.fixed >= 0, "budget.fixed: must be non-negative");
  need(engine == "bf" || engine == "naive", "belief.engine: expected bf or naive");
  need(belief.alpha >= 0 && belief.alpha <= 1, "belief.alpha: must lie in [0,1]");
  need(truth_reps >= 1, "output.truth_reps: must be at least 1");
  if (truth == TruthMode::kMonteCarlo && k != "file") need(network.n <= 50, "output.truth: monte-carlo needs network.n <= 50");
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw InvalidParameter(msg);
  }
}

}  // namespace spreadlab
