#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "spreadlab/experiments.hpp"

namespace fs = std::filesystem;
using namespace spreadlab;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kPredicateFailed = 2, kIo = 3 };

struct RunFlags {
  std::string config_path;
  std::map<std::string, std::string> settings;  // --<config key> overrides
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "config file (`key = value` lines)");
  cmd->add_option("--reps", f.reps, "replications (same as --run.reps)");
  cmd->add_option("--seed", f.seed, "master seed (same as --run.seed)");
  cmd->add_option("--out", f.out, "output directory, created if absent");
  cmd->add_option("--jobs", f.jobs, "parallel replications")->check(CLI::PositiveNumber);
  for (const auto& key : config_keys())
    cmd->add_option_function<std::string>(
        "--" + key.name, [&f, name = key.name](const std::string& v) { f.settings[name] = v; }, key.help);
}

// File values first, then flags; --reps and --seed win over everything.
ExperimentConfig resolve(const RunFlags& f) {
  ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = load_config(f.config_path);
  for (const auto& [k, v] : f.settings) apply_setting(cfg, k, v);
  if (f.reps) cfg.replications = *f.reps;
  if (f.seed) cfg.seed = *f.seed;
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

nlohmann::json json_number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

nlohmann::json policy_summary(const std::vector<RunRecord>& recs) {
  double wall = 0.0;
  long long thinned = 0, resets = 0;
  for (const auto& r : recs) {
    wall += r.wall_seconds;
    thinned += r.belief_stats.thinned_nodes;
    resets += r.belief_stats.resets;
  }
  return {{"replications", recs.size()},
          {"mean_final_cumulative", json_number(mean_final_cumulative(recs))},
          {"mean_final_err", json_number(mean_final_err(recs))},
          {"thinned_nodes", thinned},
          {"belief_resets", resets},
          {"wall_seconds", wall}};
}

void write_common(const fs::path& dir, const ExperimentConfig& cfg) {
  auto out = open_out(dir / "config.txt");
  out << to_text(cfg);
}

int cmd_run(const RunFlags& f) {
  const auto cfg = resolve(f);
  make_dir(f.out);
  const fs::path dir(f.out);
  const auto recs = run_replications(cfg, f.jobs);
  write_common(dir, cfg);
  {
    auto out = open_out(dir / "runs.csv");
    write_runs_csv(out, recs);
  }
  {
    auto out = open_out(dir / "episodes.csv");
    write_episodes_csv(out, recs);
  }
  if (cfg.dump_beliefs) {
    auto out = open_out(dir / "beliefs.csv");
    write_beliefs_csv(out, recs, cfg.ell);
  }
  nlohmann::json summary = policy_summary(recs);
  summary["config_hash"] = config_hash(cfg);
  summary["policy"] = cfg.policy.name;
  summary["truth_mode"] = cfg.truth == TruthMode::kOneHot ? "one-hot" : "monte-carlo";
  open_out(dir / "summary.json") << summary.dump(2) << "\n";
  std::cout << "policy " << cfg.policy.name << ": mean C(T) = " << mean_final_cumulative(recs)
            << ", mean Err(T) = " << mean_final_err(recs) << " over " << recs.size() << " replications\n";
  return kOk;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_compare(const RunFlags& f, const std::string& policy_list) {
  auto cfg = resolve(f);
  const auto names = split_list(policy_list);
  if (names.empty()) throw InvalidParameter("--policies: empty list");
  make_dir(f.out);
  const fs::path dir(f.out);
  std::map<std::string, std::vector<RunRecord>> by_policy;
  auto runs = open_out(dir / "runs.csv");
  auto episodes = open_out(dir / "episodes.csv");
  nlohmann::json summary;
  summary["config_hash"] = config_hash(cfg);
  bool first = true;
  for (const auto& name : names) {
    cfg.policy.name = name;
    cfg.validate();
    auto recs = run_replications(cfg, f.jobs);
    write_runs_csv(runs, recs, first);
    write_episodes_csv(episodes, recs, first);
    first = false;
    summary["policies"][name] = policy_summary(recs);
    by_policy[name] = std::move(recs);
  }
  write_common(dir, cfg);
  if (by_policy.count("rbex") && by_policy.count("reer")) {
    summary["delta_err"] = json_number(delta_err(by_policy["rbex"], by_policy["reer"]));
    if (by_policy.count("none"))
      summary["ratio"] = json_number(ratio(by_policy["rbex"], by_policy["reer"], by_policy["none"]));
  }
  open_out(dir / "summary.json") << summary.dump(2) << "\n";
  for (const auto& name : names)
    std::cout << name << ": mean C(T) = " << mean_final_cumulative(by_policy[name])
              << ", mean Err(T) = " << mean_final_err(by_policy[name]) << "\n";
  if (summary.contains("ratio")) std::cout << "Ratio = " << summary["ratio"] << "\n";
  if (summary.contains("delta_err")) std::cout << "Delta_Err = " << summary["delta_err"] << "\n";
  return kOk;
}

struct GenerateFlags {
  std::vector<std::string> ws, sf, sbm, vsbm;
  std::optional<NodeId> line;
  std::uint64_t seed = 1;
  std::string out;
};

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw InvalidParameter("expected a number, got '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  const double v = to_double(s);
  if (v != std::floor(v)) throw InvalidParameter("expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

int cmd_generate(const GenerateFlags& g) {
  ContactNetwork net;
  if (!g.ws.empty())
    net = gen_watts_strogatz(to_int(g.ws[0]), to_int(g.ws[1]), to_double(g.ws[2]), g.seed);
  else if (!g.sf.empty())
    net = gen_scale_free(to_int(g.sf[0]), to_double(g.sf[1]), g.seed);
  else if (!g.sbm.empty())
    net = gen_sbm(to_int(g.sbm[0]), to_int(g.sbm[1]), to_double(g.sbm[2]), to_double(g.sbm[3]),
                  SbmVariant::kStandard, g.seed);
  else if (!g.vsbm.empty())
    net = gen_sbm(to_int(g.vsbm[0]), to_int(g.vsbm[1]), to_double(g.vsbm[2]), to_double(g.vsbm[3]),
                  SbmVariant::kChain, g.seed);
  else if (g.line)
    net = gen_line(*g.line);
  else
    throw InvalidParameter("generate: choose one of --ws, --sf, --sbm, --vsbm, --line");
  if (g.out.empty() || g.out == "-") {
    write_edge_list(std::cout, net);
  } else {
    const fs::path p(g.out);
    if (p.has_parent_path()) make_dir(p.parent_path().string());
    auto out = open_out(p);
    write_edge_list(out, net);
  }
  return kOk;
}

int cmd_metrics(const std::string& path, Day day, int replicate, int compress) {
  const auto net = load_temporal_edges_file(path, replicate, compress);
  const auto m = topology_metrics(net, day);
  nlohmann::json j{{"nodes", net.size()},
                   {"edges", net.edge_count(day)},
                   {"horizon", net.is_static() ? nlohmann::json("unbounded") : nlohmann::json(net.horizon())},
                   {"gamma_c", m.gamma_c},
                   {"l_p", m.l_p ? nlohmann::json(*m.l_p) : nlohmann::json(nullptr)},
                   {"n_components", m.n_components}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_reproduce(const std::string& name, const ScenarioOptions& opt, const std::string& out_dir) {
  const auto rep = reproduce_scenario(name, opt);
  for (const auto& line : rep.lines) std::cout << line << "\n";
  std::cout << (rep.passed ? "PASS " : "FAIL ") << rep.name << ": " << rep.predicate << "\n";
  if (!out_dir.empty()) {
    make_dir(out_dir);
    open_out(fs::path(out_dir) / (name + ".csv")) << rep.csv;
    nlohmann::json j{{"scenario", rep.name}, {"passed", rep.passed}, {"predicate", rep.predicate}, {"findings", rep.lines}};
    open_out(fs::path(out_dir) / (name + ".json")) << j.dump(2) << "\n";
  }
  return rep.passed ? kOk : kPredicateFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epidemic testing policies on contact networks"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "write a generated network as an edge list");
  GenerateFlags gen;
  generate->add_option("--ws", gen.ws, "Watts-Strogatz: N DEGREE REWIRE")->expected(3);
  generate->add_option("--sf", gen.sf, "scale-free: N EXPONENT")->expected(2);
  generate->add_option("--sbm", gen.sbm, "stochastic block model: N CLUSTERS P_INTRA P_INTER")->expected(4);
  generate->add_option("--vsbm", gen.vsbm, "chained block model: N CLUSTERS P_INTRA P_INTER")->expected(4);
  generate->add_option("--line", gen.line, "line network: N");
  generate->add_option("--seed", gen.seed, "generator seed");
  generate->add_option("--out", gen.out, "output file (stdout when omitted)");

  auto* run = app.add_subcommand("run", "run replications of one policy");
  RunFlags run_flags;
  add_run_flags(run, run_flags);

  auto* compare = app.add_subcommand("compare", "run several policies on paired seeds");
  RunFlags cmp_flags;
  std::string policies = "rbex,reer,none";
  add_run_flags(compare, cmp_flags);
  compare->add_option("--policies", policies, "comma-separated policy names");

  auto* metrics = app.add_subcommand("metrics", "clustering coefficient, path length and components of an edge list");
  std::string metrics_path;
  Day metrics_day = 0;
  int metrics_replicate = 1, metrics_compress = 1;
  metrics->add_option("file", metrics_path, "edge list")->required();
  metrics->add_option("--day", metrics_day, "day to measure");
  metrics->add_option("--replicate", metrics_replicate, "repeat the day sequence k times");
  metrics->add_option("--compress", metrics_compress, "merge blocks of k days");

  auto* reproduce = app.add_subcommand("reproduce", "run a scripted scenario and check its predicate");
  std::string scenario;
  ScenarioOptions sopt;
  sopt.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string reproduce_out;
  std::string scenario_help = "one of:";
  for (const auto& s : scenario_names()) scenario_help += " " + s;
  reproduce->add_option("scenario", scenario, scenario_help)->required();
  reproduce->add_option("--n", sopt.n, "node count for theorem scenarios");
  reproduce->add_option("--reps", sopt.reps, "replications (theorem3: seeds)");
  reproduce->add_option("--seed", sopt.seed, "master seed");
  reproduce->add_option("--jobs", sopt.jobs, "parallel replications")->check(CLI::PositiveNumber);
  reproduce->add_option("--out", reproduce_out, "directory for the scenario CSV and JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*run) return cmd_run(run_flags);
    if (*compare) return cmd_compare(cmp_flags, policies);
    if (*metrics) return cmd_metrics(metrics_path, metrics_day, metrics_replicate, metrics_compress);
    if (*reproduce) return cmd_reproduce(scenario, sopt, reproduce_out);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
