#include "spreadlab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace spreadlab {

std::vector<NodeId> PolicyContext::active_nodes() const {
  if (snapshot) return snapshot->nodes;
  return net->active_nodes(day);
}

int budget(const BudgetRule& rule, const GroundTruthState& state, const ContactNetwork& net) {
  if (rule.mode == BudgetRule::Mode::kFixed) return std::max(rule.fixed, 0);
  int infectious = 0;
  bool latent = false;
  for (NodeId i = 0; i < net.size(); ++i) {
    if (!net.is_active(i, state.day)) continue;
    if (state.sigma[i] == State::I) ++infectious;
    if (state.sigma[i] == State::L) latent = true;
  }
  return (infectious == 0 && latent) ? 1 : infectious;
}

namespace {

std::vector<NodeId> top_by_score(std::span<const NodeId> candidates, std::span<const double> score, int budget) {
  std::vector<NodeId> order(candidates.begin(), candidates.end());
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });
  if (budget < static_cast<int>(order.size())) order.resize(std::max(budget, 0));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<NodeId> without(std::span<const NodeId> pool, const std::vector<NodeId>& taken) {
  std::set<NodeId> t(taken.begin(), taken.end());
  std::vector<NodeId> out;
  for (NodeId i : pool)
    if (!t.count(i)) out.push_back(i);
  return out;
}

std::vector<NodeId> sorted(std::vector<NodeId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::vector<NodeId> rbex_select(const PolicyContext& ctx, int budget, bool positive_only) {
  const auto r = rewards(*ctx.snapshot);
  if (!positive_only) return top_by_score(ctx.snapshot->nodes, r, budget);
  std::vector<NodeId> candidates;
  for (NodeId i : ctx.snapshot->nodes)
    if (r[i] > 0.0) candidates.push_back(i);
  return top_by_score(candidates, r, budget);
}

ReerDraw reer_probabilities(std::span<const double> rewards, std::span<const NodeId> active, int budget) {
  ReerDraw d;
  d.inclusion.assign(rewards.size(), 0.0);
  double total = 0.0;
  for (NodeId i : active) total += rewards[i];
  if (!(total > 0.0)) return d;
  for (NodeId i : active) {
    const double ratio = budget * rewards[i] / total;
    d.inclusion[i] = std::min(1.0, ratio);
    d.unused += std::max(ratio - 1.0, 0.0);
  }
  return d;
}

std::vector<NodeId> reer_select(const PolicyContext& ctx, int budget) {
  const auto& active = ctx.snapshot->nodes;
  const auto r = rewards(*ctx.snapshot);
  const ReerDraw d = reer_probabilities(r, active, budget);
  double total = 0.0;
  for (NodeId i : active) total += r[i];
  if (!(total > 0.0)) return random_select(ctx, budget);
  std::vector<NodeId> chosen;
  for (NodeId i : active)
    if (uniform01(*ctx.rng) < d.inclusion[i]) chosen.push_back(i);
  const long long extra = randomized_round(d.unused, *ctx.rng);
  auto more = sample_without_replacement(without(active, chosen), static_cast<std::size_t>(extra), *ctx.rng);
  chosen.insert(chosen.end(), more.begin(), more.end());
  return sorted(std::move(chosen));
}

std::vector<NodeId> greedy_policy_select(const PolicyContext& ctx, int budget) {
  return greedy_select(*ctx.snapshot, budget);
}

std::vector<NodeId> tracing_candidates(const PolicyContext& ctx) {
  std::set<NodeId> cand;
  if (!ctx.ledger) return {};
  const double g = ctx.params ? ctx.params->gamma : 0.0;
  const bool unbounded = !(g > 0.0);
  const int window = unbounded ? 0 : static_cast<int>(std::ceil(1.0 / g - 1e-12));
  for (auto [p, d] : *ctx.ledger) {
    if (!unbounded && ctx.day - d > window) continue;
    const auto removed = ctx.net->removal_day(p);
    Day last = removed ? std::max<Day>(*removed - 1, 0) : ctx.day;
    if (!ctx.net->is_static()) last = std::min<Day>(last, ctx.net->horizon() - 1);
    for (NodeId j : ctx.net->contacts(p, last))
      if (ctx.net->is_active(j, ctx.day)) cand.insert(j);
  }
  return {cand.begin(), cand.end()};
}

std::vector<NodeId> contact_tracing_select(const PolicyContext& ctx, int budget) {
  auto cand = tracing_candidates(ctx);
  return sorted(sample_without_replacement(std::move(cand), static_cast<std::size_t>(std::max(budget, 0)), *ctx.rng));
}

std::vector<NodeId> random_select(const PolicyContext& ctx, int budget) {
  return sorted(sample_without_replacement(ctx.active_nodes(), static_cast<std::size_t>(std::max(budget, 0)), *ctx.rng));
}

std::vector<NodeId> acf_select(const PolicyContext& ctx, int budget, double random_share) {
  if (budget <= 0) return {};
  const auto active = ctx.active_nodes();
  const int n_random = std::min(budget, static_cast<int>(std::ceil(random_share * budget - 1e-12)));
  auto chosen = sample_without_replacement(active, static_cast<std::size_t>(n_random), *ctx.rng);
  auto cand = without(tracing_candidates(ctx), chosen);
  auto traced = sample_without_replacement(std::move(cand), static_cast<std::size_t>(budget - n_random), *ctx.rng);
  chosen.insert(chosen.end(), traced.begin(), traced.end());
  if (static_cast<int>(chosen.size()) < budget) {
    auto refill = sample_without_replacement(without(active, chosen), budget - chosen.size(), *ctx.rng);
    chosen.insert(chosen.end(), refill.begin(), refill.end());
  }
  return sorted(std::move(chosen));
}

std::vector<NodeId> exploit_random_select(const PolicyContext& ctx, int budget, int random_count,
                                          bool positive_only) {
  if (budget <= 0) return {};
  const int n_random = std::clamp(random_count, 0, budget);
  auto chosen = rbex_select(ctx, budget - n_random, positive_only);
  auto extra = sample_without_replacement(without(ctx.snapshot->nodes, chosen), static_cast<std::size_t>(n_random), *ctx.rng);
  chosen.insert(chosen.end(), extra.begin(), extra.end());
  return sorted(std::move(chosen));
}

std::vector<NodeId> round_robin_select(const PolicyContext& ctx, int budget) {
  const NodeId n = ctx.net->size();
  std::set<NodeId> chosen;
  for (int k = 0; k < budget && k < n; ++k) {
    NodeId i = static_cast<NodeId>((static_cast<long long>(ctx.day) * budget + k) % n);
    if (ctx.net->is_active(i, ctx.day)) chosen.insert(i);
  }
  return {chosen.begin(), chosen.end()};
}

// ---------------------------------------------------------------- logistic

std::array<double, 2> LogisticModel::feature(int isolated_contacts) {
  return {1.0, isolated_contacts + kFeatureOffset};
}

double LogisticModel::score(const std::array<double, 2>& x) const {
  const double z = weights_[0] * x[0] + weights_[1] * x[1];
  return 1.0 / (1.0 + std::exp(-z));
}

void LogisticModel::add(const std::array<double, 2>& x, bool positive) { rows_.push_back({x, positive}); }

void LogisticModel::refit() {
  bool pos = false, neg = false;
  for (const auto& r : rows_) (r.second ? pos : neg) = true;
  if (!(pos && neg)) return;
  std::array<double, 2> w{0.0, 0.0};
  const double m = static_cast<double>(rows_.size());
  for (int s = 0; s < kSteps; ++s) {
    std::array<double, 2> g{0.0, 0.0};
    for (const auto& [x, y] : rows_) {
      const double p = 1.0 / (1.0 + std::exp(-(w[0] * x[0] + w[1] * x[1])));
      const double err = (y ? 1.0 : 0.0) - p;
      g[0] += err * x[0];
      g[1] += err * x[1];
    }
    w[0] += kStepSize * g[0] / m;
    w[1] += kStepSize * g[1] / m;
  }
  weights_ = w;
}

std::vector<int> isolated_contact_counts(const ContactNetwork& net, Day t) {
  const NodeId n = net.size();
  std::vector<int> count(n, 0);
  std::vector<Day> seen(n, -1);
  for (NodeId j = 0; j < n; ++j) {
    const auto d = net.removal_day(j);
    if (!d || *d > t) continue;
    // Contacts happen on days before j's removal.
    const Day last = net.is_static() ? std::min<Day>(*d - 1, 0) : std::min<Day>(*d - 1, net.horizon() - 1);
    for (Day tau = 0; tau <= last; ++tau)
      for (NodeId i : net.contacts(j, tau))
        if (seen[i] != j) {
          seen[i] = j;
          ++count[i];
        }
  }
  return count;
}

std::vector<NodeId> logistic_select(const PolicyContext& ctx, int budget, const LogisticModel& model,
                                    std::span<const int> isolated_contacts) {
  const auto active = ctx.active_nodes();
  std::vector<double> score(ctx.net->size(), 0.0);
  for (NodeId i : active) score[i] = model.score(LogisticModel::feature(isolated_contacts[i]));
  return top_by_score(active, score, budget);
}

// ---------------------------------------------------------------- registry

namespace {

class FnPolicy : public Policy {
 public:
  using Fn = std::vector<NodeId> (*)(const PolicyContext&, int);
  FnPolicy(std::string name, Fn fn, bool may_exceed = false) : name_(std::move(name)), fn_(fn), may_exceed_(may_exceed) {}
  std::string name() const override { return name_; }
  std::vector<NodeId> select(const PolicyContext& ctx, int budget) override { return fn_(ctx, budget); }
  bool may_exceed_budget() const override { return may_exceed_; }

 private:
  std::string name_;
  Fn fn_;
  bool may_exceed_;
};

class NonePolicy : public Policy {
 public:
  std::string name() const override { return "none"; }
  std::vector<NodeId> select(const PolicyContext&, int) override { return {}; }
};

class AcfPolicy : public Policy {
 public:
  explicit AcfPolicy(double share) : share_(share) {}
  std::string name() const override { return "acf"; }
  std::vector<NodeId> select(const PolicyContext& ctx, int budget) override { return acf_select(ctx, budget, share_); }

 private:
  double share_;
};

class RbexPolicy : public Policy {
 public:
  explicit RbexPolicy(bool positive_only) : positive_only_(positive_only) {}
  std::string name() const override { return "rbex"; }
  std::vector<NodeId> select(const PolicyContext& ctx, int budget) override {
    return rbex_select(ctx, budget, positive_only_);
  }

 private:
  bool positive_only_;
};

class ExploitRandomPolicy : public Policy {
 public:
  ExploitRandomPolicy(int k, bool positive_only) : k_(k), positive_only_(positive_only) {}
  std::string name() const override { return "exploit-random"; }
  std::vector<NodeId> select(const PolicyContext& ctx, int budget) override {
    return exploit_random_select(ctx, budget, k_, positive_only_);
  }

 private:
  int k_;
  bool positive_only_;
};

class LogisticPolicy : public Policy {
 public:
  std::string name() const override { return "logistic"; }
  std::vector<NodeId> select(const PolicyContext& ctx, int budget) override {
    counts_ = isolated_contact_counts(*ctx.net, ctx.day);
    return logistic_select(ctx, budget, model_, counts_);
  }
  void observe(const PolicyContext&, std::span<const Observation> obs) override {
    for (const auto& o : obs) model_.add(LogisticModel::feature(counts_[o.node]), o.positive);
    model_.refit();
  }

 private:
  LogisticModel model_;
  std::vector<int> counts_;
};

}  // namespace

const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names{"rbex", "reer", "greedy", "contact-tracing", "random",
                                              "acf", "logistic", "exploit-random", "round-robin", "none"};
  return names;
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec) {
  const auto& n = spec.name;
  if (n == "rbex") return std::make_unique<RbexPolicy>(spec.positive_only);
  if (n == "reer") return std::make_unique<FnPolicy>(n, &reer_select, true);
  if (n == "greedy") return std::make_unique<FnPolicy>(n, &greedy_policy_select);
  if (n == "contact-tracing") return std::make_unique<FnPolicy>(n, &contact_tracing_select);
  if (n == "random") return std::make_unique<FnPolicy>(n, &random_select);
  if (n == "round-robin") return std::make_unique<FnPolicy>(n, &round_robin_select);
  if (n == "acf") return std::make_unique<AcfPolicy>(spec.random_share);
  if (n == "exploit-random") return std::make_unique<ExploitRandomPolicy>(spec.random_count, spec.positive_only);
  if (n == "logistic") return std::make_unique<LogisticPolicy>();
  if (n == "none") return std::make_unique<NonePolicy>();
  throw InvalidParameter("unknown policy '" + n + "'");
}

}  // namespace spreadlab
