#include "spreadlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

#include "spreadlab/rng.hpp"

namespace spreadlab {

namespace {

void validate_adjacency(NodeId n, Adjacency& adj) {
  if (static_cast<NodeId>(adj.size()) != n) throw InvalidParameter("adjacency size does not match node count");
  for (NodeId i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    for (NodeId j : row) {
      if (j < 0 || j >= n) throw InvalidParameter("edge references node outside [0, N)");
      if (j == i) throw InvalidParameter("self-loop on node " + std::to_string(i));
    }
  }
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j : adj[i])
      if (!std::binary_search(adj[j].begin(), adj[j].end(), i))
        throw InvalidParameter("adjacency is not symmetric");
}

void add_edge(Adjacency& adj, NodeId u, NodeId v) {
  adj[u].push_back(v);
  adj[v].push_back(u);
}

void sort_rows(Adjacency& adj) {
  for (auto& row : adj) std::sort(row.begin(), row.end());
}

}  // namespace

ContactNetwork ContactNetwork::make_static(NodeId n, Adjacency adjacency) {
  if (n < 0) throw InvalidParameter("negative node count");
  validate_adjacency(n, adjacency);
  ContactNetwork net;
  net.n_ = n;
  net.static_ = true;
  net.days_.push_back(std::move(adjacency));
  net.removed_.assign(n, kUnboundedHorizon);
  return net;
}

ContactNetwork ContactNetwork::make_temporal(NodeId n, std::vector<Adjacency> days) {
  if (n < 0) throw InvalidParameter("negative node count");
  if (days.empty()) throw InvalidParameter("temporal network needs at least one day");
  for (auto& d : days) validate_adjacency(n, d);
  ContactNetwork net;
  net.n_ = n;
  net.static_ = false;
  net.days_ = std::move(days);
  net.removed_.assign(n, kUnboundedHorizon);
  return net;
}

ContactNetwork ContactNetwork::from_edges(NodeId n,
                                          const std::vector<std::pair<NodeId, NodeId>>& edges) {
  Adjacency adj(n);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) throw InvalidParameter("edge references node outside [0, N)");
    add_edge(adj, u, v);
  }
  return make_static(n, std::move(adj));
}

Day ContactNetwork::horizon() const {
  return static_ ? kUnboundedHorizon : static_cast<Day>(days_.size());
}

const Adjacency& ContactNetwork::day_adjacency(Day t) const {
  if (t < 0) throw InvalidParameter("negative day");
  if (static_) return days_.front();
  if (t >= static_cast<Day>(days_.size()))
    throw InvalidParameter("day " + std::to_string(t) + " beyond network horizon");
  return days_[t];
}

std::span<const NodeId> ContactNetwork::contacts(NodeId i, Day t) const {
  const auto& row = day_adjacency(t).at(i);
  return {row.data(), row.size()};
}

std::vector<NodeId> ContactNetwork::neighbors(NodeId i, Day t) const {
  std::vector<NodeId> out;
  if (!is_active(i, t)) return out;
  for (NodeId j : contacts(i, t))
    if (is_active(j, t)) out.push_back(j);
  return out;
}

std::vector<NodeId> ContactNetwork::closed_neighbors(NodeId i, Day t) const {
  std::vector<NodeId> out = neighbors(i, t);
  if (is_active(i, t)) out.insert(std::lower_bound(out.begin(), out.end(), i), i);
  return out;
}

Adjacency ContactNetwork::snapshot(Day t) const {
  Adjacency adj(n_);
  for (NodeId i = 0; i < n_; ++i) adj[i] = neighbors(i, t);
  return adj;
}

bool ContactNetwork::is_active(NodeId i, Day t) const { return removed_.at(i) > t; }

std::vector<NodeId> ContactNetwork::active_nodes(Day t) const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < n_; ++i)
    if (is_active(i, t)) out.push_back(i);
  return out;
}

std::size_t ContactNetwork::active_count(Day t) const {
  std::size_t c = 0;
  for (NodeId i = 0; i < n_; ++i) c += is_active(i, t) ? 1 : 0;
  return c;
}

void ContactNetwork::remove_node(NodeId i, Day t) {
  if (i < 0 || i >= n_) throw InvalidParameter("remove_node: unknown node " + std::to_string(i));
  removed_[i] = std::min(removed_[i], t);
}

std::optional<Day> ContactNetwork::removal_day(NodeId i) const {
  Day d = removed_.at(i);
  if (d == kUnboundedHorizon) return std::nullopt;
  return d;
}

void ContactNetwork::clear_removals() { std::fill(removed_.begin(), removed_.end(), kUnboundedHorizon); }

std::size_t ContactNetwork::edge_count(Day t) const {
  std::size_t twice = 0;
  for (NodeId i = 0; i < n_; ++i) twice += neighbors(i, t).size();
  return twice / 2;
}

// ---------------------------------------------------------------- generators

ContactNetwork gen_line(NodeId n) {
  if (n < 2) throw InvalidParameter("line network needs n >= 2");
  Adjacency adj(n);
  for (NodeId i = 0; i + 1 < n; ++i) add_edge(adj, i, i + 1);
  return ContactNetwork::make_static(n, std::move(adj));
}

ContactNetwork gen_watts_strogatz(NodeId n, int degree, double rewire, std::uint64_t seed) {
  if (degree % 2 != 0 || degree < 0) throw InvalidParameter("Watts-Strogatz degree must be even");
  if (degree >= n) throw InvalidParameter("Watts-Strogatz degree must be below n");
  if (!(rewire >= 0.0 && rewire <= 1.0)) throw InvalidParameter("rewiring probability outside [0,1]");
  Rng rng(seed);
  std::vector<std::set<NodeId>> adj(n);
  for (NodeId u = 0; u < n; ++u)
    for (int k = 1; k <= degree / 2; ++k) {
      NodeId v = (u + k) % n;
      adj[u].insert(v);
      adj[v].insert(u);
    }
  // Lattice edges (u, u+k) are visited in order; the far endpoint moves to a
  // uniform non-neighbor.
  for (int k = 1; k <= degree / 2; ++k)
    for (NodeId u = 0; u < n; ++u) {
      if (!bernoulli(rng, rewire)) continue;
      NodeId v = (u + k) % n;
      if (!adj[u].count(v)) continue;
      if (static_cast<NodeId>(adj[u].size()) >= n - 1) continue;
      NodeId w;
      do {
        w = static_cast<NodeId>(uniform_below(rng, n));
      } while (w == u || adj[u].count(w));
      adj[u].erase(v);
      adj[v].erase(u);
      adj[u].insert(w);
      adj[w].insert(u);
    }
  Adjacency out(n);
  for (NodeId u = 0; u < n; ++u) out[u].assign(adj[u].begin(), adj[u].end());
  return ContactNetwork::make_static(n, std::move(out));
}

namespace {

bool is_graphical(std::vector<int> deg) {
  std::sort(deg.rbegin(), deg.rend());
  long long total = std::accumulate(deg.begin(), deg.end(), 0LL);
  if (total % 2) return false;
  const long long n = static_cast<long long>(deg.size());
  long long left = 0;
  for (long long k = 1; k <= n; ++k) {
    left += deg[k - 1];
    long long right = k * (k - 1);
    for (long long i = k; i < n; ++i) right += std::min<long long>(deg[i], k);
    if (left > right) return false;
  }
  return true;
}

// Stub matching in which each stub of the current node is paired with a stub
// drawn uniformly from the remaining pool, rejecting partners that would form
// a self-loop or repeat an edge. Hubs are matched first.
bool match_stubs(const std::vector<int>& deg, Rng& rng, Adjacency& adj) {
  const NodeId n = static_cast<NodeId>(deg.size());
  std::vector<int> left(deg);
  std::vector<std::set<NodeId>> nb(n);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return deg[a] > deg[b]; });
  for (NodeId u : order) {
    while (left[u] > 0) {
      long long total = 0;
      for (NodeId v = 0; v < n; ++v)
        if (v != u && !nb[u].count(v)) total += left[v];
      if (total == 0) return false;
      long long pick = static_cast<long long>(uniform_below(rng, static_cast<std::uint64_t>(total)));
      NodeId chosen = -1;
      for (NodeId v = 0; v < n; ++v) {
        if (v == u || nb[u].count(v)) continue;
        if (pick < left[v]) {
          chosen = v;
          break;
        }
        pick -= left[v];
      }
      nb[u].insert(chosen);
      nb[chosen].insert(u);
      --left[u];
      --left[chosen];
    }
  }
  adj.assign(n, {});
  for (NodeId u = 0; u < n; ++u) adj[u].assign(nb[u].begin(), nb[u].end());
  return true;
}

}  // namespace

ContactNetwork gen_scale_free(NodeId n, double alpha, std::uint64_t seed) {
  if (!(alpha > 1.0)) throw InvalidParameter("scale-free exponent must exceed 1");
  if (n < 2) throw InvalidParameter("scale-free network needs n >= 2");
  Rng rng(seed);
  const int kmax = n - 1;
  std::vector<double> cdf(kmax);
  double acc = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    acc += std::pow(static_cast<double>(k), -alpha);
    cdf[k - 1] = acc;
  }
  for (double& c : cdf) c /= acc;
  auto draw = [&]() {
    double u = uniform01(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), kmax - 1)) + 1;
  };

  constexpr int kSequences = 50;
  constexpr int kPairings = 20;
  for (int s = 0; s < kSequences; ++s) {
    std::vector<int> deg(n);
    for (auto& d : deg) d = draw();
    long long total = std::accumulate(deg.begin(), deg.end(), 0LL);
    while (total % 2) {
      NodeId i = static_cast<NodeId>(uniform_below(rng, n));
      total -= deg[i];
      deg[i] = draw();
      total += deg[i];
    }
    if (!is_graphical(deg)) continue;
    for (int a = 0; a < kPairings; ++a) {
      Adjacency adj;
      if (match_stubs(deg, rng, adj)) return ContactNetwork::make_static(n, std::move(adj));
    }
  }
  throw GenerationError("scale-free generation failed: no simple realization after bounded retries");
}

namespace {

void validate_sbm(NodeId n, int clusters, double p1, double p2) {
  if (clusters <= 0 || n <= 0 || n % clusters != 0)
    throw InvalidParameter("cluster count must divide n");
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0))
    throw InvalidParameter("SBM probabilities outside [0,1]");
}

bool clusters_linked(int a, int b, int m, SbmVariant variant) {
  if (a == b) return false;
  if (variant == SbmVariant::kStandard) return true;
  int d = std::abs(a - b);
  // Clusters sit on a cycle, matching the inter-cluster count n^2/m of the chain formula.
  return d == 1 || (m >= 3 && d == m - 1);
}

double linked_cluster_pairs(int m, SbmVariant variant) {
  if (variant == SbmVariant::kStandard) return m * (m - 1) / 2.0;
  if (m <= 1) return 0.0;
  return m >= 3 ? m : 1.0;
}

}  // namespace

ContactNetwork gen_sbm(NodeId n, int clusters, double p_intra, double p_inter, SbmVariant variant,
                       std::uint64_t seed) {
  validate_sbm(n, clusters, p_intra, p_inter);
  Rng rng(seed);
  const NodeId size = n / clusters;
  Adjacency adj(n);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) {
      int a = u / size, b = v / size;
      double p = a == b ? p_intra : (clusters_linked(a, b, clusters, variant) ? p_inter : 0.0);
      // Every pair consumes one draw so the stream does not depend on p.
      if (uniform01(rng) < p) add_edge(adj, u, v);
    }
  sort_rows(adj);
  return ContactNetwork::make_static(n, std::move(adj));
}

double expected_edges(NodeId n, int clusters, double p_intra, double p_inter, SbmVariant variant) {
  validate_sbm(n, clusters, p_intra, p_inter);
  const double nn = n, m = clusters, size = nn / m;
  return p_intra / 2.0 * nn * (size - 1.0) + p_inter * size * size * linked_cluster_pairs(clusters, variant);
}

double solve_intra_probability(NodeId n, int clusters, double target_edges, double p_inter,
                               SbmVariant variant) {
  validate_sbm(n, clusters, 0.0, p_inter);
  const double nn = n, size = nn / clusters;
  const double inter = expected_edges(n, clusters, 0.0, p_inter, variant);
  const double slope = nn * (size - 1.0) / 2.0;
  if (slope <= 0.0) throw InvalidParameter("clusters of size one have no intra-cluster pairs");
  double p = (target_edges - inter) / slope;
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("target edge count is infeasible for p_inter");
  return p;
}

// ------------------------------------------------------------------ file io

namespace {

bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoll(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

}  // namespace

ContactNetwork load_temporal_edges(std::istream& in, int replicate_k, int compress_k) {
  if (replicate_k < 1 || compress_k < 1) throw InvalidParameter("replicate/compress factors must be >= 1");
  if (replicate_k > 1 && compress_k > 1) throw InvalidParameter("replicate and compress are mutually exclusive");

  struct Row {
    long long day;
    std::string u, v;
  };
  std::vector<Row> rows;
  bool is_static = false;
  long long declared_nodes = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream hs(line.substr(first + 1));
      std::string key;
      hs >> key;
      if (key == "static") is_static = true;
      if (key == "nodes" && !(hs >> declared_nodes)) throw ParseError("malformed nodes header", lineno);
      continue;
    }
    std::istringstream ls(line);
    std::string d, u, v, extra;
    if (!(ls >> d >> u >> v) || (ls >> extra)) throw ParseError("expected `day u v`", lineno);
    long long day;
    if (!parse_int(d, day) || day < 0) throw ParseError("day must be a non-negative integer", lineno);
    if (u == v) throw ParseError("self-loop", lineno);
    rows.push_back({day, u, v});
  }

  bool numeric = true;
  long long max_id = -1;
  for (const auto& r : rows) {
    long long a, b;
    if (!parse_int(r.u, a) || !parse_int(r.v, b) || a < 0 || b < 0) {
      numeric = false;
      break;
    }
    max_id = std::max({max_id, a, b});
  }
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> ids;
  auto id_of = [&](const std::string& s) -> NodeId {
    if (numeric) return static_cast<NodeId>(std::stoll(s));
    auto [it, fresh] = ids.emplace(s, static_cast<NodeId>(labels.size()));
    if (fresh) labels.push_back(s);
    return it->second;
  };
  std::vector<std::pair<long long, std::pair<NodeId, NodeId>>> edges;
  long long last_day = -1;
  for (const auto& r : rows) {
    edges.push_back({r.day, {id_of(r.u), id_of(r.v)}});
    last_day = std::max(last_day, r.day);
  }
  NodeId n = numeric ? static_cast<NodeId>(max_id + 1) : static_cast<NodeId>(labels.size());
  if (declared_nodes >= 0) {
    if (declared_nodes < n) throw ParseError("nodes header smaller than ids in use", 0);
    if (numeric) n = static_cast<NodeId>(declared_nodes);
  }
  if (is_static || last_day < 0) {
    Adjacency adj(n);
    for (auto& e : edges) add_edge(adj, e.second.first, e.second.second);
    auto net = ContactNetwork::make_static(n, std::move(adj));
    net.set_labels(std::move(labels));
    return net;
  }

  const long long base_days = last_day + 1;
  const long long days = compress_k > 1 ? (base_days + compress_k - 1) / compress_k : base_days;
  std::vector<Adjacency> per_day(days, Adjacency(n));
  for (auto& e : edges) add_edge(per_day[e.first / compress_k], e.second.first, e.second.second);
  std::vector<Adjacency> all;
  all.reserve(days * replicate_k);
  for (int r = 0; r < replicate_k; ++r)
    for (const auto& d : per_day) all.push_back(d);
  auto net = ContactNetwork::make_temporal(n, std::move(all));
  net.set_labels(std::move(labels));
  return net;
}

ContactNetwork load_temporal_edges_file(const std::string& path, int replicate_k, int compress_k) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list " + path);
  return load_temporal_edges(in, replicate_k, compress_k);
}

void write_edge_list(std::ostream& out, const ContactNetwork& net) {
  out << "# nodes " << net.size() << "\n";
  if (net.is_static()) out << "# static\n";
  const auto& labels = net.labels();
  auto name = [&](NodeId i) { return labels.empty() ? std::to_string(i) : labels[i]; };
  for (std::size_t d = 0; d < net.base_day_count(); ++d) {
    const auto& adj = net.base_day(d);
    for (NodeId u = 0; u < net.size(); ++u)
      for (NodeId v : adj[u])
        if (u < v) out << d << '\t' << name(u) << '\t' << name(v) << '\n';
  }
}

// ------------------------------------------------------------------ metrics

TopologyMetrics topology_metrics(const ContactNetwork& net, Day t) {
  const Adjacency adj = net.snapshot(t);
  const NodeId n = net.size();
  TopologyMetrics m;

  long long triples = 0, closed = 0;
  for (NodeId v = 0; v < n; ++v) {
    const auto& row = adj[v];
    long long d = static_cast<long long>(row.size());
    triples += d * (d - 1) / 2;
    for (std::size_t a = 0; a < row.size(); ++a)
      for (std::size_t b = a + 1; b < row.size(); ++b)
        if (std::binary_search(adj[row[a]].begin(), adj[row[a]].end(), row[b])) ++closed;
  }
  m.gamma_c = triples > 0 ? static_cast<double>(closed) / static_cast<double>(triples) : 0.0;

  long long dist_sum = 0, pairs = 0;
  std::vector<int> dist(n);
  for (NodeId s = 0; s < n; ++s) {
    if (!net.is_active(s, t)) continue;
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<NodeId> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      NodeId x = q.front();
      q.pop();
      for (NodeId y : adj[x])
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          dist_sum += dist[y];
          ++pairs;
          q.push(y);
        }
    }
  }
  if (pairs > 0) m.l_p = static_cast<double>(dist_sum) / static_cast<double>(pairs);

  std::vector<NodeId> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : adj[u]) parent[find(u)] = find(v);
  for (NodeId v = 0; v < n; ++v)
    if (net.is_active(v, t) && find(v) == v) ++m.n_components;
  return m;
}

}  // namespace spreadlab
