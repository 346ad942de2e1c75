#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spreadlab/types.hpp"

namespace spreadlab {

// Sorted neighbor lists, one per node.
using Adjacency = std::vector<std::vector<NodeId>>;

inline constexpr Day kUnboundedHorizon = std::numeric_limits<Day>::max();

class ContactNetwork {
 public:
  ContactNetwork() = default;

  // Same edge set every day.
  static ContactNetwork make_static(NodeId n, Adjacency adjacency);
  // One edge set per day; the horizon is the number of days.
  static ContactNetwork make_temporal(NodeId n, std::vector<Adjacency> days);
  static ContactNetwork from_edges(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& edges);

  NodeId size() const { return n_; }
  bool is_static() const { return static_; }
  Day horizon() const;
  std::size_t base_day_count() const { return days_.size(); }
  const Adjacency& base_day(std::size_t k) const { return days_.at(k); }

  // Day-t neighbors ignoring removals.
  std::span<const NodeId> contacts(NodeId i, Day t) const;
  // Day-t neighbors with removed nodes excluded; empty when i itself is removed.
  std::vector<NodeId> neighbors(NodeId i, Day t) const;
  std::vector<NodeId> closed_neighbors(NodeId i, Day t) const;
  // Active-only adjacency of day t (removed nodes have empty lists).
  Adjacency snapshot(Day t) const;

  bool is_active(NodeId i, Day t) const;
  std::vector<NodeId> active_nodes(Day t) const;
  std::size_t active_count(Day t) const;
  void remove_node(NodeId i, Day t);
  std::optional<Day> removal_day(NodeId i) const;
  // Drops every removal; used to reuse a generated network across runs.
  void clear_removals();

  std::size_t edge_count(Day t) const;

  const std::vector<std::string>& labels() const { return labels_; }
  void set_labels(std::vector<std::string> labels) { labels_ = std::move(labels); }

 private:
  const Adjacency& day_adjacency(Day t) const;

  NodeId n_ = 0;
  bool static_ = true;
  std::vector<Adjacency> days_;
  std::vector<Day> removed_;  // kUnboundedHorizon when never removed
  std::vector<std::string> labels_;
};

ContactNetwork gen_line(NodeId n);
ContactNetwork gen_watts_strogatz(NodeId n, int degree, double rewire, std::uint64_t seed);
ContactNetwork gen_scale_free(NodeId n, double alpha, std::uint64_t seed);

enum class SbmVariant { kStandard, kChain };

ContactNetwork gen_sbm(NodeId n, int clusters, double p_intra, double p_inter, SbmVariant variant,
                       std::uint64_t seed);
double expected_edges(NodeId n, int clusters, double p_intra, double p_inter, SbmVariant variant);
// Intra-cluster probability giving `target_edges` expected edges.
double solve_intra_probability(NodeId n, int clusters, double target_edges, double p_inter,
                               SbmVariant variant);

// Rows are `day u v`, separated by tabs or spaces; `#` starts a comment line.
// Integer tokens are used as ids directly; otherwise labels are mapped densely
// in order of first appearance.
ContactNetwork load_temporal_edges(std::istream& in, int replicate_k = 1, int compress_k = 1);
ContactNetwork load_temporal_edges_file(const std::string& path, int replicate_k = 1,
                                        int compress_k = 1);
void write_edge_list(std::ostream& out, const ContactNetwork& net);

struct TopologyMetrics {
  double gamma_c = 0.0;
  std::optional<double> l_p;  // empty when no connected pair exists
  int n_components = 0;
};

TopologyMetrics topology_metrics(const ContactNetwork& net, Day t);

}  // namespace spreadlab
