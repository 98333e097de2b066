#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gmop/rng.hpp"

namespace gmop {

/// Zero-based node index. Files and the CLI use 1-based ids.
using NodeId = std::size_t;

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct InEdge {
  NodeId from = 0;
  double weight = 1.0;

  friend bool operator==(const InEdge&, const InEdge&) = default;
};

/// Weighted directed graph. An edge (i, j) means "i influences j" with
/// intensity w_ij. Self-loops and zero weights are rejected, so w_ij == 0
/// exactly when (i, j) is absent. Negative weights are allowed.
class SocialGraph {
 public:
  explicit SocialGraph(std::size_t n = 0);

  std::size_t size() const noexcept { return in_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }

  void add_edge(NodeId from, NodeId to, double weight = 1.0);
  void remove_edge(NodeId from, NodeId to);
  void set_weight(NodeId from, NodeId to, double weight);

  bool has_edge(NodeId from, NodeId to) const;
  /// True if an edge exists in either direction.
  bool adjacent(NodeId a, NodeId b) const { return has_edge(a, b) || has_edge(b, a); }
  double weight(NodeId from, NodeId to) const;

  /// In-edges of `to`, sorted by source.
  std::span<const InEdge> in_edges(NodeId to) const { return in_.at(to); }
  std::span<const NodeId> out_neighbors(NodeId from) const { return out_.at(from); }
  std::size_t degree(NodeId v) const;  // distinct neighbors, either direction

  /// All edges sorted by (from, to).
  std::vector<Edge> edges() const;

  friend bool operator==(const SocialGraph&, const SocialGraph&) = default;

 private:
  void check_node(NodeId v) const;
  static void check_weight(double w);

  std::vector<std::vector<InEdge>> in_;
  std::vector<std::vector<NodeId>> out_;
  std::size_t edges_ = 0;
};

/// Ring lattice with floor(k_ws/2) neighbors per side, each lattice edge then
/// rewired with probability p_ws to a uniformly chosen non-neighbor. The
/// result is undirected (both directions present) with unit weights.
SocialGraph generate_watts_strogatz(std::size_t n, std::size_t k_ws, double p_ws, Rng& rng);

/// Joins `hub` in both directions to floor(fraction * (n - 1)) distinct nodes
/// picked uniformly among those not already adjacent to it (fewer if the
/// candidate pool runs out).
SocialGraph add_influencer_hub(SocialGraph g, NodeId hub, double fraction, Rng& rng);

/// Independent Uniform(0, 1) weight on every directed edge, drawn in
/// (from, to) order.
SocialGraph assign_random_weights(SocialGraph g, Rng& rng);

/// Weakly connected component count.
std::size_t component_count(const SocialGraph& g);

Eigen::VectorXd in_weight_diagonal(const SocialGraph& g);

/// Matrix whose row j holds the in-weights of j: entry (j, l) = w_lj.
/// This is the transpose of the edge-indexed weight matrix W.
Eigen::MatrixXd in_weight_matrix(const SocialGraph& g);

/// Parameters of the constant-gain mean recursion.
struct MeanCoupling {
  double delta_mu = 0.6;
  double sigma_inf = 0.0;
  double sigma_y = 1.0;

  /// sigma_y / (sigma_inf + sigma_y)
  double sigma_scalar() const { return sigma_y / (sigma_inf + sigma_y); }
};

/// mu[k+1] = A mu[k] + B 1 y[k], with A = s (I + delta_mu (W^T - D)),
/// B = (1 - s) I and s = sigma_y / (sigma_inf + sigma_y). Row j of A is the
/// per-agent update of j aggregated over its in-neighbors, so (A + B) 1 = 1.
struct SystemMatrices {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd D;
  double sigma_scalar = 1.0;
};

SystemMatrices build_system_matrices(const SocialGraph& g, const MeanCoupling& coupling);

/// max_j |((W^T - D) 1)_j|; zero up to rounding for any graph.
double check_row_sum_condition(const SocialGraph& g);

// Edge-list text format: a header line `n=<N>` followed by one `i j w_ij` line
// per directed edge (1-based ids, 17 significant digits).
void write_edge_list(std::ostream& os, const SocialGraph& g);
SocialGraph read_edge_list(std::istream& is);

}  // namespace gmop
