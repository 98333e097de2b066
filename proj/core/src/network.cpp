#include "gmop/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gmop/error.hpp"

namespace gmop {

SocialGraph::SocialGraph(std::size_t n) : in_(n), out_(n) {}

void SocialGraph::check_node(NodeId v) const {
  if (v >= size()) {
    throw InvalidParameter("node " + std::to_string(v + 1) + " outside [1, " +
                           std::to_string(size()) + "]");
  }
}

void SocialGraph::check_weight(double w) {
  if (!std::isfinite(w) || w == 0.0) {
    throw InvalidParameter("edge weight must be finite and non-zero");
  }
}

void SocialGraph::add_edge(NodeId from, NodeId to, double weight) {
  check_node(from);
  check_node(to);
  if (from == to) throw InvalidParameter("self-loop on node " + std::to_string(from + 1));
  check_weight(weight);
  auto& in = in_[to];
  auto it = std::lower_bound(in.begin(), in.end(), from,
                             [](const InEdge& e, NodeId v) { return e.from < v; });
  if (it != in.end() && it->from == from) {
    throw InvalidParameter("duplicate edge " + std::to_string(from + 1) + " -> " +
                           std::to_string(to + 1));
  }
  in.insert(it, InEdge{from, weight});
  auto& out = out_[from];
  out.insert(std::lower_bound(out.begin(), out.end(), to), to);
  ++edges_;
}

void SocialGraph::remove_edge(NodeId from, NodeId to) {
  check_node(from);
  check_node(to);
  auto& in = in_[to];
  auto it = std::lower_bound(in.begin(), in.end(), from,
                             [](const InEdge& e, NodeId v) { return e.from < v; });
  if (it == in.end() || it->from != from) return;
  in.erase(it);
  auto& out = out_[from];
  out.erase(std::lower_bound(out.begin(), out.end(), to));
  --edges_;
}

void SocialGraph::set_weight(NodeId from, NodeId to, double weight) {
  check_node(from);
  check_node(to);
  check_weight(weight);
  auto& in = in_[to];
  auto it = std::lower_bound(in.begin(), in.end(), from,
                             [](const InEdge& e, NodeId v) { return e.from < v; });
  if (it == in.end() || it->from != from) {
    throw InvalidParameter("no edge " + std::to_string(from + 1) + " -> " + std::to_string(to + 1));
  }
  it->weight = weight;
}

bool SocialGraph::has_edge(NodeId from, NodeId to) const {
  if (from >= size() || to >= size()) return false;
  const auto& out = out_[from];
  return std::binary_search(out.begin(), out.end(), to);
}

double SocialGraph::weight(NodeId from, NodeId to) const {
  if (to >= size()) return 0.0;
  const auto& in = in_[to];
  auto it = std::lower_bound(in.begin(), in.end(), from,
                             [](const InEdge& e, NodeId v) { return e.from < v; });
  return (it != in.end() && it->from == from) ? it->weight : 0.0;
}

std::size_t SocialGraph::degree(NodeId v) const {
  check_node(v);
  std::vector<NodeId> nb(out_[v].begin(), out_[v].end());
  for (const InEdge& e : in_[v]) nb.push_back(e.from);
  std::sort(nb.begin(), nb.end());
  return static_cast<std::size_t>(std::unique(nb.begin(), nb.end()) - nb.begin());
}

std::vector<Edge> SocialGraph::edges() const {
  std::vector<Edge> all;
  all.reserve(edges_);
  for (NodeId i = 0; i < size(); ++i) {
    for (NodeId j : out_[i]) all.push_back({i, j, weight(i, j)});
  }
  return all;
}

// ---------------------------------------------------------------------------

SocialGraph generate_watts_strogatz(std::size_t n, std::size_t k_ws, double p_ws, Rng& rng) {
  if (n < 3) throw InvalidParameter("watts-strogatz needs n >= 3");
  if (k_ws < 1) throw InvalidParameter("watts-strogatz needs k_ws >= 1");
  if (k_ws >= n) throw InvalidParameter("watts-strogatz needs k_ws < n");
  if (!(p_ws >= 0.0 && p_ws <= 1.0)) throw InvalidParameter("p_ws must lie in [0, 1]");

  const std::size_t per_side = k_ws / 2;
  SocialGraph g(n);
  for (NodeId i = 0; i < n; ++i) {
    for (std::size_t d = 1; d <= per_side; ++d) {
      const NodeId j = (i + d) % n;
      g.add_edge(i, j);
      g.add_edge(j, i);
    }
  }

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  for (std::size_t d = 1; d <= per_side; ++d) {
    for (NodeId u = 0; u < n; ++u) {
      const NodeId v = (u + d) % n;
      if (!(coin(rng) < p_ws)) continue;
      if (!g.adjacent(u, v)) continue;  // already rewired away
      if (g.degree(u) >= n - 1) continue;
      NodeId w = pick(rng);
      while (w == u || g.adjacent(u, w)) w = pick(rng);
      g.remove_edge(u, v);
      g.remove_edge(v, u);
      g.add_edge(u, w);
      g.add_edge(w, u);
    }
  }
  return g;
}

SocialGraph add_influencer_hub(SocialGraph g, NodeId hub, double fraction, Rng& rng) {
  const std::size_t n = g.size();
  if (hub >= n) throw InvalidParameter("hub node outside the graph");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidParameter("hub fraction must lie in (0, 1]");

  const auto wanted = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n - 1)));
  std::vector<NodeId> pool;
  for (NodeId v = 0; v < n; ++v) {
    if (v != hub && !g.adjacent(hub, v)) pool.push_back(v);
  }
  const std::size_t count = std::min(wanted, pool.size());
  // Partial Fisher-Yates: the first `count` entries become a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    g.add_edge(hub, pool[i]);
    g.add_edge(pool[i], hub);
  }
  return g;
}

SocialGraph assign_random_weights(SocialGraph g, Rng& rng) {
  for (const Edge& e : g.edges()) g.set_weight(e.from, e.to, uniform_open01(rng));
  return g;
}

std::size_t component_count(const SocialGraph& g) {
  const std::size_t n = g.size();
  std::vector<NodeId> parent(n);
  for (NodeId v = 0; v < n; ++v) parent[v] = v;
  auto find = [&](NodeId v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t components = n;
  for (const Edge& e : g.edges()) {
    const NodeId a = find(e.from), b = find(e.to);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

Eigen::VectorXd in_weight_diagonal(const SocialGraph& g) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  for (NodeId j = 0; j < g.size(); ++j) {
    for (const InEdge& e : g.in_edges(j)) d(static_cast<Eigen::Index>(j)) += e.weight;
  }
  return d;
}

Eigen::MatrixXd in_weight_matrix(const SocialGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (NodeId j = 0; j < g.size(); ++j) {
    for (const InEdge& e : g.in_edges(j)) {
      w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(e.from)) = e.weight;
    }
  }
  return w;
}

SystemMatrices build_system_matrices(const SocialGraph& g, const MeanCoupling& c) {
  if (!(c.sigma_inf >= 0.0)) throw InvalidParameter("sigma_inf must be >= 0");
  if (!(c.sigma_y > 0.0)) throw InvalidParameter("sigma_y must be > 0");
  if (!(c.delta_mu >= 0.0)) throw InvalidParameter("delta_mu must be >= 0");

  const auto n = static_cast<Eigen::Index>(g.size());
  SystemMatrices sys;
  sys.sigma_scalar = c.sigma_scalar();
  sys.D = in_weight_diagonal(g);
  const Eigen::MatrixXd laplacian = in_weight_matrix(g) - Eigen::MatrixXd(sys.D.asDiagonal());
  sys.A = sys.sigma_scalar * (Eigen::MatrixXd::Identity(n, n) + c.delta_mu * laplacian);
  sys.B = (1.0 - sys.sigma_scalar) * Eigen::MatrixXd::Identity(n, n);
  return sys;
}

double check_row_sum_condition(const SocialGraph& g) {
  if (g.size() == 0) return 0.0;
  const Eigen::VectorXd d = in_weight_diagonal(g);
  const Eigen::VectorXd residual = in_weight_matrix(g).rowwise().sum() - d;
  return residual.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------

void write_edge_list(std::ostream& os, const SocialGraph& g) {
  os << "n=" << g.size() << '\n';
  char buf[64];
  for (const Edge& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    os << (e.from + 1) << ' ' << (e.to + 1) << ' ' << buf << '\n';
  }
}

SocialGraph read_edge_list(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw ParseError("edge list line " + std::to_string(line_no) + ": " + why);
  };

  bool have_header = false;
  SocialGraph g;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!have_header) {
      std::size_t n = 0;
      char tail = 0;
      if (std::sscanf(line.c_str(), " n=%zu %c", &n, &tail) != 1) fail("expected header `n=<N>`");
      g = SocialGraph(n);
      have_header = true;
      continue;
    }
    std::istringstream fields(line);
    long long i = 0, j = 0;
    double w = 0.0;
    std::string extra;
    if (!(fields >> i >> j >> w) || (fields >> extra)) fail("expected `i j w`");
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > g.size() ||
        static_cast<std::size_t>(j) > g.size()) {
      fail("node id out of range");
    }
    try {
      g.add_edge(static_cast<NodeId>(i - 1), static_cast<NodeId>(j - 1), w);
    } catch (const InvalidParameter& e) {
      fail(e.what());
    }
  }
  if (!have_header) throw ParseError("edge list: missing `n=<N>` header");
  return g;
}

}  // namespace gmop
