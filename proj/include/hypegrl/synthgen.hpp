#pragma once

// Synthetic inputs: balanced trees and the wrapped-normal kNN graph.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "hypegrl/embedding.hpp"
#include "hypegrl/graph.hpp"

namespace hypegrl {

struct BalancedTree {
  Graph graph;
  std::vector<int> depth;
};

// Node 0 is the root; ids follow BFS order, so the children of k are
// b*k + 1, ..., b*k + b.
inline BalancedTree balanced_tree(int branching, int depth) {
  if (branching < 1) throw ConfigError("balanced_tree: branching must be >= 1");
  if (depth < 0) throw ConfigError("balanced_tree: depth must be >= 0");
  std::size_t n = 1;
  std::size_t level = 1;
  for (int h = 0; h < depth; ++h) {
    level *= static_cast<std::size_t>(branching);
    n += level;
    if (n > 50'000'000) throw ConfigError("balanced_tree: tree too large");
  }
  BalancedTree out;
  out.depth.assign(n, 0);
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (std::size_t child = 1; child < n; ++child) {
    const std::size_t parent = (child - 1) / static_cast<std::size_t>(branching);
    edges.push_back({static_cast<NodeId>(parent), static_cast<NodeId>(child)});
    out.depth[child] = out.depth[parent] + 1;
  }
  out.graph = Graph::from_edges(n, edges);
  return out;
}

struct GaussianGraphConfig {
  int n_nodes = 1250;
  int n_classes = 6;
  int k_neighbors = 10;
  int dim = 2;
  double mean_radius_max = 5.0;
  double class_scale = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_classes < 1 || n_nodes < n_classes) throw ConfigError("gaussian: need n_nodes >= n_classes >= 1");
    if (k_neighbors < 1 || k_neighbors >= n_nodes) throw ConfigError("gaussian: need 1 <= k_neighbors < n_nodes");
    if (dim < 1) throw ConfigError("gaussian: dim must be >= 1");
    if (!(mean_radius_max >= 0.0)) throw ConfigError("gaussian: mean_radius_max must be >= 0");
    if (!(class_scale > 0.0)) throw ConfigError("gaussian: class_scale must be > 0");
  }
};

struct GaussianGraph {
  LabeledGraph labeled;
  Embedding truth;               // Lorentz coordinates the graph was built from
  std::vector<LorentzPoint> class_means;
};

// Node i belongs to class i mod C, which keeps class sizes within one of each
// other. Each node is joined to its k nearest other nodes (ties by lower id)
// and the directed kNN relation is symmetrised by union.
inline GaussianGraph gaussian_hyperbolic_graph(const GaussianGraphConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const Eigen::Index n = cfg.dim;

  GaussianGraph out;
  for (int c = 0; c < cfg.n_classes; ++c) {
    Vector dir(n);
    do {
      for (Eigen::Index i = 0; i < n; ++i) dir(i) = normal(rng);
    } while (dir.norm() == 0.0);
    dir.normalize();
    const double r = cfg.mean_radius_max * uniform(rng);
    out.class_means.push_back(LorentzPoint::from_spatial(std::sinh(r) * dir));
  }

  const auto n_nodes = static_cast<Eigen::Index>(cfg.n_nodes);
  out.truth = Embedding{Model::lorentz, n, Matrix(n_nodes, n + 1)};
  out.labeled.labels.resize(cfg.n_nodes);
  for (Eigen::Index i = 0; i < n_nodes; ++i) {
    const int c = static_cast<int>(i % cfg.n_classes);
    out.labeled.labels[i] = c;
    out.truth.coords.row(i) = wrapped_normal_sample(out.class_means[c], cfg.class_scale, rng).coords.transpose();
  }

  const Matrix d = embedding_distance_matrix(out.truth);
  std::vector<std::vector<Edge>> per_node(cfg.n_nodes);
  parallel_for(static_cast<std::size_t>(cfg.n_nodes), [&](std::size_t ii) {
    const auto i = static_cast<NodeId>(ii);
    std::vector<NodeId> others;
    others.reserve(cfg.n_nodes - 1);
    for (NodeId j = 0; j < cfg.n_nodes; ++j)
      if (j != i) others.push_back(j);
    const auto closer = [&](NodeId a, NodeId b) {
      return d(i, a) < d(i, b) || (d(i, a) == d(i, b) && a < b);
    };
    std::partial_sort(others.begin(), others.begin() + cfg.k_neighbors, others.end(), closer);
    for (int k = 0; k < cfg.k_neighbors; ++k) per_node[ii].push_back(Edge::of(i, others[k]));
  });
  std::vector<Edge> edges;
  for (const auto& v : per_node) edges.insert(edges.end(), v.begin(), v.end());
  out.labeled.graph = Graph::from_edges(cfg.n_nodes, edges);
  for (int c = 0; c < cfg.n_classes; ++c) out.labeled.class_names.push_back(std::to_string(c));
  return out;
}

}  // namespace hypegrl
