#pragma once

// Undirected simple graphs, edge-list/label ingestion, shortest paths,
// Laplacian, relative forest accessibility and Gromov hyperbolicity.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypegrl/errors.hpp"
#include "hypegrl/log.hpp"
#include "hypegrl/parallel.hpp"

namespace hypegrl {

using NodeId = int;
using Matrix = Eigen::MatrixXd;

// Unordered node pair stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  static Edge of(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }
  auto operator<=>(const Edge&) const = default;
};

struct GraphBuildStats {
  std::size_t duplicate_edges = 0;
  std::size_t self_loops = 0;
};

class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n_nodes) : adjacency_(n_nodes) {}

  // Drops self-loops and duplicates (in either orientation).
  static Graph from_edges(std::size_t n_nodes, const std::vector<Edge>& edges,
                          GraphBuildStats* stats = nullptr) {
    Graph g(n_nodes);
    GraphBuildStats local;
    for (const Edge& e : edges) {
      if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(std::max(e.u, e.v)) >= n_nodes)
        throw DataError("edge endpoint out of range");
      if (e.u == e.v) {
        ++local.self_loops;
        continue;
      }
      g.adjacency_[e.u].push_back(e.v);
      g.adjacency_[e.v].push_back(e.u);
    }
    std::size_t twice = 0;
    for (auto& nb : g.adjacency_) {
      std::sort(nb.begin(), nb.end());
      const auto before = nb.size();
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
      twice += before - nb.size();
      g.n_edges_ += nb.size();
    }
    g.n_edges_ /= 2;
    local.duplicate_edges = twice / 2;
    if (stats != nullptr) *stats = local;
    return g;
  }

  std::size_t num_nodes() const { return adjacency_.size(); }
  std::size_t num_edges() const { return n_edges_; }
  const std::vector<NodeId>& neighbors(NodeId i) const { return adjacency_[i]; }
  std::size_t degree(NodeId i) const { return adjacency_[i].size(); }

  bool has_edge(NodeId a, NodeId b) const {
    const auto& nb = adjacency_[a];
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  // Edges in lexicographic (u, v) order with u < v.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(n_edges_);
    for (NodeId u = 0; u < static_cast<NodeId>(adjacency_.size()); ++u)
      for (NodeId v : adjacency_[u])
        if (u < v) out.push_back({u, v});
    return out;
  }

  // Original node tokens; empty means "the id itself".
  const std::vector<std::string>& names() const { return names_; }
  void set_names(std::vector<std::string> names) {
    if (!names.empty() && names.size() != num_nodes()) throw DataError("name map size mismatch");
    names_ = std::move(names);
  }
  std::string name(NodeId i) const { return names_.empty() ? std::to_string(i) : names_[i]; }

 private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::size_t n_edges_ = 0;
  std::vector<std::string> names_;
};

struct LabeledGraph {
  Graph graph;
  std::vector<int> labels;        // contiguous class ids 0..C-1
  std::vector<std::string> class_names;

  int num_classes() const { return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1; }
};

namespace detail {

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
      if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

inline bool parse_int(const std::string& s, long long& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Orders tokens numerically when all are integers, else by first appearance.
inline std::vector<std::string> canonical_token_order(const std::vector<std::string>& first_seen) {
  std::vector<std::pair<long long, std::string>> numeric;
  numeric.reserve(first_seen.size());
  for (const auto& t : first_seen) {
    long long v = 0;
    if (!parse_int(t, v)) return first_seen;
    numeric.emplace_back(v, t);
  }
  std::sort(numeric.begin(), numeric.end());
  std::vector<std::string> out;
  out.reserve(numeric.size());
  for (auto& [v, t] : numeric) out.push_back(std::move(t));
  return out;
}

}  // namespace detail

struct EdgeListLoad {
  Graph graph;
  GraphBuildStats stats;
};

// Whitespace (or comma) separated node-token pairs; '#' lines are comments.
// Tokens are relabelled to contiguous ids (numeric order when all integers).
inline EdgeListLoad load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list: " + path);
  std::vector<std::string> first_seen;
  std::unordered_map<std::string, std::size_t> seen;
  std::vector<std::pair<std::string, std::string>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto tokens = detail::split_tokens(line);
    if (tokens.size() != 2) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected two node tokens, got " +
                      std::to_string(tokens.size()));
    }
    for (const auto& t : tokens)
      if (seen.emplace(t, first_seen.size()).second) first_seen.push_back(t);
    raw.emplace_back(std::move(tokens[0]), std::move(tokens[1]));
  }
  if (first_seen.empty()) throw DataError(path + ": edge list has no nodes");

  auto names = detail::canonical_token_order(first_seen);
  std::unordered_map<std::string, NodeId> id;
  for (std::size_t i = 0; i < names.size(); ++i) id.emplace(names[i], static_cast<NodeId>(i));
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [a, b] : raw) edges.push_back(Edge::of(id.at(a), id.at(b)));

  EdgeListLoad out;
  out.graph = Graph::from_edges(names.size(), edges, &out.stats);
  out.graph.set_names(std::move(names));
  if (out.stats.duplicate_edges > 0 || out.stats.self_loops > 0) {
    log::warn(path, ": dropped ", out.stats.duplicate_edges, " duplicate edges and ",
              out.stats.self_loops, " self-loops");
  }
  return out;
}

// Two-column "node,label" CSV; an optional header line is skipped. Every graph
// node must be labelled; unknown nodes are an error.
inline LabeledGraph load_labels(const std::string& path, Graph graph) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file: " + path);
  std::unordered_map<std::string, NodeId> id;
  for (NodeId i = 0; i < static_cast<NodeId>(graph.num_nodes()); ++i) id.emplace(graph.name(i), i);

  std::vector<std::string> raw(graph.num_nodes());
  std::vector<bool> has(graph.num_nodes(), false);
  std::vector<std::string> label_seen;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto tokens = detail::split_tokens(line);
    if (tokens.size() != 2) throw DataError(path + ":" + std::to_string(line_no) + ": expected node,label");
    // An optional "node,label" header row.
    const bool header = first_row && tokens[0] == "node" && tokens[1] == "label";
    first_row = false;
    if (header) continue;
    const auto it = id.find(tokens[0]);
    if (it == id.end()) throw DataError(path + ":" + std::to_string(line_no) + ": unknown node '" + tokens[0] + "'");
    if (std::find(label_seen.begin(), label_seen.end(), tokens[1]) == label_seen.end())
      label_seen.push_back(tokens[1]);
    raw[it->second] = tokens[1];
    has[it->second] = true;
  }
  for (std::size_t i = 0; i < has.size(); ++i)
    if (!has[i]) throw DataError(path + ": node '" + graph.name(static_cast<NodeId>(i)) + "' has no label");

  LabeledGraph out;
  out.class_names = detail::canonical_token_order(label_seen);
  std::map<std::string, int> cls;
  for (std::size_t c = 0; c < out.class_names.size(); ++c) cls.emplace(out.class_names[c], static_cast<int>(c));
  out.labels.reserve(raw.size());
  for (const auto& r : raw) out.labels.push_back(cls.at(r));
  out.graph = std::move(graph);
  return out;
}

struct Component {
  Graph graph;
  std::vector<NodeId> old_to_new;  // -1 for nodes outside the component
  std::vector<NodeId> new_to_old;
};

// Connected component labels, numbered in order of their smallest node id.
inline std::vector<int> component_ids(const Graph& g) {
  const auto n = static_cast<NodeId>(g.num_nodes());
  std::vector<int> comp(n, -1);
  int next = 0;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[s] != -1) continue;
    std::vector<NodeId> stack{s};
    comp[s] = next;
    while (!stack.empty()) {
      const NodeId x = stack.back();
      stack.pop_back();
      for (NodeId y : g.neighbors(x))
        if (comp[y] == -1) comp[y] = next, stack.push_back(y);
    }
    ++next;
  }
  return comp;
}

inline bool is_connected(const Graph& g) {
  const auto comp = component_ids(g);
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

// Ties are broken in favour of the component holding the smallest node id.
inline Component largest_connected_component(const Graph& g) {
  const auto comp = component_ids(g);
  const int n_comp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::size_t> sizes(n_comp, 0);
  for (int c : comp) ++sizes[c];
  int best = 0;
  for (int c = 1; c < n_comp; ++c)
    if (sizes[c] > sizes[best]) best = c;

  Component out;
  out.old_to_new.assign(g.num_nodes(), -1);
  for (NodeId i = 0; i < static_cast<NodeId>(g.num_nodes()); ++i) {
    if (comp[i] != best) continue;
    out.old_to_new[i] = static_cast<NodeId>(out.new_to_old.size());
    out.new_to_old.push_back(i);
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges())
    if (comp[e.u] == best) edges.push_back({out.old_to_new[e.u], out.old_to_new[e.v]});
  out.graph = Graph::from_edges(out.new_to_old.size(), edges);
  if (!g.names().empty()) {
    std::vector<std::string> names;
    for (NodeId old : out.new_to_old) names.push_back(g.names()[old]);
    out.graph.set_names(std::move(names));
  }
  return out;
}

// Hop counts from `source`; -1 marks unreachable nodes.
inline std::vector<int> bfs_hops(const Graph& g, NodeId source) {
  std::vector<int> dist(g.num_nodes(), -1);
  std::queue<NodeId> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const NodeId x = q.front();
    q.pop();
    for (NodeId y : g.neighbors(x))
      if (dist[y] < 0) dist[y] = dist[x] + 1, q.push(y);
  }
  return dist;
}

// Row-major N*N hop counts. Throws on disconnected input.
inline std::vector<int> hop_matrix(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<int> hops(n * n);
  std::vector<char> broken(n, 0);
  parallel_for(n, [&](std::size_t s) {
    const auto row = bfs_hops(g, static_cast<NodeId>(s));
    for (std::size_t t = 0; t < n; ++t) {
      if (row[t] < 0) broken[s] = 1;
      hops[s * n + t] = row[t];
    }
  });
  if (std::any_of(broken.begin(), broken.end(), [](char b) { return b != 0; })) {
    throw DataError("graph is disconnected; restrict it with largest_connected_component first");
  }
  return hops;
}

inline Matrix shortest_path_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const auto hops = hop_matrix(g);
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = hops[i * n + j];
  return d;
}

inline int diameter(const Graph& g) {
  const auto hops = hop_matrix(g);
  return hops.empty() ? 0 : *std::max_element(hops.begin(), hops.end());
}

inline Matrix adjacency_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Matrix a = Matrix::Zero(n, n);
  for (const Edge& e : g.edges()) a(e.u, e.v) = a(e.v, e.u) = 1.0;
  return a;
}

inline Matrix laplacian(const Graph& g) {
  Matrix l = -adjacency_matrix(g);
  for (NodeId i = 0; i < static_cast<NodeId>(g.num_nodes()); ++i) l(i, i) = static_cast<double>(g.degree(i));
  return l;
}

// (I + L)^{-1}; I + L is symmetric positive definite.
inline Matrix rfa_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const Matrix m = Matrix::Identity(n, n) + laplacian(g);
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw std::logic_error("rfa_matrix: I + L not positive definite");
  Matrix inv = llt.solve(Matrix::Identity(n, n));
  return 0.5 * (inv + inv.transpose());
}

struct Hyperbolicity {
  double delta_mean = 0.0;
  bool exhaustive = true;
  std::uint64_t quadruples = 0;
};

inline constexpr std::uint64_t kDefaultQuadrupleBudget = 1'000'000;

namespace detail {

inline std::uint64_t choose4(std::uint64_t n) {
  if (n < 4) return 0;
  // Exact in 128-bit for any realistic n.
  const unsigned __int128 v = static_cast<unsigned __int128>(n) * (n - 1) * (n - 2) * (n - 3) / 24;
  return v > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                      : static_cast<std::uint64_t>(v);
}

// Twice the four-point delta of {a, b, c, d}: S1 - S2 for sorted pair sums.
inline int four_point_twice(const std::vector<int>& h, std::size_t n, std::size_t a, std::size_t b,
                            std::size_t c, std::size_t d) {
  int s[3] = {h[a * n + b] + h[c * n + d], h[a * n + c] + h[b * n + d], h[a * n + d] + h[b * n + c]};
  std::sort(s, s + 3);
  return s[2] - s[1];
}

}  // namespace detail

// Mean four-point Gromov delta over node quadruples: exhaustive when
// C(N,4) <= max_quadruples, otherwise a uniform sample of that many
// quadruples. Hop sums are integers, so the accumulation is exact.
inline Hyperbolicity gromov_delta_mean(const Graph& g, std::uint64_t max_quadruples = kDefaultQuadrupleBudget,
                                       std::uint64_t seed = 0) {
  const std::size_t n = g.num_nodes();
  if (n < 4) throw DataError("gromov_delta_mean: need at least 4 nodes");
  if (max_quadruples == 0) throw ConfigError("gromov_delta_mean: quadruple budget must be positive");
  const auto h = hop_matrix(g);
  const std::uint64_t total = detail::choose4(n);
  Hyperbolicity out;
  if (total <= max_quadruples) {
    std::vector<std::int64_t> per_a(n, 0);
    parallel_for(n, [&](std::size_t a) {
      std::int64_t acc = 0;
      for (std::size_t b = a + 1; b < n; ++b)
        for (std::size_t c = b + 1; c < n; ++c)
          for (std::size_t d = c + 1; d < n; ++d) acc += detail::four_point_twice(h, n, a, b, c, d);
      per_a[a] = acc;
    });
    const std::int64_t sum = std::accumulate(per_a.begin(), per_a.end(), std::int64_t{0});
    out.delta_mean = static_cast<double>(sum) / (2.0 * static_cast<double>(total));
    out.exhaustive = true;
    out.quadruples = total;
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::int64_t sum = 0;
  for (std::uint64_t s = 0; s < max_quadruples; ++s) {
    std::size_t q[4];
    for (int k = 0; k < 4; ++k) {
      bool fresh = false;
      while (!fresh) {
        q[k] = pick(rng);
        fresh = std::find(q, q + k, q[k]) == q + k;
      }
    }
    sum += detail::four_point_twice(h, n, q[0], q[1], q[2], q[3]);
  }
  out.delta_mean = static_cast<double>(sum) / (2.0 * static_cast<double>(max_quadruples));
  out.exhaustive = false;
  out.quadruples = max_quadruples;
  return out;
}

}  // namespace hypegrl
