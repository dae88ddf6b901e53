#pragma once

// Link prediction (edge removal split, ranking, F1 at |removed| and
// first-decile lift) and hyperbolic kNN node classification.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hypegrl/embedding.hpp"
#include "hypegrl/graph.hpp"
#include "hypegrl/rdpg.hpp"

namespace hypegrl {

struct LinkSplit {
  std::vector<Edge> retained;      // Omega_E
  std::vector<Edge> removed;       // Omega_R
  std::vector<Edge> non_edges;     // Omega_N
  std::size_t n_nodes = 0;
  double q = 0.9;
  std::uint64_t seed = 0;

  // G' = (V, Omega_E); keeps every node.
  Graph training_graph() const { return Graph::from_edges(n_nodes, retained); }

  // Omega_R followed by Omega_N, both in lexicographic order.
  std::vector<Edge> candidates() const {
    std::vector<Edge> c(removed);
    c.insert(c.end(), non_edges.begin(), non_edges.end());
    return c;
  }
};

// Each edge is kept independently with probability q (draws follow the
// lexicographic edge order).
inline LinkSplit split_edges(const Graph& g, double q, std::uint64_t seed) {
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("split_edges: q must lie in [0, 1]");
  LinkSplit s;
  s.n_nodes = g.num_nodes();
  s.q = q;
  s.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const Edge& e : g.edges()) (u(rng) < q ? s.retained : s.removed).push_back(e);
  const auto n = static_cast<NodeId>(g.num_nodes());
  s.non_edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2 - g.num_edges());
  for (NodeId a = 0; a < n; ++a) {
    const auto& nb = g.neighbors(a);
    auto it = std::upper_bound(nb.begin(), nb.end(), a);
    for (NodeId b = a + 1; b < n; ++b) {
      if (it != nb.end() && *it == b) {
        ++it;
        continue;
      }
      s.non_edges.push_back({a, b});
    }
  }
  return s;
}

using RankedPairs = std::vector<Edge>;

// Ascending distance; ties by lexicographic pair order.
inline RankedPairs rank_candidates_by_distance(const Embedding& e, const LinkSplit& split) {
  if (static_cast<std::size_t>(e.size()) != split.n_nodes) throw DataError("embedding does not cover every node");
  const Embedding l = e.model == Model::native ? convert(e, Model::lorentz) : e;
  struct Item {
    Edge pair;
    double d;
  };
  const auto cand = split.candidates();
  std::vector<Item> items(cand.size());
  parallel_for(cand.size(), [&](std::size_t k) { items[k] = {cand[k], row_distance(l, cand[k].u, cand[k].v)}; });
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.d != b.d) return a.d < b.d;
    return a.pair < b.pair;
  });
  RankedPairs out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(it.pair);
  return out;
}

// Descending RDPG score; ties by lexicographic pair order.
inline RankedPairs rank_candidates_by_score(const SpectralEmbedding& e, const LinkSplit& split) {
  if (static_cast<std::size_t>(e.size()) != split.n_nodes) throw DataError("embedding does not cover every node");
  const auto scored = rdpg_scores(e, split.candidates());
  RankedPairs out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.pair);
  return out;
}

namespace detail {

inline std::size_t hits_in_prefix(const RankedPairs& ranked, const LinkSplit& split, std::size_t prefix) {
  const std::set<Edge> positives(split.removed.begin(), split.removed.end());
  std::size_t hits = 0;
  for (std::size_t k = 0; k < std::min(prefix, ranked.size()); ++k) hits += positives.count(ranked[k]);
  return hits;
}

}  // namespace detail

// Predicts the top |Omega_R| pairs. Predicted and actual positive counts are
// equal, so precision, recall and F1 all equal TP / |Omega_R|.
inline double lp_f1_at_R(const RankedPairs& ranked, const LinkSplit& split) {
  const std::size_t r = split.removed.size();
  if (r == 0) throw DataError("lp_f1_at_R: no removed edges, F1 is undefined");
  if (ranked.size() < r) throw DataError("lp_f1_at_R: ranking shorter than |Omega_R|");
  const std::size_t tp = detail::hits_in_prefix(ranked, split, r);
  const double precision = static_cast<double>(tp) / static_cast<double>(r);  // r predictions
  const double recall = static_cast<double>(tp) / static_cast<double>(split.removed.size());
  if (precision != recall) throw std::logic_error("lp_f1_at_R: precision != recall");
  const double f1 = tp == 0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
  if (f1 != precision && std::abs(f1 - precision) > 1e-15) throw std::logic_error("lp_f1_at_R: F1 != TP/|R|");
  return precision;
}

struct Lift {
  std::size_t hits = 0;
  std::size_t denominator = 0;  // |Omega_R|
  std::size_t decile_size = 0;  // floor(0.1 * |Omega_R u Omega_N|)

  std::string str() const { return std::to_string(hits) + "/" + std::to_string(denominator); }
};

inline Lift lp_lift_first_decile(const RankedPairs& ranked, const LinkSplit& split) {
  Lift l;
  l.denominator = split.removed.size();
  l.decile_size = (split.removed.size() + split.non_edges.size()) / 10;
  l.hits = detail::hits_in_prefix(ranked, split, l.decile_size);
  return l;
}

struct LPReport {
  double f1 = 0.0;
  std::size_t lift_hits = 0;
  std::size_t lift_denominator = 0;
  std::size_t decile_size = 0;
};

inline LPReport evaluate_link_prediction(const RankedPairs& ranked, const LinkSplit& split) {
  const Lift l = lp_lift_first_decile(ranked, split);
  return {lp_f1_at_R(ranked, split), l.hits, l.denominator, l.decile_size};
}

struct StratifiedSplit {
  std::vector<NodeId> train;
  std::vector<NodeId> test;
};

// Per class, round(train_fraction * size) members go to training, clamped so
// each side keeps at least one member. Output ids are sorted.
inline StratifiedSplit stratified_split(const std::vector<int>& labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("stratified_split: fraction must lie in (0, 1)");
  std::map<int, std::vector<NodeId>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(static_cast<NodeId>(i));
  std::mt19937_64 rng(seed);
  StratifiedSplit out;
  for (auto& [cls, members] : by_class) {
    if (members.size() < 2) throw DataError("stratified_split: class " + std::to_string(cls) + " has a single member");
    std::shuffle(members.begin(), members.end(), rng);
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

// Majority vote among the k nearest training nodes under the embedding's
// metric; a tie between classes goes to the tied class whose member is
// nearest.
inline std::vector<int> hyperbolic_knn_classify(const Embedding& e, const std::vector<NodeId>& train,
                                                const std::vector<int>& train_labels, const std::vector<NodeId>& test,
                                                int k) {
  if (train.size() != train_labels.size()) throw DataError("knn: train ids and labels differ in length");
  if (train.empty()) throw DataError("knn: empty training set");
  if (k < 1 || static_cast<std::size_t>(k) > train.size()) throw ConfigError("knn: need 1 <= k <= |train|");
  std::vector<int> pred(test.size());
  parallel_for(test.size(), [&](std::size_t t) {
    std::vector<std::pair<double, std::size_t>> near(train.size());
    for (std::size_t a = 0; a < train.size(); ++a) near[a] = {row_distance(e, test[t], train[a]), a};
    std::partial_sort(near.begin(), near.begin() + k, near.end(), [&](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first < y.first;
      return train[x.second] < train[y.second];
    });
    std::map<int, int> votes;
    for (int a = 0; a < k; ++a) ++votes[train_labels[near[a].second]];
    int best = 0;
    for (const auto& [c, v] : votes) best = std::max(best, v);
    for (int a = 0; a < k; ++a) {
      const int c = train_labels[near[a].second];
      if (votes[c] == best) {
        pred[t] = c;
        break;
      }
    }
  });
  return pred;
}

struct NCReport {
  std::vector<int> classes;         // class id of each per_class_f1 entry
  std::vector<double> per_class_f1;
  double macro_f1 = 0.0;
  double binary_f1 = -1.0;          // F1 of class 1 when exactly two classes, else -1
  int k = 0;
  std::uint64_t split_seed = 0;
};

// Per-class F1 over the classes present in truth or predictions (0 when a
// class has no true positives); macro is their unweighted mean.
inline NCReport macro_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) throw DataError("macro_f1: length mismatch");
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(pred.begin(), pred.end());
  NCReport r;
  for (int c : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == c && truth[i] == c) ++tp;
      else if (pred[i] == c) ++fp;
      else if (truth[i] == c) ++fn;
    }
    const double f1 = tp == 0 ? 0.0 : 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
    r.classes.push_back(c);
    r.per_class_f1.push_back(f1);
  }
  double sum = 0.0;
  for (double f : r.per_class_f1) sum += f;
  r.macro_f1 = r.per_class_f1.empty() ? 0.0 : sum / static_cast<double>(r.per_class_f1.size());
  if (classes.size() == 2 && classes.count(1) == 1) r.binary_f1 = r.per_class_f1[*classes.begin() == 1 ? 0 : 1];
  return r;
}

}  // namespace hypegrl
