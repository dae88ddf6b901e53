#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "hypegrl/evalkit.hpp"
#include "hypegrl/synthgen.hpp"

using namespace hypegrl;

namespace {

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < static_cast<NodeId>(n); ++i)
    for (NodeId j = i + 1; j < static_cast<NodeId>(n); ++j)
      if (coin(rng)) edges.push_back({i, j});
  return Graph::from_edges(n, edges);
}

// Puts the removed edges first, then the non-edges.
RankedPairs oracle_ranking(const LinkSplit& s) { return s.candidates(); }

}  // namespace

TEST(SplitEdges, ExtremesOfQ) {
  const Graph g = random_graph(30, 0.2, 1);
  const auto keep = split_edges(g, 1.0, 3);
  EXPECT_TRUE(keep.removed.empty());
  EXPECT_EQ(keep.retained.size(), g.num_edges());
  const auto drop = split_edges(g, 0.0, 3);
  EXPECT_TRUE(drop.retained.empty());
  EXPECT_EQ(drop.removed, g.edges());
  EXPECT_THROW(split_edges(g, 1.5, 0), ConfigError);
}

TEST(SplitEdges, PartitionsTheEdgesAndEnumeratesNonEdges) {
  const Graph g = random_graph(40, 0.25, 2);
  const auto s = split_edges(g, 0.7, 5);
  std::set<Edge> all(s.retained.begin(), s.retained.end());
  for (const Edge& e : s.removed) EXPECT_TRUE(all.insert(e).second);
  EXPECT_EQ(std::vector<Edge>(all.begin(), all.end()), g.edges());
  EXPECT_EQ(s.non_edges.size(), 40u * 39u / 2u - g.num_edges());
  for (const Edge& e : s.non_edges) EXPECT_FALSE(g.has_edge(e.u, e.v));
  const Graph train = s.training_graph();
  EXPECT_EQ(train.num_nodes(), 40u);
  EXPECT_EQ(train.num_edges(), s.retained.size());
}

TEST(SplitEdges, NonEdgeCountMatchesTheToggleSwitchShape) {
  // 37904 unconnected pairs for 200 nodes and 1896 edges counts ordered pairs.
  EXPECT_EQ(200u * 199u - 1896u, 37904u);
  const Graph g = random_graph(200, 1896.0 / 19900.0, 7);
  EXPECT_EQ(split_edges(g, 0.9, 0).non_edges.size(), 19900u - g.num_edges());
}

TEST(SplitEdges, RemovedCountFollowsTheBinomial) {
  const Graph g = random_graph(60, 0.1, 3);
  const double m = static_cast<double>(g.num_edges());
  const double q = 0.9;
  double sum = 0.0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) sum += static_cast<double>(split_edges(g, q, s).removed.size());
  const double sigma = std::sqrt(m * q * (1.0 - q) / seeds);
  EXPECT_NEAR(sum / seeds, (1.0 - q) * m, 3.0 * sigma);
}

TEST(SplitEdges, Deterministic) {
  const Graph g = random_graph(30, 0.3, 4);
  EXPECT_EQ(split_edges(g, 0.8, 9).removed, split_edges(g, 0.8, 9).removed);
}

TEST(RankByDistance, PermutationOfCandidatesMatchingABruteForceSort) {
  const Graph g = random_graph(6, 0.5, 11);
  const auto s = split_edges(g, 0.6, 1);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 0.8);
  Embedding e{Model::lorentz, 2, Matrix(6, 3)};
  for (int i = 0; i < 6; ++i) {
    Vector x(2);
    x << normal(rng), normal(rng);
    e.coords.row(i) = LorentzPoint::from_spatial(x).coords.transpose();
  }
  const auto ranked = rank_candidates_by_distance(e, s);
  auto brute = s.candidates();
  std::sort(brute.begin(), brute.end(), [&](const Edge& a, const Edge& b) {
    const double da = row_distance(e, a.u, a.v), db = row_distance(e, b.u, b.v);
    return da < db || (da == db && a < b);
  });
  EXPECT_EQ(ranked, brute);
  auto sorted = ranked;
  std::sort(sorted.begin(), sorted.end());
  auto cand = s.candidates();
  std::sort(cand.begin(), cand.end());
  EXPECT_EQ(sorted, cand);
}

TEST(RankByDistance, TiesFallBackToPairOrder) {
  const Graph g = Graph::from_edges(4, {{0, 1}, {2, 3}});
  const auto s = split_edges(g, 0.5, 0);
  const auto ranked = rank_candidates_by_distance(Embedding::at_base_point(Model::poincare, 2, 4), s);
  EXPECT_TRUE(std::is_sorted(ranked.begin(), ranked.end()));
  EXPECT_THROW(rank_candidates_by_distance(Embedding::at_base_point(Model::poincare, 2, 3), s), DataError);
}

TEST(RankByDistance, SeparatedPositivesComeFirst) {
  // A path laid out along a geodesic: removed edges join neighbours, the
  // closest pairs.
  const Graph g = Graph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
  const auto s = split_edges(g, 0.0, 0);
  Embedding e{Model::lorentz, 1, Matrix(6, 2)};
  for (int i = 0; i < 6; ++i) e.coords.row(i) << std::sinh(1.0 * i), std::cosh(1.0 * i);
  const auto ranked = rank_candidates_by_distance(e, s);
  EXPECT_DOUBLE_EQ(lp_f1_at_R(ranked, s), 1.0);
}

TEST(LinkPredictionMetrics, F1Examples) {
  const Graph g = random_graph(20, 0.3, 5);
  const auto s = split_edges(g, 0.7, 2);
  ASSERT_GE(s.removed.size(), 4u);
  const auto perfect = oracle_ranking(s);
  EXPECT_DOUBLE_EQ(lp_f1_at_R(perfect, s), 1.0);
  RankedPairs worst(s.non_edges);
  worst.insert(worst.end(), s.removed.begin(), s.removed.end());
  EXPECT_DOUBLE_EQ(lp_f1_at_R(worst, s), 0.0);
}

TEST(LinkPredictionMetrics, ThreeOfFourMatchesConfusionMatrixF1) {
  LinkSplit s;
  s.n_nodes = 6;
  s.removed = {{0, 1}, {0, 2}, {0, 3}, {0, 4}};
  s.non_edges = {{1, 2}, {1, 3}, {2, 3}, {4, 5}};
  const RankedPairs ranked{{0, 1}, {1, 2}, {0, 2}, {0, 3}, {0, 4}, {1, 3}, {2, 3}, {4, 5}};
  // Predicted: top 4. TP 3, FP 1, FN 1.
  const double precision = 3.0 / 4.0, recall = 3.0 / 4.0;
  EXPECT_DOUBLE_EQ(lp_f1_at_R(ranked, s), 2.0 * precision * recall / (precision + recall));
  EXPECT_DOUBLE_EQ(lp_f1_at_R(ranked, s), 0.75);
}

TEST(LinkPredictionMetrics, EmptyRemovedSetIsAnError) {
  const Graph g = random_graph(10, 0.3, 1);
  const auto s = split_edges(g, 1.0, 0);
  EXPECT_THROW(lp_f1_at_R(s.candidates(), s), DataError);
}

TEST(LinkPredictionMetrics, PerfectLiftAndDecileSize) {
  const Graph g = random_graph(40, 0.1, 6);
  const auto s = split_edges(g, 0.9, 1);
  const auto lift = lp_lift_first_decile(oracle_ranking(s), s);
  EXPECT_EQ(lift.decile_size, (s.removed.size() + s.non_edges.size()) / 10);
  ASSERT_LE(s.removed.size(), lift.decile_size);
  EXPECT_EQ(lift.hits, s.removed.size());
  EXPECT_EQ(lift.denominator, s.removed.size());
  const auto report = evaluate_link_prediction(oracle_ranking(s), s);
  EXPECT_LE(report.lift_hits, std::min(report.lift_denominator, report.decile_size));
}

TEST(LinkPredictionMetrics, RandomRankingLiftIsHypergeometric) {
  const Graph g = random_graph(50, 0.2, 8);
  const auto s = split_edges(g, 0.8, 3);
  const double M = static_cast<double>(s.removed.size() + s.non_edges.size());
  const double K = static_cast<double>(s.removed.size());
  const double d = std::floor(0.1 * M);
  const double mean = d * K / M;
  const double var = mean * (M - K) / M * (M - d) / (M - 1.0);
  double sum = 0.0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    auto ranked = s.candidates();
    std::mt19937_64 rng(seed);
    std::shuffle(ranked.begin(), ranked.end(), rng);
    sum += static_cast<double>(lp_lift_first_decile(ranked, s).hits);
  }
  EXPECT_NEAR(sum / seeds, mean, 3.0 * std::sqrt(var / seeds));
}

TEST(StratifiedSplit, BalancedExample) {
  const std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  const auto s = stratified_split(labels, 0.8, 4);
  ASSERT_EQ(s.train.size(), 8u);
  ASSERT_EQ(s.test.size(), 2u);
  std::vector<int> test_labels;
  for (NodeId i : s.test) test_labels.push_back(labels[i]);
  std::sort(test_labels.begin(), test_labels.end());
  EXPECT_EQ(test_labels, (std::vector<int>{0, 1}));
}

TEST(StratifiedSplit, ProportionsDisjointnessAndDeterminism) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> cls(0, 3);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<int> labels(97);
    for (auto& l : labels) l = cls(rng);
    std::vector<int> count(4, 0);
    for (int l : labels) ++count[l];
    if (*std::min_element(count.begin(), count.end()) < 2) continue;
    const auto s = stratified_split(labels, 0.8, rep);
    std::vector<NodeId> all(s.train);
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), 97u);
    for (NodeId i = 0; i < 97; ++i) EXPECT_EQ(all[i], i);
    std::vector<int> train_count(4, 0);
    for (NodeId i : s.train) ++train_count[labels[i]];
    for (int c = 0; c < 4; ++c) EXPECT_LE(std::abs(train_count[c] - 0.8 * count[c]), 1.0);
    EXPECT_EQ(s.train, stratified_split(labels, 0.8, rep).train);
  }
}

TEST(StratifiedSplit, SingletonClassIsAnError) {
  EXPECT_THROW(stratified_split({0, 0, 1}, 0.8, 0), DataError);
  EXPECT_THROW(stratified_split({0, 0, 1, 1}, 1.0, 0), ConfigError);
}

TEST(KnnClassify, Examples) {
  std::mt19937_64 rng(1);
  Vector a(2), b(2);
  a << 3.0, 0.0;
  b << -3.0, 0.0;
  const LorentzPoint ca = LorentzPoint::from_spatial(a), cb = LorentzPoint::from_spatial(b);
  Embedding e{Model::lorentz, 2, Matrix(40, 3)};
  std::vector<int> labels(40);
  for (int i = 0; i < 40; ++i) {
    labels[i] = i % 2;
    e.coords.row(i) = wrapped_normal_sample(labels[i] == 0 ? ca : cb, 0.05, rng).coords.transpose();
  }
  const auto s = stratified_split(labels, 0.5, 3);
  std::vector<int> train_labels;
  for (NodeId i : s.train) train_labels.push_back(labels[i]);
  const auto pred = hyperbolic_knn_classify(e, s.train, train_labels, s.test, 5);
  for (std::size_t t = 0; t < s.test.size(); ++t) EXPECT_EQ(pred[t], labels[s.test[t]]);

  // Identical predictions in the other model.
  EXPECT_EQ(hyperbolic_knn_classify(convert(e, Model::poincare), s.train, train_labels, s.test, 5), pred);

  // One training node labels everything.
  const auto one = hyperbolic_knn_classify(e, {0}, {7}, s.test, 1);
  for (int p : one) EXPECT_EQ(p, 7);

  // k = 1 on a coincident point.
  Embedding dup = e;
  dup.coords.row(1) = dup.coords.row(0);
  EXPECT_EQ(hyperbolic_knn_classify(dup, {0, 2, 3}, {4, 5, 6}, {1}, 1), std::vector<int>{4});

  EXPECT_THROW(hyperbolic_knn_classify(e, {0, 1}, {0, 1}, {2}, 3), ConfigError);
}

TEST(KnnClassify, TieGoesToTheNearestTiedClass) {
  Embedding e{Model::lorentz, 1, Matrix(5, 2)};
  const double x[] = {0.0, 0.1, -0.2, 0.3, -0.4};
  for (int i = 0; i < 5; ++i) e.coords.row(i) << std::sinh(x[i]), std::cosh(x[i]);
  // Neighbours of node 0 in order: 1 (class 8), 2 (class 9), 3 (class 9), 4 (class 8).
  EXPECT_EQ(hyperbolic_knn_classify(e, {1, 2, 3, 4}, {8, 9, 9, 8}, {0}, 4), std::vector<int>{8});
  EXPECT_EQ(hyperbolic_knn_classify(e, {1, 2, 3, 4}, {8, 9, 9, 8}, {0}, 3), std::vector<int>{9});
}

TEST(MacroF1, Examples) {
  EXPECT_DOUBLE_EQ(macro_f1({0, 1, 2, 1}, {0, 1, 2, 1}).macro_f1, 1.0);
  // Class 1: TP 1, FP 1, FN 1.
  const auto r = macro_f1({1, 1, 0, 0, 0}, {1, 0, 1, 0, 0});
  EXPECT_DOUBLE_EQ(r.binary_f1, 0.5);
  ASSERT_EQ(r.classes, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(r.per_class_f1[1], 0.5);
  EXPECT_DOUBLE_EQ(r.per_class_f1[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.macro_f1, (0.5 + 2.0 / 3.0) / 2.0);
  EXPECT_THROW(macro_f1({0}, {0, 1}), DataError);
}

TEST(MacroF1, InvariantUnderRelabelling) {
  const std::vector<int> pred{0, 1, 2, 2, 1, 0, 0}, truth{0, 1, 1, 2, 2, 0, 1};
  std::vector<int> p2, t2;
  for (int v : pred) p2.push_back((v + 1) % 3 + 10);
  for (int v : truth) t2.push_back((v + 1) % 3 + 10);
  EXPECT_DOUBLE_EQ(macro_f1(pred, truth).macro_f1, macro_f1(p2, t2).macro_f1);
  EXPECT_EQ(macro_f1(pred, truth).binary_f1, -1.0);
}
