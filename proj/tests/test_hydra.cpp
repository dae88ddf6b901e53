#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hypegrl/hydra.hpp"
#include "hypegrl/synthgen.hpp"
#include "test_support.hpp"

using namespace hypegrl;
using testing_support::numeric_gradient;
using testing_support::random_point;
using testing_support::relative_error;
using testing_support::stress_oracle;

namespace {

Embedding random_lorentz(Eigen::Index n_points, Eigen::Index n, double r_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Embedding e{Model::lorentz, n, Matrix(n_points, n + 1)};
  for (Eigen::Index i = 0; i < n_points; ++i) e.coords.row(i) = random_point(n, r_max, rng).coords.transpose();
  return e;
}

}  // namespace

TEST(HydraEmbed, RecoversPointsSampledOnThePlane) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Embedding truth = random_lorentz(20, 2, 3.0, seed);
    const Matrix d = embedding_distance_matrix(truth);
    const Embedding e = hydra_embed(d, 2);
    EXPECT_FALSE(first_invalid_row(e).has_value());
    EXPECT_LT(stress(e, d), 1e-6);
  }
}

TEST(HydraEmbed, TwoPointsAreRealisedExactly) {
  for (double r : {0.3, 1.0, 4.0}) {
    Matrix d(2, 2);
    d << 0.0, r, r, 0.0;
    const Embedding e = hydra_embed(d, 1);
    EXPECT_NEAR(row_distance(e, 0, 1), r, 1e-9);
  }
}

TEST(HydraEmbed, ZeroMatrixPutsEveryRowAtTheBasePoint) {
  const Embedding e = hydra_embed(Matrix::Zero(5, 5), 2);
  EXPECT_EQ(e.coords, Embedding::at_base_point(Model::lorentz, 2, 5).coords);
}

TEST(HydraEmbed, MissingNegativeEigenvaluesArePaddedWithZeros) {
  // Points on a geodesic line span a single negative eigenvalue.
  Embedding line{Model::lorentz, 1, Matrix(6, 2)};
  for (Eigen::Index i = 0; i < 6; ++i) {
    const double r = 0.4 * static_cast<double>(i) - 1.0;
    line.coords.row(i) << std::sinh(r), std::cosh(r);
  }
  const Matrix d = embedding_distance_matrix(line);
  const Embedding e = hydra_embed(d, 3);
  EXPECT_FALSE(first_invalid_row(e).has_value());
  EXPECT_LE(e.coords.col(1).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE(e.coords.col(2).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(stress(e, d), 1e-6);
}

TEST(HydraEmbed, Deterministic) {
  const Matrix d = shortest_path_matrix(balanced_tree(2, 3).graph);
  EXPECT_EQ(hydra_embed(d, 2).coords, hydra_embed(d, 2).coords);
}

TEST(HydraEmbed, InvalidInput) {
  Matrix asym = Matrix::Zero(3, 3);
  asym(0, 1) = 1.0;
  EXPECT_THROW(hydra_embed(asym, 2), DataError);
  Matrix diag = Matrix::Zero(3, 3);
  diag(1, 1) = 1.0;
  EXPECT_THROW(hydra_embed(diag, 2), DataError);
  EXPECT_THROW(hydra_embed(Matrix::Zero(2, 2), 2), ConfigError);
}

TEST(Stress, Examples) {
  const Embedding truth = random_lorentz(8, 2, 2.0, 4);
  const Matrix d = embedding_distance_matrix(truth);
  EXPECT_LT(stress(truth, d), 1e-9);
  const Embedding base = Embedding::at_base_point(Model::lorentz, 2, 8);
  EXPECT_NEAR(stress(base, d), d.array().square().sum() / 2.0, 1e-9);
}

TEST(Stress, MatchesBruteForceLoop) {
  const Embedding e = random_lorentz(5, 2, 2.0, 5);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  Matrix d = Matrix::Zero(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) d(i, j) = d(j, i) = u(rng);
  EXPECT_NEAR(stress(e, d), stress_oracle(e.coords, d), 1e-10);
}

TEST(Stress, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    const Embedding e{Model::lorentz, 2, testing_support::separated_sheet_rows(6, 2, 2.5, 0.1, rng)};
    std::uniform_real_distribution<double> u(0.5, 4.0);
    Matrix d = Matrix::Zero(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) d(i, j) = d(j, i) = u(rng);
    const Matrix analytic = stress_gradient(e, d);
    const Matrix numeric = numeric_gradient([&](const Matrix& x) { return stress_oracle(x, d); }, e.coords);
    EXPECT_LT(relative_error(analytic, numeric), 1e-4);
  }
}

TEST(HydraPlus, StressTraceIsNonIncreasingAndRowsStayOnTheSheet) {
  const Matrix d = shortest_path_matrix(balanced_tree(2, 4).graph);
  const Embedding init = hydra_embed(d, 2);
  const auto r = hydra_plus(d, 2, init);
  ASSERT_GE(r.stress_trace.size(), 2u);
  for (std::size_t k = 1; k < r.stress_trace.size(); ++k) EXPECT_LE(r.stress_trace[k], r.stress_trace[k - 1]);
  EXPECT_NEAR(r.stress_trace.front(), stress(init, d), 1e-9 * r.stress_trace.front());
  EXPECT_NEAR(r.stress_trace.back(), stress(r.embedding, d), 1e-9 * r.stress_trace.front());
  for (Eigen::Index i = 0; i < r.embedding.size(); ++i) {
    const Vector u = r.embedding.coords.row(i).transpose();
    EXPECT_NEAR(minkowski_inner(u, u), -1.0, 1e-8 * std::max(1.0, u(2) * u(2)));
  }
}

TEST(HydraPlus, ImprovesOnHydraForTheTree) {
  const Matrix d = shortest_path_matrix(balanced_tree(2, 4).graph);
  const Embedding init = hydra_embed(d, 2);
  EXPECT_LE(stress(hydra_plus(d, 2, init).embedding, d), stress(init, d));
}

TEST(HydraPlus, KeepsTheCentroidOfTheStart) {
  const auto t = balanced_tree(2, 4);
  const Matrix d = shortest_path_matrix(t.graph);
  const Embedding init = hydra_embed(d, 2);
  const auto r = hydra_plus(d, 2, init);
  EXPECT_LT((lorentz_centroid(r.embedding.coords).coords - lorentz_centroid(init.coords).coords).norm(), 1e-9);
  // With the frame held, the root stays nearer the base point than its children.
  const Embedding nat = convert(r.embedding, Model::native);
  EXPECT_LT(nat.coords(0, 0), nat.coords(1, 0));
  EXPECT_LT(nat.coords(0, 0), nat.coords(2, 0));
}

TEST(HydraPlus, OptimumStaysPut) {
  const Embedding truth = random_lorentz(10, 2, 2.0, 21);
  const Matrix d = embedding_distance_matrix(truth);
  const Embedding init = hydra_embed(d, 2);
  ASSERT_LT(stress(init, d), 1e-10);
  const auto r = hydra_plus(d, 2, init);
  EXPECT_LE(r.stress_trace.back(), r.stress_trace.front());
  EXPECT_LT((r.embedding.coords - init.coords).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(HydraPlus, StopsAtMaxIters) {
  const Matrix d = shortest_path_matrix(balanced_tree(2, 4).graph);
  HydraPlusConfig cfg;
  cfg.max_iters = 3;
  EXPECT_LE(hydra_plus(d, 2, hydra_embed(d, 2), cfg).stress_trace.size(), 4u);
}

TEST(HydraPlus, ConfigAndShapeChecks) {
  const Matrix d = shortest_path_matrix(balanced_tree(2, 2).graph);
  const Embedding init = hydra_embed(d, 2);
  HydraPlusConfig bad;
  bad.learning_rate = 0.0;
  EXPECT_THROW(hydra_plus(d, 2, init, bad), ConfigError);
  EXPECT_THROW(hydra_plus(d, 3, init), DataError);
  EXPECT_THROW(hydra_plus(Matrix::Zero(3, 3), 2, init), DataError);
}

TEST(HydraPlus, ThreadCountDoesNotChangeTheResult) {
  const Matrix d = shortest_path_matrix(balanced_tree(2, 5).graph);
  const Embedding init = hydra_embed(d, 2);
  HydraPlusConfig cfg;
  cfg.max_iters = 20;
  set_num_threads(1);
  const auto a = hydra_plus(d, 2, init, cfg);
  set_num_threads(3);
  const auto b = hydra_plus(d, 2, init, cfg);
  set_num_threads(1);
  EXPECT_EQ(a.embedding.coords, b.embedding.coords);
  EXPECT_EQ(a.stress_trace, b.stress_trace);
}
