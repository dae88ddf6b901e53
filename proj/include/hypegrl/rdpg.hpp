#pragma once

// Euclidean baseline: (generalised) adjacency spectral embedding. Retained
// eigenpairs keep the sign of their eigenvalue, so scores are entries of
// X diag(signs) X^T rather than plain dot products.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <vector>

#include "hypegrl/graph.hpp"
#include "hypegrl/hgeom.hpp"

namespace hypegrl {

struct SpectralEmbedding {
  Matrix coords;           // N x n, column j = sqrt(|lambda_j|) v_j
  std::vector<int> signs;  // sign of each retained eigenvalue

  Eigen::Index size() const { return coords.rows(); }
  Eigen::Index dim() const { return coords.cols(); }

  double score(NodeId i, NodeId j) const {
    double s = 0.0;
    for (Eigen::Index k = 0; k < coords.cols(); ++k) s += signs[k] * coords(i, k) * coords(j, k);
    return s;
  }

  Matrix score_matrix() const {
    Vector sg(signs.size());
    for (std::size_t k = 0; k < signs.size(); ++k) sg(k) = signs[k];
    return coords * sg.asDiagonal() * coords.transpose();
  }
};

// Keeps the n eigenpairs of largest |lambda| (ties: larger lambda first).
// Eigenvectors are signed so their first non-negligible entry is positive.
inline SpectralEmbedding ase_embed(const Graph& g, Eigen::Index n) {
  const auto N = static_cast<Eigen::Index>(g.num_nodes());
  if (n < 1 || n > N) throw ConfigError("ase_embed: need 1 <= n <= N");
  Eigen::SelfAdjointEigenSolver<Matrix> es(adjacency_matrix(g));
  if (es.info() != Eigen::Success) throw DataError("ase_embed: eigendecomposition failed");
  const Vector& lambda = es.eigenvalues();
  std::vector<Eigen::Index> order(N);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double la = std::abs(lambda(a));
    const double lb = std::abs(lambda(b));
    if (la != lb) return la > lb;
    return lambda(a) > lambda(b);
  });

  SpectralEmbedding out{Matrix::Zero(N, n), std::vector<int>(n, 1)};
  const double scale = lambda.size() > 0 ? lambda.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double l = lambda(order[k]);
    if (std::abs(l) <= 1e-12 * std::max(scale, 1.0)) continue;  // null space contributes nothing
    Vector v = es.eigenvectors().col(order[k]);
    const double vmax = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < N; ++i) {
      if (std::abs(v(i)) > 1e-10 * vmax) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    out.coords.col(k) = std::sqrt(std::abs(l)) * v;
    out.signs[k] = l < 0.0 ? -1 : 1;
  }
  return out;
}

struct ScoredPair {
  Edge pair;
  double score = 0.0;
};

// Scores sorted descending; equal scores fall back to lexicographic pair order.
inline std::vector<ScoredPair> rdpg_scores(const SpectralEmbedding& e, const std::vector<Edge>& pairs) {
  std::vector<ScoredPair> out;
  out.reserve(pairs.size());
  for (const Edge& p : pairs) out.push_back({p, e.score(p.u, p.v)});
  std::sort(out.begin(), out.end(), [](const ScoredPair& a, const ScoredPair& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.pair < b.pair;
  });
  return out;
}

}  // namespace hypegrl
