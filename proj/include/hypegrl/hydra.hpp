#pragma once

// Hydra: spectral embedding of a dissimilarity matrix into the hyperboloid,
// and Hydra+: Riemannian gradient refinement of the resulting stress.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <vector>

#include "hypegrl/embedding.hpp"
#include "hypegrl/log.hpp"
#include "hypegrl/parallel.hpp"

namespace hypegrl {

struct HydraPlusConfig {
  int max_iters = 1000;
  double learning_rate = 0.05;
  double rel_tol = 1e-7;
  std::uint64_t seed = 0;  // unused; full-batch descent is deterministic

  void validate() const {
    if (max_iters < 1) throw ConfigError("hydra_plus: max_iters must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("hydra_plus: learning_rate must be > 0");
    if (!(rel_tol > 0.0)) throw ConfigError("hydra_plus: rel_tol must be > 0");
  }
};

namespace detail {

inline void check_dissimilarities(const Matrix& d) {
  if (d.rows() != d.cols()) throw DataError("distance matrix must be square");
  if (!d.allFinite()) throw DataError("distance matrix must be finite");
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (d(i, i) != 0.0) throw DataError("distance matrix must have a zero diagonal");
    for (Eigen::Index j = i + 1; j < d.cols(); ++j)
      if (std::abs(d(i, j) - d(j, i)) > 1e-9 * std::max(1.0, std::abs(d(i, j))))
        throw DataError("distance matrix must be symmetric");
  }
}

// First component of non-negligible magnitude made positive.
inline void fix_sign(Eigen::Ref<Vector> v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-10 * scale) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

// All pairwise Lorentz distances between the rows of u.
inline Matrix lorentz_pair_distances(const Matrix& u) {
  const Eigen::Index n = u.rows();
  Matrix d = Matrix::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = lorentz_distance(u.row(i), u.row(j));
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d(j, i) = d(i, j);
  return d;
}

inline double stress_from(const Matrix& embedded, const Matrix& target) {
  const Eigen::Index n = target.rows();
  std::vector<double> rows(n, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = embedded(i, j) - target(i, j);
      acc += r * r;
    }
    rows[i] = acc;
  }
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

// Ambient gradient of the stress with respect to every row, given the
// current pairwise distances.
inline Matrix stress_gradient_from(const Matrix& u, const Matrix& embedded, const Matrix& target) {
  const Eigen::Index n = u.rows();
  const Eigen::Index w = u.cols();
  Matrix g = Matrix::Zero(n, w);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dist = embedded(i, j);
      const double s = std::sinh(dist);
      if (s < 1e-12) continue;
      // d/du_i arcosh(-<u_i,u_j>) = -J u_j / sinh(d)
      const double c = -2.0 * (dist - target(i, j)) / s;
      for (Eigen::Index k = 0; k + 1 < w; ++k) g(i, k) += c * u(j, k);
      g(i, w - 1) -= c * u(j, w - 1);
    }
  });
  return g;
}

}  // namespace detail

// cosh(D) is factored as T T^T - X X^T: the top eigenpair gives the time
// coordinates, the n most negative ones the spatial block. Each row is then
// placed on the sheet by rescaling its spatial part to |x|^2 = t^2 - 1.
inline Embedding hydra_embed(const Matrix& d, Eigen::Index n) {
  detail::check_dissimilarities(d);
  const Eigen::Index N = d.rows();
  if (n < 1) throw ConfigError("hydra: embedding dimension must be >= 1");
  if (N < n + 1) throw ConfigError("hydra: need at least n + 1 points");

  const Matrix a = d.array().cosh().matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw DataError("hydra: eigendecomposition failed");
  const Vector& lambda = es.eigenvalues();  // ascending
  const Matrix& vecs = es.eigenvectors();
  const double lambda_max = lambda(N - 1);
  const double noise = 1e-12 * lambda.cwiseAbs().maxCoeff();

  Vector top = vecs.col(N - 1);
  if (top.sum() < 0.0) top = -top;
  const Vector t = std::sqrt(std::max(lambda_max, 0.0)) * top;

  Matrix x = Matrix::Zero(N, n);
  Eigen::Index used = 0;
  for (Eigen::Index j = 0; j < n && j < N - 1; ++j) {
    if (!(lambda(j) < -noise)) break;
    Vector v = vecs.col(j);
    detail::fix_sign(v);
    x.col(j) = std::sqrt(-lambda(j)) * v;
    ++used;
  }
  if (used < n) {
    log::warn("hydra: only ", used, " negative eigenvalues for n = ", n, "; padding with zero columns");
  }

  Embedding out = Embedding::at_base_point(Model::lorentz, n, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double ti = t(i);
    const double norm = x.row(i).norm();
    if (!(ti > 1.0) || norm == 0.0) continue;  // base point
    out.coords.row(i).head(n) = x.row(i) * (std::sqrt(ti * ti - 1.0) / norm);
    out.coords(i, n) = ti;
  }
  return out;
}

// Sum over i < j of (d_H(u_i, u_j) - D_ij)^2.
inline double stress(const Embedding& e, const Matrix& d) {
  if (e.size() != d.rows() || d.rows() != d.cols()) throw DataError("stress: size mismatch");
  const Embedding l = convert(e, Model::lorentz);
  return detail::stress_from(detail::lorentz_pair_distances(l.coords), d);
}

// Ambient (Euclidean) gradient of stress with respect to the Lorentz rows.
inline Matrix stress_gradient(const Embedding& e, const Matrix& d) {
  const Embedding l = convert(e, Model::lorentz);
  return detail::stress_gradient_from(l.coords, detail::lorentz_pair_distances(l.coords), d);
}

struct HydraPlusResult {
  Embedding embedding;
  std::vector<double> stress_trace;  // initial stress, then one entry per accepted step
};

// Full-batch Riemannian descent on the stress with step halving: every
// iteration starts at the configured rate; a step that would raise the stress
// is halved and retried, at most 30 times, after which the descent stops.
inline HydraPlusResult hydra_plus(const Matrix& d, Eigen::Index n, const Embedding& init,
                                  const HydraPlusConfig& cfg = {}) {
  cfg.validate();
  detail::check_dissimilarities(d);
  if (init.size() != d.rows()) throw DataError("hydra_plus: init size does not match D");
  if (init.dim != n) throw DataError("hydra_plus: init dimension does not match n");
  Embedding cur = convert(init, Model::lorentz);
  const Matrix init_lorentz = cur.coords;
  const Eigen::Index N = cur.size();

  Matrix dist = detail::lorentz_pair_distances(cur.coords);
  double cur_stress = detail::stress_from(dist, d);
  HydraPlusResult out;
  out.stress_trace.push_back(cur_stress);

  for (int it = 0; it < cfg.max_iters && cur_stress > 0.0; ++it) {
    const Matrix g = detail::stress_gradient_from(cur.coords, dist, d);
    Matrix riem(N, cur.coords.cols());
    for (Eigen::Index i = 0; i < N; ++i)
      riem.row(i) = tangent_project_raw(cur.coords.row(i), g.row(i)).transpose();

    bool accepted = false;
    Matrix cand(N, cur.coords.cols());
    Matrix cand_dist;
    double cand_stress = 0.0;
    double trial = cfg.learning_rate;
    for (int halvings = 0; halvings <= 30; ++halvings, trial *= 0.5) {
      for (Eigen::Index i = 0; i < N; ++i)
        cand.row(i) = exp_map_raw(cur.coords.row(i), -trial * riem.row(i)).transpose();
      if (!cand.allFinite()) continue;
      cand_dist = detail::lorentz_pair_distances(cand);
      cand_stress = detail::stress_from(cand_dist, d);
      if (cand_stress <= cur_stress) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double rel = (cur_stress - cand_stress) / cur_stress;
    cur.coords = cand;
    dist = std::move(cand_dist);
    cur_stress = cand_stress;
    out.stress_trace.push_back(cur_stress);
    if (rel < cfg.rel_tol) break;
  }
  // Stress is blind to isometries, so the descent is free to drift the whole
  // configuration. Translate it back so its centroid matches the start.
  if (out.stress_trace.size() > 1) {
    const LorentzPoint from = lorentz_centroid(cur.coords);
    const LorentzPoint to = lorentz_centroid(init_lorentz);
    for (Eigen::Index i = 0; i < N; ++i)
      cur.coords.row(i) = translate_lorentz(from, to, cur.coords.row(i).transpose()).transpose();
  }
  out.embedding = std::move(cur);
  return out;
}

}  // namespace hypegrl
