#pragma once

// Riemannian SGD embedders sharing one training loop:
//   - Poincare embeddings: Fermi-Dirac edge probability, cross-entropy with
//     negative sampling, updates in the ball.
//   - Lorentz embeddings: softmax ranking loss over a positive and sampled
//     negatives, updates on the hyperboloid.
//   - Poincare maps: KL divergence between RFA rows and distance softmaxes,
//     full-batch updates in the ball.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hypegrl/embedding.hpp"
#include "hypegrl/graph.hpp"
#include "hypegrl/log.hpp"
#include "hypegrl/parallel.hpp"

namespace hypegrl {

enum class NegativeSampling { uniform, degree };

struct TrainConfig {
  int epochs = 300;
  double learning_rate = 0.1;
  int burn_in_epochs = 10;
  double burn_in_factor = 0.1;
  int n_negatives = 10;
  int batch_size = 32;
  NegativeSampling sampling = NegativeSampling::uniform;
  std::uint64_t seed = 0;

  static TrainConfig poincare_defaults() { return {}; }
  static TrainConfig lorentz_defaults() {
    TrainConfig c;
    c.learning_rate = 0.01;
    return c;
  }
  // batch_size is ignored: Poincare maps always trains full-batch.
  static TrainConfig poincare_maps_defaults() { return {}; }

  void validate() const {
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be > 0");
    if (burn_in_epochs < 0) throw ConfigError("train: burn_in_epochs must be >= 0");
    if (!(burn_in_factor > 0.0 && burn_in_factor <= 1.0)) throw ConfigError("train: burn_in_factor must lie in (0, 1]");
    if (n_negatives < 0) throw ConfigError("train: n_negatives must be >= 0");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  }

  double rate(int epoch) const { return epoch < burn_in_epochs ? learning_rate * burn_in_factor : learning_rate; }
};

struct FermiDiracParams {
  double radius = 2.0;
  double temperature = 1.0;

  void validate() const {
    if (!(radius > 0.0)) throw ConfigError("fermi_dirac: radius must be > 0");
    if (!(temperature > 0.0)) throw ConfigError("fermi_dirac: temperature must be > 0");
  }
};

struct PoincareMapsParams {
  double sigma = 1.0;
  double gamma = 0.0;  // reserved

  void validate() const {
    if (!(sigma > 0.0)) throw ConfigError("poincare_maps: sigma must be > 0");
    if (!(gamma >= 0.0)) throw ConfigError("poincare_maps: gamma must be >= 0");
  }
};

struct TrainResult {
  Embedding embedding;
  std::vector<double> epoch_loss;  // mean loss per positive pair (total loss for Poincare maps)
};

namespace detail {

inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + e^x)
inline double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

template <class Rng>
Vector uniform_in_ball(Eigen::Index n, double radius, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector v(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  } while (v.norm() == 0.0);
  return v * (radius * std::pow(uniform(rng), 1.0 / static_cast<double>(n)) / v.norm());
}

}  // namespace detail

// 1 / (1 + exp((d - r) / T))
inline double fermi_dirac_prob(double d, const FermiDiracParams& p) {
  return detail::logistic((p.radius - d) / p.temperature);
}

// Draws non-neighbours of a node. Uniform mode maps a uniform rank among the
// allowed nodes to a node id by binary search over the sorted exclusion list.
class NegativeSampler {
 public:
  NegativeSampler(const Graph& g, NegativeSampling mode) : n_(g.num_nodes()), mode_(mode) {
    shifted_.resize(n_);
    for (NodeId i = 0; i < static_cast<NodeId>(n_); ++i) {
      std::vector<NodeId> excluded = g.neighbors(i);
      excluded.insert(std::lower_bound(excluded.begin(), excluded.end(), i), i);
      auto& s = shifted_[i];
      s.resize(excluded.size());
      for (std::size_t k = 0; k < excluded.size(); ++k) s[k] = excluded[k] - static_cast<NodeId>(k);
      if (excluded.size() == n_) ++saturated_;
    }
    if (mode_ == NegativeSampling::degree) {
      cumulative_.resize(n_);
      double acc = 0.0;
      for (NodeId i = 0; i < static_cast<NodeId>(n_); ++i) cumulative_[i] = acc += static_cast<double>(g.degree(i));
    }
    graph_ = &g;
  }

  // Nodes adjacent to every other node.
  std::size_t saturated_nodes() const { return saturated_; }

  template <class Rng>
  NodeId draw(NodeId i, Rng& rng) const {
    const auto& s = shifted_[i];
    const std::size_t free = n_ - s.size();
    if (free == 0) {
      // Full-degree node: fall back to any other node.
      std::uniform_int_distribution<std::size_t> pick(0, n_ - 2);
      const auto r = static_cast<NodeId>(pick(rng));
      return r >= i ? r + 1 : r;
    }
    if (mode_ == NegativeSampling::degree && cumulative_.back() > 0.0) {
      std::uniform_real_distribution<double> u(0.0, cumulative_.back());
      for (int attempt = 0; attempt < 64; ++attempt) {
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u(rng));
        const auto k = static_cast<NodeId>(std::min<std::ptrdiff_t>(it - cumulative_.begin(), n_ - 1));
        if (k != i && !graph_->has_edge(i, k)) return k;
      }
    }
    std::uniform_int_distribution<std::size_t> pick(0, free - 1);
    const auto r = static_cast<NodeId>(pick(rng));
    const auto c = static_cast<NodeId>(std::upper_bound(s.begin(), s.end(), r) - s.begin());
    return r + c;
  }

 private:
  std::size_t n_;
  NegativeSampling mode_;
  std::vector<std::vector<NodeId>> shifted_;
  std::vector<double> cumulative_;
  std::size_t saturated_ = 0;
  const Graph* graph_ = nullptr;
};

// ---------------------------------------------------------------------------
// Losses. Each returns the scalar loss and, when `grad` is non-null, adds the
// Euclidean gradient with respect to the raw coordinate rows into it.
// ---------------------------------------------------------------------------

// -log p(d_ij) - sum_k log(1 - p(d_ik)) with p the Fermi-Dirac probability.
inline double poincare_embedding_loss(const Matrix& y, NodeId i, NodeId j, std::span<const NodeId> negatives,
                                      const FermiDiracParams& fd, Matrix* grad) {
  const double inv_t = 1.0 / fd.temperature;
  const double dij = poincare_distance(y.row(i), y.row(j));
  double loss = detail::softplus((dij - fd.radius) * inv_t);
  if (grad != nullptr) {
    const double c = detail::logistic((dij - fd.radius) * inv_t) * inv_t;
    grad->row(i) += c * poincare_distance_grad(y.row(i), y.row(j)).transpose();
    grad->row(j) += c * poincare_distance_grad(y.row(j), y.row(i)).transpose();
  }
  for (NodeId k : negatives) {
    const double dik = poincare_distance(y.row(i), y.row(k));
    loss += detail::softplus((fd.radius - dik) * inv_t);
    if (grad != nullptr) {
      const double c = -detail::logistic((fd.radius - dik) * inv_t) * inv_t;
      grad->row(i) += c * poincare_distance_grad(y.row(i), y.row(k)).transpose();
      grad->row(k) += c * poincare_distance_grad(y.row(k), y.row(i)).transpose();
    }
  }
  return loss;
}

// -log( e^{-d_ij} / (e^{-d_ij} + sum_k e^{-d_ik}) ); the positive pair is part
// of the denominator.
inline double lorentz_ranking_loss(const Matrix& u, NodeId i, NodeId j, std::span<const NodeId> negatives,
                                   Matrix* grad) {
  std::vector<NodeId> others{j};
  others.insert(others.end(), negatives.begin(), negatives.end());
  std::vector<double> d(others.size());
  for (std::size_t k = 0; k < others.size(); ++k) d[k] = lorentz_distance(u.row(i), u.row(others[k]));
  const double dmin = *std::min_element(d.begin(), d.end());
  double z = 0.0;
  for (double dk : d) z += std::exp(dmin - dk);
  const double loss = d[0] - dmin + std::log(z);
  if (grad != nullptr) {
    for (std::size_t k = 0; k < others.size(); ++k) {
      const double soft = std::exp(dmin - d[k]) / z;
      const double c = (k == 0 ? 1.0 : 0.0) - soft;
      if (c == 0.0) continue;
      grad->row(i) += c * lorentz_distance_grad(u.row(i), u.row(others[k])).transpose();
      grad->row(others[k]) += c * lorentz_distance_grad(u.row(others[k]), u.row(i)).transpose();
    }
  }
  return loss;
}

// RFA rows with the diagonal removed and renormalised to sum 1.
inline Matrix poincare_maps_targets(const Graph& g) {
  Matrix p = rfa_matrix(g);
  const Eigen::Index n = p.rows();
  if (n == 1) return Matrix::Zero(1, 1);
  p.diagonal().setZero();
  for (Eigen::Index i = 0; i < n; ++i) p.row(i) /= p.row(i).sum();
  return p;
}

// sum_i KL(p_i || q_i), q_ij = exp(-d_ij/sigma) / sum_{k != i} exp(-d_ik/sigma).
inline double poincare_maps_loss(const Matrix& y, const Matrix& p, double sigma, Matrix* grad) {
  const Eigen::Index n = y.rows();
  if (p.rows() != n || p.cols() != n) throw DataError("poincare_maps_loss: target size mismatch");
  if (n < 2) return 0.0;
  Matrix d = Matrix::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = poincare_distance(y.row(i), y.row(j));
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d(j, i) = d(i, j);

  Matrix q = Matrix::Zero(n, n);
  std::vector<double> row_loss(n, 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) dmin = std::min(dmin, d(i, j));
    double z = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) z += std::exp((dmin - d(i, j)) / sigma);
    const double log_z = std::log(z);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double log_q = (dmin - d(i, j)) / sigma - log_z;
      q(i, j) = std::exp(log_q);
      if (p(i, j) > 0.0) acc += p(i, j) * (std::log(p(i, j)) - log_q);
    }
    row_loss[i] = acc;
  });
  double loss = 0.0;
  for (double r : row_loss) loss += r;

  if (grad != nullptr) {
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t aa) {
      const auto a = static_cast<Eigen::Index>(aa);
      for (Eigen::Index b = 0; b < n; ++b) {
        if (b == a) continue;
        const double c = ((p(a, b) - q(a, b)) + (p(b, a) - q(b, a))) / sigma;
        if (c == 0.0) continue;
        grad->row(a) += c * poincare_distance_grad(y.row(a), y.row(b)).transpose();
      }
    });
  }
  return std::max(loss, 0.0);
}

namespace detail {

// Shared mini-batch loop over both orientations of every edge. `loss_fn`
// evaluates one positive pair with its negatives and accumulates gradients;
// `step_fn` applies the manifold update to one row.
template <class LossFn, class StepFn>
std::vector<double> run_pair_sgd(const Graph& g, const TrainConfig& cfg, Matrix& coords, std::mt19937_64& rng,
                                 LossFn&& loss_fn, StepFn&& step_fn) {
  const NegativeSampler sampler(g, cfg.sampling);
  if (sampler.saturated_nodes() > 0 && cfg.n_negatives > 0) {
    log::warn(sampler.saturated_nodes(), " node(s) are adjacent to every other node; "
              "their negatives are drawn from all other nodes");
  }
  std::vector<std::pair<NodeId, NodeId>> positives;
  for (const Edge& e : g.edges()) {
    positives.emplace_back(e.u, e.v);
    positives.emplace_back(e.v, e.u);
  }
  std::vector<double> history;
  if (positives.empty()) return history;

  Matrix grad = Matrix::Zero(coords.rows(), coords.cols());
  std::vector<char> touched(coords.rows(), 0);
  std::vector<NodeId> touched_list;
  std::vector<NodeId> negatives(cfg.n_negatives);
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(positives.begin(), positives.end(), rng);
    const double lr = cfg.rate(epoch);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < positives.size(); start += batch) {
      const std::size_t stop = std::min(positives.size(), start + batch);
      for (std::size_t p = start; p < stop; ++p) {
        const auto [i, j] = positives[p];
        for (auto& k : negatives) k = sampler.draw(i, rng);
        epoch_loss += loss_fn(coords, i, j, std::span<const NodeId>(negatives), &grad);
        auto mark = [&](NodeId x) {
          if (!touched[x]) touched[x] = 1, touched_list.push_back(x);
        };
        mark(i);
        mark(j);
        for (NodeId k : negatives) mark(k);
      }
      for (NodeId x : touched_list) {
        step_fn(coords, x, grad.row(x), lr);
        grad.row(x).setZero();
        touched[x] = 0;
      }
      touched_list.clear();
    }
    history.push_back(epoch_loss / static_cast<double>(positives.size()));
  }
  return history;
}

}  // namespace detail

inline TrainResult train_poincare_embeddings(const Graph& g, Eigen::Index n, const FermiDiracParams& fd,
                                             const TrainConfig& cfg) {
  cfg.validate();
  fd.validate();
  if (n < 2) throw ConfigError("poincare embeddings: dimension must be >= 2");
  const auto N = static_cast<Eigen::Index>(g.num_nodes());
  std::mt19937_64 rng(cfg.seed);
  TrainResult out;
  out.embedding = Embedding{Model::poincare, n, Matrix(N, n)};
  Matrix& y = out.embedding.coords;
  for (Eigen::Index i = 0; i < N; ++i) y.row(i) = detail::uniform_in_ball(n, 1e-3, rng).transpose();

  out.epoch_loss = detail::run_pair_sgd(
      g, cfg, y, rng,
      [&](const Matrix& c, NodeId i, NodeId j, std::span<const NodeId> neg, Matrix* grad) {
        return poincare_embedding_loss(c, i, j, neg, fd, grad);
      },
      [](Matrix& c, NodeId x, const auto& g_row, double lr) {
        const PoincarePoint here(c.row(x).transpose());
        const Vector step = poincare_riemannian_rescale(here, g_row.transpose());
        c.row(x) = ball_retraction(here.coords - lr * step).coords.transpose();
      });
  return out;
}

inline TrainResult train_lorentz_embeddings(const Graph& g, Eigen::Index n, const TrainConfig& cfg) {
  cfg.validate();
  if (n < 1) throw ConfigError("lorentz embeddings: dimension must be >= 1");
  const auto N = static_cast<Eigen::Index>(g.num_nodes());
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1e-3);
  TrainResult out;
  out.embedding = Embedding{Model::lorentz, n, Matrix(N, n + 1)};
  Matrix& u = out.embedding.coords;
  for (Eigen::Index i = 0; i < N; ++i) {
    Vector x(n);
    for (Eigen::Index k = 0; k < n; ++k) x(k) = normal(rng);
    u.row(i) = LorentzPoint::from_spatial(x).coords.transpose();
  }

  out.epoch_loss = detail::run_pair_sgd(
      g, cfg, u, rng,
      [](const Matrix& c, NodeId i, NodeId j, std::span<const NodeId> neg, Matrix* grad) {
        return lorentz_ranking_loss(c, i, j, neg, grad);
      },
      [](Matrix& c, NodeId x, const auto& g_row, double lr) {
        const Vector riem = tangent_project_raw(c.row(x), g_row);
        c.row(x) = exp_map_raw(c.row(x), -lr * riem).transpose();
      });
  return out;
}

inline TrainResult train_poincare_maps(const Graph& g, Eigen::Index n, const PoincareMapsParams& pm,
                                       const TrainConfig& cfg) {
  cfg.validate();
  pm.validate();
  if (n < 2) throw ConfigError("poincare maps: dimension must be >= 2");
  const auto N = static_cast<Eigen::Index>(g.num_nodes());
  std::mt19937_64 rng(cfg.seed);
  TrainResult out;
  out.embedding = Embedding{Model::poincare, n, Matrix(N, n)};
  Matrix& y = out.embedding.coords;
  for (Eigen::Index i = 0; i < N; ++i) y.row(i) = detail::uniform_in_ball(n, 1e-3, rng).transpose();
  const Matrix p = poincare_maps_targets(g);

  Matrix grad(N, n);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    grad.setZero();
    out.epoch_loss.push_back(poincare_maps_loss(y, p, pm.sigma, &grad));
    const double lr = cfg.rate(epoch);
    for (Eigen::Index i = 0; i < N; ++i) {
      const PoincarePoint here(y.row(i).transpose());
      const Vector step = poincare_riemannian_rescale(here, grad.row(i).transpose());
      y.row(i) = ball_retraction(here.coords - lr * step).coords.transpose();
    }
  }
  return out;
}

}  // namespace hypegrl
