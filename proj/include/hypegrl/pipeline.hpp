#pragma once

// One entry point for every embedding method, so evaluation code does not
// care which method produced the coordinates.

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "hypegrl/config.hpp"
#include "hypegrl/gradembed.hpp"
#include "hypegrl/hydra.hpp"
#include "hypegrl/log.hpp"
#include "hypegrl/rdpg.hpp"

namespace hypegrl {

enum class Method { hydra, hydra_plus, poincare, lorentz, pmaps, rdpg };

inline constexpr std::string_view kMethodList = "hydra, hydra_plus, poincare, lorentz, pmaps, rdpg";

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::hydra: return "hydra";
    case Method::hydra_plus: return "hydra_plus";
    case Method::poincare: return "poincare";
    case Method::lorentz: return "lorentz";
    case Method::pmaps: return "pmaps";
    case Method::rdpg: return "rdpg";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::hydra, Method::hydra_plus, Method::poincare, Method::lorentz, Method::pmaps, Method::rdpg})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

struct EmbedResult {
  bool euclidean = false;  // true for rdpg
  Embedding hyperbolic;
  SpectralEmbedding spectral;
  double seconds = 0.0;
};

namespace detail {

// Hydra needs a finite distance matrix, so it runs on the largest component;
// every other node is left at the base point.
inline Embedding hydra_on_component(const Graph& g, Eigen::Index n, bool refine, const HydraPlusConfig& hp) {
  const auto N = static_cast<Eigen::Index>(g.num_nodes());
  Embedding out = Embedding::at_base_point(Model::lorentz, n, N);
  const Component lcc = largest_connected_component(g);
  const auto M = static_cast<Eigen::Index>(lcc.new_to_old.size());
  if (M < N) {
    log::warn("graph is disconnected; embedding the largest component (", M, " of ", N,
              " nodes), the rest are placed at the base point");
  }
  if (M < n + 1) throw DataError("hydra: largest component has fewer than n + 1 nodes");
  const Matrix d = shortest_path_matrix(lcc.graph);
  Embedding e = hydra_embed(d, n);
  if (refine) e = hydra_plus(d, n, e, hp).embedding;
  for (Eigen::Index i = 0; i < M; ++i) out.coords.row(lcc.new_to_old[i]) = e.coords.row(i);
  return out;
}

inline void park_isolated(const Graph& g, Embedding& e) {
  std::size_t isolated = 0;
  const Embedding base = Embedding::at_base_point(e.model, e.dim, 1);
  for (NodeId i = 0; i < static_cast<NodeId>(g.num_nodes()); ++i) {
    if (g.degree(i) != 0) continue;
    e.coords.row(i) = base.coords.row(0);
    ++isolated;
  }
  if (isolated > 0) log::warn(isolated, " isolated node(s) placed at the base point");
}

}  // namespace detail

// `seed` overrides the seeds of the configured trainers.
inline EmbedResult embed_graph(const Graph& g, Method method, const RunConfig& cfg, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index n = cfg.dim;
  EmbedResult out;
  switch (method) {
    case Method::hydra:
    case Method::hydra_plus:
      out.hyperbolic = detail::hydra_on_component(g, n, method == Method::hydra_plus, cfg.hydra_plus);
      break;
    case Method::poincare: {
      TrainConfig tc = cfg.poincare;
      tc.seed = seed;
      out.hyperbolic = train_poincare_embeddings(g, n, cfg.fermi_dirac, tc).embedding;
      detail::park_isolated(g, out.hyperbolic);
      break;
    }
    case Method::lorentz: {
      TrainConfig tc = cfg.lorentz;
      tc.seed = seed;
      out.hyperbolic = train_lorentz_embeddings(g, n, tc).embedding;
      detail::park_isolated(g, out.hyperbolic);
      break;
    }
    case Method::pmaps: {
      TrainConfig tc = cfg.pmaps;
      tc.seed = seed;
      out.hyperbolic = train_poincare_maps(g, n, cfg.pmaps_params, tc).embedding;
      detail::park_isolated(g, out.hyperbolic);
      break;
    }
    case Method::rdpg:
      out.euclidean = true;
      out.spectral = ase_embed(g, n);
      break;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace hypegrl
