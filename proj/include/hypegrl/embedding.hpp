#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "hypegrl/hgeom.hpp"
#include "hypegrl/parallel.hpp"

namespace hypegrl {

enum class Model { lorentz, poincare, native };

inline std::string_view to_string(Model m) {
  switch (m) {
    case Model::lorentz: return "lorentz";
    case Model::poincare: return "poincare";
    case Model::native: return "native";
  }
  return "?";
}

inline std::optional<Model> parse_model(std::string_view s) {
  if (s == "lorentz") return Model::lorentz;
  if (s == "poincare") return Model::poincare;
  if (s == "native") return Model::native;
  return std::nullopt;
}

// Row width of a coordinate table for a point of H^dim.
inline Eigen::Index row_width(Model m, Eigen::Index dim) {
  return m == Model::lorentz ? dim + 1 : dim;
}

// One row per node. Native rows are (r, theta_1, ..., theta_{n-1}).
struct Embedding {
  Model model = Model::lorentz;
  Eigen::Index dim = 2;
  Matrix coords;

  Eigen::Index size() const { return coords.rows(); }

  static Embedding at_base_point(Model model, Eigen::Index dim, Eigen::Index n_nodes) {
    Embedding e{model, dim, Matrix::Zero(n_nodes, row_width(model, dim))};
    if (model == Model::lorentz) e.coords.col(dim).setOnes();
    return e;
  }

  LorentzPoint lorentz_row(Eigen::Index i) const;
};

inline NativePoint native_row(const Matrix& coords, Eigen::Index i) {
  NativePoint p;
  p.r = coords(i, 0);
  p.angles = coords.row(i).tail(coords.cols() - 1).transpose();
  return p;
}

inline LorentzPoint Embedding::lorentz_row(Eigen::Index i) const {
  switch (model) {
    case Model::lorentz: return LorentzPoint(coords.row(i).transpose());
    case Model::poincare: return poincare_to_lorentz(PoincarePoint(coords.row(i).transpose()));
    case Model::native: return native_to_lorentz(native_row(coords, i));
  }
  throw GeometryError("unknown model");
}

// Returns the index of the first row violating the model's invariants, if any.
inline std::optional<Eigen::Index> first_invalid_row(const Embedding& e) {
  if (e.coords.cols() != row_width(e.model, e.dim)) return Eigen::Index{0};
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    bool ok = false;
    switch (e.model) {
      case Model::lorentz: ok = LorentzPoint(e.coords.row(i).transpose()).is_valid(); break;
      case Model::poincare: ok = PoincarePoint(e.coords.row(i).transpose()).is_valid(); break;
      case Model::native: ok = native_row(e.coords, i).is_valid(); break;
    }
    if (!ok) return i;
  }
  return std::nullopt;
}

inline Embedding convert(const Embedding& e, Model target) {
  if (e.model == target) return e;
  if (target == Model::native && e.dim < 2) throw GeometryError("native coordinates need n >= 2");
  Embedding out{target, e.dim, Matrix(e.size(), row_width(target, e.dim))};
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    // Direct ball <-> hyperboloid maps; native goes through the hyperboloid.
    const LorentzPoint u = e.lorentz_row(i);
    switch (target) {
      case Model::lorentz: out.coords.row(i) = u.coords.transpose(); break;
      case Model::poincare: out.coords.row(i) = lorentz_to_poincare(u).coords.transpose(); break;
      case Model::native: {
        const NativePoint p = lorentz_to_native(u);
        out.coords(i, 0) = p.r;
        out.coords.row(i).tail(e.dim - 1) = p.angles.transpose();
        break;
      }
    }
  }
  return out;
}

// Distance between rows i and j under the embedding's own model metric.
inline double row_distance(const Embedding& e, Eigen::Index i, Eigen::Index j) {
  switch (e.model) {
    case Model::lorentz: return lorentz_distance(e.coords.row(i), e.coords.row(j));
    case Model::poincare: return poincare_distance(e.coords.row(i), e.coords.row(j));
    case Model::native:
      if (e.dim == 2) return native_distance_2d(native_row(e.coords, i), native_row(e.coords, j));
      return lorentz_distance(e.lorentz_row(i), e.lorentz_row(j));
  }
  throw GeometryError("unknown model");
}

// All-pairs distances; symmetric with an exactly zero diagonal.
inline Matrix embedding_distance_matrix(const Embedding& e) {
  const Eigen::Index n = e.size();
  Matrix d = Matrix::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = row_distance(e, i, j);
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d(j, i) = d(i, j);
  return d;
}

}  // namespace hypegrl
