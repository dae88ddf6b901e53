#pragma once

// Geometry kernel for H^n with curvature -1: Lorentz (hyperboloid), Poincare
// ball and native polar coordinates, plus the tangent-space machinery used by
// the Riemannian optimizers.
//
// Lorentz coordinates store the spatial part first and the time coordinate
// last, u = (x_1, ..., x_n, t). The base point is x = 0, t = 1.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "hypegrl/errors.hpp"

namespace hypegrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Slack on -<u,v> >= 1 before a pair is declared off the manifold, relative
// to max(1, t_u t_v).
inline constexpr double kManifoldTolerance = 1e-6;
// Point-invariant tolerance (Minkowski self-product, tangency).
inline constexpr double kPointTolerance = 1e-9;
inline constexpr double kDefaultBallEps = 1e-5;

namespace detail {
// Below this value of -<u,v> the chord form of the distance is used; acosh
// loses about half the digits near 1.
inline constexpr double kChordSwitch = 1.001;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Copies a row or column expression into a column vector.
template <class A>
Vector as_column(const Eigen::MatrixBase<A>& e) {
  Vector out(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) out(i) = e(i);
  return out;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Raw kernels. These accept any Eigen vector expression (matrix rows included)
// so the trainers can work in place on coordinate tables.
// ---------------------------------------------------------------------------

template <class A, class B>
double minkowski_inner(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
  if (u.size() != v.size() || u.size() < 1) {
    throw GeometryError("minkowski_inner: dimension mismatch (" + std::to_string(u.size()) +
                        " vs " + std::to_string(v.size()) + ")");
  }
  const Eigen::Index n = u.size() - 1;
  return u.head(n).dot(v.head(n)) - u(n) * v(n);
}

// Applies the metric tensor diag(1, ..., 1, -1).
template <class A>
Vector metric_flip(const Eigen::MatrixBase<A>& g) {
  Vector out = detail::as_column(g);
  out(out.size() - 1) = -out(out.size() - 1);
  return out;
}

template <class A, class B>
double lorentz_distance(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
  const double a = -minkowski_inner(u, v);
  // Round-off in -<u,v> grows with t_u t_v.
  const double scale = std::max(1.0, std::abs(u(u.size() - 1) * v(v.size() - 1)));
  if (!(a >= 1.0 - kManifoldTolerance * scale)) {
    throw GeometryError("lorentz_distance: -<u,v> = " + std::to_string(a) +
                        " < 1, inputs are off the hyperboloid");
  }
  if (a < detail::kChordSwitch) {
    // <u-v,u-v> = 2(cosh d - 1) = 4 sinh^2(d/2) on the sheet.
    const Vector w = detail::as_column(u) - detail::as_column(v);
    const double chord2 = std::max(minkowski_inner(w, w), 0.0);
    return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
  }
  return std::acosh(a);
}

// Euclidean (ambient) gradient of arcosh(-<u,v>) with respect to u.
// Zero for coincident points, where the distance is not differentiable.
template <class A, class B>
Vector lorentz_distance_grad(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
  const double a = -minkowski_inner(u, v);
  double s = 0.0;
  if (a >= detail::kChordSwitch) {
    s = std::sqrt(a * a - 1.0);
  } else {
    s = std::sinh(lorentz_distance(u, v));
  }
  if (s < 1e-12) return Vector::Zero(u.size());
  return metric_flip(v) * (-1.0 / s);
}

// Moves the time coordinate so that <u,u> = -1 exactly (up to rounding).
template <class A>
Vector to_hyperboloid(const Eigen::MatrixBase<A>& u) {
  Vector out = detail::as_column(u);
  const Eigen::Index n = u.size() - 1;
  out(n) = std::sqrt(1.0 + out.head(n).squaredNorm());
  return out;
}

template <class A, class B>
double poincare_distance(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& z) {
  if (y.size() != z.size()) throw GeometryError("poincare_distance: dimension mismatch");
  const double alpha = 1.0 - y.squaredNorm();
  const double beta = 1.0 - z.squaredNorm();
  if (alpha <= 0.0 || beta <= 0.0) throw GeometryError("poincare_distance: point outside the unit ball");
  double diff2 = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) diff2 += (y(i) - z(i)) * (y(i) - z(i));
  // cosh d = 1 + 2|y-z|^2/(alpha beta)  <=>  sinh(d/2) = |y-z| / sqrt(alpha beta)
  return 2.0 * std::asinh(std::sqrt(diff2 / (alpha * beta)));
}

// Euclidean gradient of the ball distance with respect to y.
template <class A, class B>
Vector poincare_distance_grad(const Eigen::MatrixBase<A>& y, const Eigen::MatrixBase<B>& z) {
  const Eigen::Index n = y.size();
  const double alpha = 1.0 - y.squaredNorm();
  const double beta = 1.0 - z.squaredNorm();
  const Vector yv = detail::as_column(y);
  const Vector diff = yv - detail::as_column(z);
  const double s = diff.norm();
  if (s < 1e-15) return Vector::Zero(n);
  const double root = std::sqrt(alpha * beta);
  const double w = s / root;
  const double outer = 2.0 / std::sqrt(1.0 + w * w);
  return outer * (diff / (s * root) + yv * (s / (alpha * root)));
}

// Riemannian gradient on the hyperboloid: apply the metric, then remove the
// normal component. The result is Minkowski-orthogonal to u.
template <class A, class B>
Vector tangent_project_raw(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& g) {
  const Vector h = metric_flip(g);
  const Vector uu = detail::as_column(u);
  const Eigen::Index n = uu.size() - 1;
  // Equals h + <u,h> u on the sheet. The time coordinate is then re-derived
  // from <u,v> = 0, which far from the base point is far more accurate than
  // the subtraction when h is nearly parallel to u.
  Vector v = h - (minkowski_inner(uu, h) / minkowski_inner(uu, uu)) * uu;
  v(n) = uu.head(n).dot(v.head(n)) / uu(n);
  return v;
}

namespace detail {

// <v,v> for v tangent at u, from the spatial parts only:
// (|v|^2 + sum_{i<j} (x_i v_j - x_j v_i)^2) / t^2. Every term is non-negative,
// so far from the base point this avoids the cancellation in |v_x|^2 - v_t^2.
inline double tangent_norm_sq(const Vector& u, const Vector& v) {
  const Eigen::Index n = u.size() - 1;
  double wedge = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double c = u(i) * v(j) - u(j) * v(i);
      wedge += c * c;
    }
  return (v.head(n).squaredNorm() + wedge) / (u(n) * u(n));
}

}  // namespace detail

template <class A, class B>
Vector exp_map_raw(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
  const Vector uu = detail::as_column(u);
  const Vector vv = detail::as_column(v);
  const double t = uu(uu.size() - 1);
  const bool tangent = std::abs(minkowski_inner(uu, vv)) <= kManifoldTolerance * std::max(1.0, vv.norm() * t);
  const double sq = tangent ? detail::tangent_norm_sq(uu, vv) : minkowski_inner(vv, vv);
  if (sq < -kManifoldTolerance * std::max(1.0, vv.squaredNorm())) {
    throw GeometryError("exp_map_lorentz: direction is not space-like (<v,v> = " + std::to_string(sq) + ")");
  }
  const double norm = std::sqrt(std::max(sq, 0.0));
  if (norm < 1e-12) return uu;
  return to_hyperboloid(std::cosh(norm) * uu + (std::sinh(norm) / norm) * vv);
}

// ---------------------------------------------------------------------------
// Point types.
// ---------------------------------------------------------------------------

struct LorentzPoint {
  Vector coords;

  LorentzPoint() = default;
  explicit LorentzPoint(Vector c) : coords(std::move(c)) {}

  static LorentzPoint origin(Eigen::Index n) {
    Vector c = Vector::Zero(n + 1);
    c(n) = 1.0;
    return LorentzPoint(std::move(c));
  }

  // Builds a point from its spatial part; the time coordinate is completed.
  static LorentzPoint from_spatial(const Vector& x) {
    Vector c(x.size() + 1);
    c.head(x.size()) = x;
    c(x.size()) = std::sqrt(1.0 + x.squaredNorm());
    return LorentzPoint(std::move(c));
  }

  static LorentzPoint checked(Vector c) {
    LorentzPoint p(std::move(c));
    if (!p.is_valid()) throw GeometryError("not a point of the hyperboloid");
    return p;
  }

  Eigen::Index dim() const { return coords.size() - 1; }
  auto spatial() const { return coords.head(dim()); }
  double time() const { return coords(dim()); }

  bool is_valid(double tol = kPointTolerance) const {
    if (coords.size() < 2 || !coords.allFinite() || time() <= 0.0) return false;
    const double t = time();
    return std::abs(minkowski_inner(coords, coords) + 1.0) <= tol * std::max(1.0, t * t);
  }
};

struct PoincarePoint {
  Vector coords;

  PoincarePoint() = default;
  explicit PoincarePoint(Vector c) : coords(std::move(c)) {}

  static PoincarePoint checked(Vector c) {
    PoincarePoint p(std::move(c));
    if (!p.is_valid()) throw GeometryError("not a point of the open unit ball");
    return p;
  }

  Eigen::Index dim() const { return coords.size(); }
  bool is_valid() const { return coords.size() >= 1 && coords.allFinite() && coords.squaredNorm() < 1.0; }
};

// Polar coordinates: r is the distance to the base point; the first n-2
// angles lie in [0, pi] and the last in [0, 2 pi).
struct NativePoint {
  double r = 0.0;
  Vector angles;

  Eigen::Index dim() const { return angles.size() + 1; }
  bool is_valid() const {
    if (!(r >= 0.0) || !std::isfinite(r) || !angles.allFinite()) return false;
    const Eigen::Index m = angles.size();
    for (Eigen::Index k = 0; k + 1 < m; ++k)
      if (angles(k) < 0.0 || angles(k) > std::numbers::pi) return false;
    return m == 0 || (angles(m - 1) >= 0.0 && angles(m - 1) < detail::kTwoPi);
  }
};

struct TangentVector {
  LorentzPoint base;
  Vector dir;
};

// ---------------------------------------------------------------------------
// Operations on point types.
// ---------------------------------------------------------------------------

inline double lorentz_distance(const LorentzPoint& u, const LorentzPoint& v) {
  return lorentz_distance(u.coords, v.coords);
}

inline double poincare_distance(const PoincarePoint& y, const PoincarePoint& z) {
  return poincare_distance(y.coords, z.coords);
}

inline PoincarePoint lorentz_to_poincare(const LorentzPoint& u) {
  return PoincarePoint(u.spatial() / (1.0 + u.time()));
}

inline LorentzPoint poincare_to_lorentz(const PoincarePoint& y) {
  const double s = y.coords.squaredNorm();
  if (!(s < 1.0)) throw GeometryError("poincare_to_lorentz: |y| >= 1");
  Vector c(y.dim() + 1);
  c.head(y.dim()) = (2.0 / (1.0 - s)) * y.coords;
  c(y.dim()) = (1.0 + s) / (1.0 - s);
  return LorentzPoint(std::move(c));
}

namespace detail {

inline Vector angles_of(const Vector& x) {
  const Eigen::Index n = x.size();
  Vector angles = Vector::Zero(n - 1);
  if (x.squaredNorm() == 0.0) return angles;
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    angles(k) = std::atan2(x.tail(n - k - 1).norm(), x(k));
  }
  double last = std::atan2(x(n - 1), x(n - 2));
  if (last < 0.0) last += kTwoPi;
  if (last >= kTwoPi) last = 0.0;
  angles(n - 2) = last;
  return angles;
}

inline Vector unit_from_angles(const Vector& angles) {
  const Eigen::Index n = angles.size() + 1;
  Vector u(n);
  double sin_prod = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    u(k) = sin_prod * std::cos(angles(k));
    sin_prod *= std::sin(angles(k));
  }
  u(n - 1) = sin_prod;
  return u;
}

}  // namespace detail

inline NativePoint lorentz_to_native(const LorentzPoint& u) {
  if (u.dim() < 2) throw GeometryError("native coordinates need n >= 2");
  const Vector x = u.spatial();
  NativePoint p;
  p.r = std::asinh(x.norm());
  p.angles = detail::angles_of(x);
  return p;
}

inline LorentzPoint native_to_lorentz(const NativePoint& p) {
  if (p.angles.size() < 1) throw GeometryError("native coordinates need n >= 2");
  const Eigen::Index n = p.dim();
  Vector c(n + 1);
  c.head(n) = std::sinh(p.r) * detail::unit_from_angles(p.angles);
  c(n) = std::cosh(p.r);
  return LorentzPoint(std::move(c));
}

// Angular separation folded into [0, pi].
inline double angular_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), detail::kTwoPi);
  return d > std::numbers::pi ? detail::kTwoPi - d : d;
}

// cosh d = cosh r_p cosh r_q - sinh r_p sinh r_q cos(dtheta), evaluated as
// sinh^2(d/2) = sinh^2(dr/2) + sinh r_p sinh r_q sin^2(dtheta/2).
inline double native_distance_2d(const NativePoint& p, const NativePoint& q) {
  if (p.angles.size() != 1 || q.angles.size() != 1)
    throw GeometryError("native_distance_2d: points must be in H^2");
  const double half_dr = std::sinh(0.5 * (p.r - q.r));
  const double half_dt = std::sin(0.5 * angular_gap(p.angles(0), q.angles(0)));
  const double s2 = half_dr * half_dr + std::sinh(p.r) * std::sinh(q.r) * half_dt * half_dt;
  return 2.0 * std::asinh(std::sqrt(std::max(s2, 0.0)));
}

// Large-radius form r_p + r_q + 2 log(dtheta / 2).
inline double native_distance_asymptotic(const NativePoint& p, const NativePoint& q) {
  return p.r + q.r + 2.0 * std::log(angular_gap(p.angles(0), q.angles(0)) / 2.0);
}

inline TangentVector tangent_project(const LorentzPoint& u, const Vector& g) {
  if (g.size() != u.coords.size()) throw GeometryError("tangent_project: dimension mismatch");
  return TangentVector{u, tangent_project_raw(u.coords, g)};
}

inline double minkowski_norm(const Vector& v) {
  return std::sqrt(std::max(minkowski_inner(v, v), 0.0));
}

inline LorentzPoint exp_map_lorentz(const LorentzPoint& u, const TangentVector& v) {
  return LorentzPoint(exp_map_raw(u.coords, v.dir));
}

// Parallel transport of v (tangent at `from`) along the geodesic to `to`.
inline Vector parallel_transport(const LorentzPoint& from, const LorentzPoint& to, const Vector& v) {
  const double alpha = -minkowski_inner(from.coords, to.coords);
  const Vector shift = to.coords - alpha * from.coords;
  return v + (minkowski_inner(shift, v) / (alpha + 1.0)) * (from.coords + to.coords);
}

// The hyperbolic translation carrying `from` to `to`, applied to the point x.
// Its differential at `from` is parallel transport along the same geodesic.
inline Vector translate_lorentz(const LorentzPoint& from, const LorentzPoint& to, const Vector& x) {
  const double xa = minkowski_inner(x, from.coords);
  return -xa * to.coords + parallel_transport(from, to, x + xa * from.coords);
}

// Projection of the ambient mean of the rows back onto the sheet.
inline LorentzPoint lorentz_centroid(const Matrix& rows) {
  const Vector s = rows.colwise().sum().transpose();
  const double q = -minkowski_inner(s, s);
  if (!(q > 0.0)) throw GeometryError("lorentz_centroid: rows do not lie on the upper sheet");
  return LorentzPoint(s / std::sqrt(q));
}

inline Vector poincare_riemannian_rescale(const PoincarePoint& y, const Vector& g) {
  const double s = y.coords.squaredNorm();
  if (!(s < 1.0)) throw GeometryError("poincare_riemannian_rescale: |y| >= 1");
  const double f = 1.0 - s;
  return (f * f / 4.0) * g;
}

inline PoincarePoint ball_retraction(const Vector& y, double eps = kDefaultBallEps) {
  if (!(eps > 0.0 && eps <= 1e-3)) throw ConfigError("ball_retraction: eps must lie in (0, 1e-3]");
  const double norm = y.norm();
  const double limit = 1.0 - eps;
  if (norm >= limit) return PoincarePoint(y * (limit / norm));
  return PoincarePoint(y);
}

// Sample z ~ N(0, scale^2 I_n) at the base point, transport to `mean`, push
// through the exponential map.
template <class Rng>
LorentzPoint wrapped_normal_sample(const LorentzPoint& mean, double scale, Rng& rng) {
  if (!(scale > 0.0)) throw ConfigError("wrapped_normal_sample: scale must be positive");
  const Eigen::Index n = mean.dim();
  std::normal_distribution<double> normal(0.0, scale);
  Vector v0 = Vector::Zero(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) v0(i) = normal(rng);
  const LorentzPoint o = LorentzPoint::origin(n);
  const Vector v = parallel_transport(o, mean, v0);
  return LorentzPoint(exp_map_raw(mean.coords, v));
}

}  // namespace hypegrl
