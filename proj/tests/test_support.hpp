#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "hypegrl/hgeom.hpp"

namespace testing_support {

using hypegrl::LorentzPoint;
using hypegrl::Matrix;
using hypegrl::Vector;

// Point at a hyperbolic radius drawn from [0, r_max) in a uniform direction.
template <class Rng>
LorentzPoint random_point(Eigen::Index n, double r_max, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, r_max);
  Vector dir(n);
  for (Eigen::Index i = 0; i < n; ++i) dir(i) = normal(rng);
  dir.normalize();
  return LorentzPoint::from_spatial(std::sinh(uni(rng)) * dir);
}

template <class Rng>
Vector random_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// Central differences of f over every entry of x.
inline Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x, double h = 1e-5) {
  Matrix g(x.rows(), x.cols());
  Matrix y = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double keep = y(i, j);
      y(i, j) = keep + h;
      const double up = f(y);
      y(i, j) = keep - h;
      const double down = f(y);
      y(i, j) = keep;
      g(i, j) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

inline double relative_error(const Matrix& a, const Matrix& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

// arcosh(-<u_i,u_j>) written out from raw rows; valid slightly off the sheet.
inline double sheet_distance(const Matrix& u, Eigen::Index i, Eigen::Index j) {
  const Eigen::Index n = u.cols() - 1;
  return std::acosh(u(i, n) * u(j, n) - u.row(i).head(n).dot(u.row(j).head(n)));
}

inline double ball_distance(const Matrix& y, Eigen::Index i, Eigen::Index j) {
  const double num = (y.row(i) - y.row(j)).squaredNorm();
  const double den = (1.0 - y.row(i).squaredNorm()) * (1.0 - y.row(j).squaredNorm());
  return std::acosh(1.0 + 2.0 * num / den);
}

inline double stress_oracle(const Matrix& u, const Matrix& d) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = i + 1; j < u.rows(); ++j) {
      const double r = sheet_distance(u, i, j) - d(i, j);
      s += r * r;
    }
  return s;
}

// Rows on the sheet with every pair at least min_gap apart. Central
// differences of arcosh(-<u,v>) lose accuracy for nearly coincident pairs,
// since a small step off the sheet can push -<u,v> below 1.
template <class Rng>
Matrix separated_sheet_rows(Eigen::Index rows, Eigen::Index n, double r_max, double min_gap, Rng& rng) {
  Matrix u(rows, n + 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    bool ok = false;
    while (!ok) {
      u.row(i) = random_point(n, r_max, rng).coords.transpose();
      ok = true;
      for (Eigen::Index j = 0; j < i && ok; ++j) ok = sheet_distance(u, i, j) >= min_gap;
    }
  }
  return u;
}

// Per-test scratch directory that is removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::ostringstream name;
    name << "hypegrl_test_" << ::getpid() << "_" << counter++;
    path_ = std::filesystem::temp_directory_path() / name.str();
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace testing_support
