#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <stdexcept>

// Test-only oracles. Deliberately independent of the library's solve path:
// Gauss-Jordan is hand-rolled, the pseudo-inverse goes through Jacobi SVD.
namespace oracle {

// Dense inverse by Gauss-Jordan elimination with partial pivoting.
inline Eigen::MatrixXd dense_inverse(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("square only");
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    }
    if (a(piv, col) == 0.0) throw std::runtime_error("singular in oracle");
    if (piv != col) {
      a.row(piv).swap(a.row(col));
      inv.row(piv).swap(inv.row(col));
    }
    const double d = a(col, col);
    a.row(col) /= d;
    inv.row(col) /= d;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f != 0.0) {
        a.row(r) -= f * a.row(col);
        inv.row(r) -= f * inv.row(col);
      }
    }
  }
  return inv;
}

// Minimal-norm least-squares solution via SVD with explicit rank truncation.
inline Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& a,
                                  const Eigen::VectorXd& y) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cut = 1e-10 * s(0);
  Eigen::VectorXd uy = svd.matrixU().transpose() * y;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    uy(i) = s(i) > cut ? uy(i) / s(i) : 0.0;
  }
  return svd.matrixV() * uy;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

inline double rel_err(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
  return (got - want).norm() / std::max(1e-300, want.norm());
}

inline double rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  return (got - want).norm() / std::max(1e-300, want.norm());
}

// Central finite difference of a scalar function along a direction.
inline double fd_directional(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x, const Eigen::VectorXd& dir,
                             double h = 1e-5) {
  return (f(x + h * dir) - f(x - h * dir)) / (2.0 * h);
}

}  // namespace oracle
