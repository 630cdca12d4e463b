#pragma once

#include <Eigen/Dense>
#include <utility>

#include "gefet/errors.hpp"

namespace gefet {

// Partial-pivoting LU of a square matrix. Thin wrapper over Eigen's
// PartialPivLU that rejects numerically singular inputs instead of
// producing NaN downstream.
class LuFactorization {
public:
  explicit LuFactorization(const Eigen::MatrixXd& a);

  Eigen::Index dimension() const { return lu_.rows(); }
  // L (unit lower) and U packed in one matrix
  const Eigen::MatrixXd& packed() const { return lu_.matrixLU(); }
  // row permutation: factored row i came from input row permutation()[i]
  Eigen::VectorXi permutation() const;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

LuFactorization lu_factor(const Eigen::MatrixXd& a);
Eigen::VectorXd lu_solve(const LuFactorization& f, const Eigen::VectorXd& rhs);

// Everything the backward pass of the regularized solve needs.
struct SolveTape {
  LuFactorization factorization;  // LU of A^T A + eps I
  Eigen::MatrixXd design;         // A
  Eigen::VectorXd solution;       // beta
  double epsilon;
};

// beta uniquely solving (A^T A + eps I) beta = A^T y. The factorization is
// kept on the tape and reused by the backward pass.
std::pair<Eigen::VectorXd, SolveTape> solve_regularized_ls(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double epsilon);

struct LsVjp {
  Eigen::MatrixXd a_bar;
  Eigen::VectorXd y_bar;
};

// Gradients of <g_bar, beta(A, y)> with respect to A and y. One adjoint
// solve lambda = (A^T A + eps I)^{-1} g_bar on the cached factorization,
// then two outer products.
LsVjp solve_regularized_ls_vjp(const SolveTape& tape,
                               const Eigen::VectorXd& g_bar,
                               const Eigen::VectorXd& y);

}  // namespace gefet
