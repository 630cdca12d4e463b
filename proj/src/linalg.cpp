#include "gefet/linalg.hpp"

#include <cmath>

namespace gefet {

namespace {
const Eigen::MatrixXd& require_square(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("LU factorization needs a square matrix");
  }
  return a;
}
}  // namespace

LuFactorization::LuFactorization(const Eigen::MatrixXd& a)
    : lu_(require_square(a)) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    throw SingularMatrix("matrix is identically zero");
  }
  const double tol = 1e-14 * scale;
  const auto& packed = lu_.matrixLU();
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    if (!(std::abs(packed(i, i)) >= tol)) {
      throw SingularMatrix("pivot " + std::to_string(i) +
                           " below tolerance, matrix is numerically singular");
    }
  }
}

Eigen::VectorXi LuFactorization::permutation() const {
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic> inv =
      lu_.permutationP().inverse();
  return inv.indices();
}

Eigen::VectorXd LuFactorization::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != lu_.rows()) {
    throw DimensionMismatch("rhs length does not match factored matrix");
  }
  return lu_.solve(rhs);
}

Eigen::MatrixXd LuFactorization::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != lu_.rows()) {
    throw DimensionMismatch("rhs rows do not match factored matrix");
  }
  return lu_.solve(rhs);
}

LuFactorization lu_factor(const Eigen::MatrixXd& a) {
  return LuFactorization(a);
}

Eigen::VectorXd lu_solve(const LuFactorization& f, const Eigen::VectorXd& rhs) {
  return f.solve(rhs);
}

std::pair<Eigen::VectorXd, SolveTape> solve_regularized_ls(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double epsilon) {
  if (a.rows() != y.size()) {
    throw DimensionMismatch("design matrix rows must match target length");
  }
  const Eigen::Index p = a.cols();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p, p);
  h.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  h.triangularView<Eigen::StrictlyUpper>() =
      h.triangularView<Eigen::StrictlyLower>().transpose();
  h.diagonal().array() += epsilon;
  LuFactorization f(h);
  Eigen::VectorXd aty = a.transpose() * y;
  Eigen::VectorXd beta = f.solve(aty);
  SolveTape tape{std::move(f), a, beta, epsilon};
  return {std::move(beta), std::move(tape)};
}

LsVjp solve_regularized_ls_vjp(const SolveTape& tape,
                               const Eigen::VectorXd& g_bar,
                               const Eigen::VectorXd& y) {
  if (g_bar.size() != tape.solution.size()) {
    throw DimensionMismatch("cotangent length does not match solution");
  }
  const Eigen::MatrixXd& a = tape.design;
  const Eigen::VectorXd& beta = tape.solution;
  Eigen::VectorXd lambda = tape.factorization.solve(g_bar);
  Eigen::VectorXd a_lambda = a * lambda;
  LsVjp out;
  out.y_bar = a_lambda;
  out.a_bar = (y - a * beta) * lambda.transpose() - a_lambda * beta.transpose();
  return out;
}

}  // namespace gefet
