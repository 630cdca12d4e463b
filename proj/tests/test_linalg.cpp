#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gefet/errors.hpp"
#include "gefet/linalg.hpp"
#include "gefet/rng.hpp"
#include "helpers.hpp"

using gefet::lu_factor;
using gefet::lu_solve;
using gefet::LuFactorization;
using gefet::Rng;
using gefet::solve_regularized_ls;
using gefet::solve_regularized_ls_vjp;

namespace {

Eigen::MatrixXd unpack_l(const Eigen::MatrixXd& packed) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(packed.rows(), packed.cols());
  l.triangularView<Eigen::StrictlyLower>() =
      packed.triangularView<Eigen::StrictlyLower>();
  return l;
}

Eigen::MatrixXd unpack_u(const Eigen::MatrixXd& packed) {
  return packed.triangularView<Eigen::Upper>();
}

}  // namespace

TEST_CASE("lu_factor identity is trivial") {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  LuFactorization f = lu_factor(eye);
  CHECK(unpack_l(f.packed()).isApprox(eye, 1e-15));
  CHECK(unpack_u(f.packed()).isApprox(eye, 1e-15));
  Eigen::VectorXi perm = f.permutation();
  for (int i = 0; i < 3; ++i) CHECK(perm(i) == i);
}

TEST_CASE("lu_factor hand-eliminated 2x2") {
  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 1, 3;
  Eigen::VectorXd rhs(2);
  rhs << 3, 4;
  // 2x + y = 3, x + 3y = 4 has the solution x = y = 1
  Eigen::VectorXd x = lu_solve(lu_factor(a), rhs);
  CHECK(std::abs(x(0) - 1.0) < 1e-14);
  CHECK(std::abs(x(1) - 1.0) < 1e-14);
}

TEST_CASE("lu_factor rejects rank-deficient input") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 1, 1;
  CHECK_THROWS_AS(lu_factor(a), gefet::SingularMatrix);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS_AS(lu_factor(z), gefet::SingularMatrix);
}

TEST_CASE("lu_factor rejects non-square input") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(2, 3);
  CHECK_THROWS_AS(lu_factor(a), gefet::DimensionMismatch);
}

TEST_CASE("permutation reconstructs P*L*U") {
  Rng rng(314);
  Eigen::MatrixXd a = rng.normal_matrix(6, 6);
  a.diagonal().array() += 8.0;  // keep it comfortably nonsingular
  LuFactorization f = lu_factor(a);
  Eigen::MatrixXd lu = unpack_l(f.packed()) * unpack_u(f.packed());
  Eigen::VectorXi perm = f.permutation();
  // permutation is a bijection
  Eigen::VectorXi seen = Eigen::VectorXi::Zero(6);
  for (int i = 0; i < 6; ++i) {
    REQUIRE(perm(i) >= 0);
    REQUIRE(perm(i) < 6);
    seen(perm(i)) += 1;
  }
  for (int i = 0; i < 6; ++i) CHECK(seen(i) == 1);
  // factored row i came from input row perm(i)
  for (int i = 0; i < 6; ++i) {
    CHECK((lu.row(i) - a.row(perm(i))).norm() <= 1e-10 * a.row(perm(i)).norm());
  }
}

TEST_CASE("lu_solve trivial cases") {
  Eigen::VectorXd v(4);
  v << -1, 0.5, 2, 7;
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
  CHECK(lu_solve(lu_factor(eye), v).isApprox(v, 1e-15));

  Eigen::MatrixXd d(2, 2);
  d << 2, 0, 0, 4;
  Eigen::VectorXd rhs(2);
  rhs << 2, 8;
  Eigen::VectorXd x = lu_solve(lu_factor(d), rhs);
  CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x(1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("lu_solve checks rhs length") {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd bad(2);
  bad << 1, 2;
  CHECK_THROWS_AS(lu_solve(lu_factor(eye), bad), gefet::DimensionMismatch);
}

TEST_CASE("lu_solve forward-multiply oracle on random instances") {
  Rng rng(2718);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a = rng.normal_matrix(10, 10);
    a.diagonal().array() += 12.0;
    Eigen::VectorXd x_star = rng.normal_vector(10);
    Eigen::VectorXd rhs = a * x_star;
    Eigen::VectorXd x = lu_solve(lu_factor(a), rhs);
    CHECK(oracle::rel_err(x, x_star) < 1e-8);
  }
}

TEST_CASE("solve_regularized_ls fits the mean with a ones column") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(2, 1);
  Eigen::VectorXd y(2);
  y << 0, 2;
  const double eps = 1e-7;
  auto [beta, tape] = solve_regularized_ls(a, y, eps);
  // closed form: beta = sum(y) / (M + eps)
  CHECK(beta(0) == doctest::Approx(2.0 / (2.0 + eps)).epsilon(1e-12));
  double ssr = (y - a * beta).squaredNorm();
  CHECK(ssr == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(tape.epsilon == eps);
}

TEST_CASE("huge regularization drives beta to zero") {
  Rng rng(55);
  Eigen::MatrixXd a = rng.normal_matrix(5, 3);
  Eigen::VectorXd y = rng.normal_vector(5);
  auto [beta, tape] = solve_regularized_ls(a, y, 1e12);
  CHECK(beta.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("solve_regularized_ls matches dense-inverse oracle") {
  Rng rng(808);
  Eigen::MatrixXd a = rng.normal_matrix(20, 6);
  Eigen::VectorXd y = rng.normal_vector(20);
  const double eps = 1e-7;
  auto [beta, tape] = solve_regularized_ls(a, y, eps);
  Eigen::MatrixXd h = a.transpose() * a;
  h.diagonal().array() += eps;
  Eigen::VectorXd want = oracle::dense_inverse(h) * (a.transpose() * y);
  CHECK(oracle::rel_err(beta, want) < 1e-8);
}

TEST_CASE("normal-equation residual invariant across shapes") {
  Rng rng(919);
  const int shapes[][2] = {{1, 1}, {3, 5}, {30, 7}, {12, 12}, {50, 20}};
  const double epsilons[] = {1e-7, 1e-3, 1.0};
  for (auto& sh : shapes) {
    for (double eps : epsilons) {
      Eigen::MatrixXd a = rng.normal_matrix(sh[0], sh[1]);
      Eigen::VectorXd y = rng.normal_vector(sh[0]);
      auto [beta, tape] = solve_regularized_ls(a, y, eps);
      Eigen::VectorXd aty = a.transpose() * y;
      Eigen::VectorXd resid =
          a.transpose() * (a * beta) + eps * beta - aty;
      CHECK(resid.cwiseAbs().maxCoeff() <=
            1e-8 * (1.0 + aty.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("vjp of zero cotangent is zero") {
  Rng rng(31);
  Eigen::MatrixXd a = rng.normal_matrix(6, 3);
  Eigen::VectorXd y = rng.normal_vector(6);
  auto [beta, tape] = solve_regularized_ls(a, y, 1e-7);
  auto vjp = solve_regularized_ls_vjp(tape, Eigen::VectorXd::Zero(3), y);
  CHECK(vjp.a_bar.norm() == 0.0);
  CHECK(vjp.y_bar.norm() == 0.0);
}

TEST_CASE("vjp recovers 1/a sensitivity for diagonal systems") {
  // beta_i = a_i y_i / (a_i^2 + eps), so d beta_i / d y_i = a_i / (a_i^2 + eps)
  Eigen::MatrixXd a(3, 3);
  a.setZero();
  a.diagonal() << 2.0, -0.5, 1.25;
  Eigen::VectorXd y(3);
  y << 1.0, 2.0, -3.0;
  const double eps = 1e-10;
  auto [beta, tape] = solve_regularized_ls(a, y, eps);
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
    g(i) = 1.0;
    auto vjp = solve_regularized_ls_vjp(tape, g, y);
    const double ai = a(i, i);
    CHECK(vjp.y_bar(i) ==
          doctest::Approx(ai / (ai * ai + eps)).epsilon(1e-10));
    // eps -> 0 limit is 1/a_i
    CHECK(std::abs(vjp.y_bar(i) - 1.0 / ai) < 1e-9);
    for (int j = 0; j < 3; ++j) {
      if (j != i) CHECK(std::abs(vjp.y_bar(j)) < 1e-12);
    }
  }
}

TEST_CASE("vjp matches finite differences along random directions") {
  Rng rng(4242);
  const int m = 12, p = 4;
  Eigen::MatrixXd a = rng.normal_matrix(m, p);
  Eigen::VectorXd y = rng.normal_vector(m);
  const double eps = 1e-4;  // keep the solve smooth on the FD scale
  Eigen::VectorXd g_bar = rng.normal_vector(p);

  auto [beta, tape] = solve_regularized_ls(a, y, eps);
  auto vjp = solve_regularized_ls_vjp(tape, g_bar, y);

  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd da = rng.normal_matrix(m, p);
    Eigen::VectorXd dy = rng.normal_vector(m);
    const double h = 1e-5;
    auto scalar = [&](double t) {
      auto [b, tp] = solve_regularized_ls(a + t * da, y + t * dy, eps);
      return g_bar.dot(b);
    };
    double fd = (scalar(h) - scalar(-h)) / (2.0 * h);
    double analytic = (vjp.a_bar.array() * da.array()).sum() + vjp.y_bar.dot(dy);
    CHECK(oracle::rel_err(analytic, fd) < 1e-5);
  }
}

TEST_CASE("vjp rejects mismatched cotangent") {
  Rng rng(77);
  Eigen::MatrixXd a = rng.normal_matrix(6, 3);
  Eigen::VectorXd y = rng.normal_vector(6);
  auto [beta, tape] = solve_regularized_ls(a, y, 1e-7);
  CHECK_THROWS_AS(solve_regularized_ls_vjp(tape, Eigen::VectorXd::Zero(5), y),
                  gefet::DimensionMismatch);
}

TEST_CASE("tiny epsilon approaches the minimal-norm solution") {
  // rank-2 design, 8x4; scaled so eps=1e-12 sits far below the spectrum
  // but roundoff in forming A^T A stays far below eps
  Rng rng(606);
  Eigen::MatrixXd u = rng.normal_matrix(8, 2);
  Eigen::MatrixXd v = rng.normal_matrix(4, 2);
  Eigen::MatrixXd a = 0.05 * (u * v.transpose());
  Eigen::VectorXd y = rng.normal_vector(8);
  auto [beta, tape] = solve_regularized_ls(a, y, 1e-12);
  Eigen::VectorXd want = oracle::pinv_solve(a, y);
  CHECK(oracle::rel_err(beta, want) < 1e-4);
}
