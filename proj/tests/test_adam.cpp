#include <doctest.h>

#include <cmath>
#include <vector>

#include "gefet/adam.hpp"
#include "gefet/rng.hpp"
#include "helpers.hpp"

using gefet::adam_step;
using gefet::AdamState;
using gefet::Rng;

namespace {

// Reference trace written in plain scalar loops, independent of the
// library's vectorized path.
struct RefAdam {
  std::vector<double> m, v, p;
  long t = 0;

  explicit RefAdam(const std::vector<double>& params)
      : m(params.size(), 0.0), v(params.size(), 0.0), p(params) {}

  void step(const std::vector<double>& g, double lr) {
    t += 1;
    const double mc = 1.0 - std::pow(0.9, static_cast<double>(t));
    const double vc = 1.0 - std::pow(0.999, static_cast<double>(t));
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g[i];
      v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
      p[i] -= lr * (m[i] / mc) / (std::sqrt(v[i] / vc) + 1e-8);
    }
  }
};

}  // namespace

TEST_CASE("adam_step leaves params unchanged on zero gradient") {
  AdamState state(4);
  Eigen::VectorXd params = Eigen::VectorXd::LinSpaced(4, -1.0, 2.0);
  const Eigen::VectorXd before = params;
  adam_step(state, params, Eigen::VectorXd::Zero(4), 0.1);
  CHECK(params == before);
  CHECK(state.t == 1);
}

TEST_CASE("adam_step first update is about -lr * sign(grad)") {
  AdamState state(3);
  Eigen::VectorXd params = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd grad(3);
  grad << 4.0, -0.25, 1e-3;
  const double lr = 0.01;
  adam_step(state, params, grad, lr);
  // bias correction makes m-hat = g and v-hat = g^2 on the first step
  for (int i = 0; i < 3; ++i) {
    const double want = -lr * grad(i) / (std::abs(grad(i)) + 1e-8);
    CHECK(oracle::rel_err(params(i), want) < 1e-5);
  }
}

TEST_CASE("adam_step first update is scale-invariant in the gradient") {
  Eigen::VectorXd grad(5);
  grad << 3.0, -1.0, 0.5, 2.0, -0.125;
  Eigen::VectorXd p1 = Eigen::VectorXd::Ones(5);
  Eigen::VectorXd p2 = Eigen::VectorXd::Ones(5);
  AdamState s1(5), s2(5);
  adam_step(s1, p1, grad, 0.05);
  adam_step(s2, p2, (1e6 * grad).eval(), 0.05);
  CHECK(oracle::rel_err(p2, p1) < 1e-6);
}

TEST_CASE("adam_step matches an independent reference trace") {
  const Eigen::Index n = 6;
  AdamState state(n);
  Rng rng(11);
  Eigen::VectorXd params = rng.normal_matrix(n, 1);
  RefAdam ref(std::vector<double>(params.data(), params.data() + n));

  for (int step = 0; step < 60; ++step) {
    // gradients from a fixed formula so both traces see identical inputs
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      g(i) = std::sin(0.7 * step + 1.3 * static_cast<double>(i)) +
             0.2 * static_cast<double>(i);
    }
    const double lr = step % 2 == 0 ? 0.02 : 0.003;
    adam_step(state, params, g, lr);
    ref.step(std::vector<double>(g.data(), g.data() + n), lr);
  }

  CHECK(state.t == 60);
  for (Eigen::Index i = 0; i < n; ++i) {
    CHECK(oracle::rel_err(params(i), ref.p[i]) < 1e-12);
    CHECK(oracle::rel_err(state.m(i), ref.m[i]) < 1e-12);
    CHECK(oracle::rel_err(state.v(i), ref.v[i]) < 1e-12);
  }
}

TEST_CASE("adam_step keeps the second moment nonnegative") {
  AdamState state(3);
  Eigen::VectorXd params = Eigen::VectorXd::Zero(3);
  Rng rng(5);
  for (int step = 0; step < 25; ++step) {
    Eigen::VectorXd g = rng.normal_matrix(3, 1);
    adam_step(state, params, g, 0.01);
    CHECK((state.v.array() >= 0.0).all());
  }
}

TEST_CASE("adam_step rejects mismatched shapes") {
  AdamState state(4);
  Eigen::VectorXd params = Eigen::VectorXd::Zero(4);
  CHECK_THROWS_AS(adam_step(state, params, Eigen::VectorXd::Zero(3), 0.1),
                  gefet::DimensionMismatch);
  Eigen::VectorXd short_params = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(adam_step(state, short_params, Eigen::VectorXd::Zero(2), 0.1),
                  gefet::DimensionMismatch);
}
