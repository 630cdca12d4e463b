#pragma once

#include <Eigen/Core>

#include "gefet/errors.hpp"

namespace gefet {

// Adam moments over a flat parameter vector.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double stability = 1e-8;

  explicit AdamState(Eigen::Index n)
      : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

// One bias-corrected Adam update, in place.
void adam_step(AdamState& state, Eigen::VectorXd& params,
               const Eigen::VectorXd& grad, double lr);

}  // namespace gefet
