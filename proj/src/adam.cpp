#include "gefet/adam.hpp"

#include <cmath>

namespace gefet {

void adam_step(AdamState& state, Eigen::VectorXd& params,
               const Eigen::VectorXd& grad, double lr) {
  if (params.size() != state.m.size() || grad.size() != state.m.size()) {
    throw DimensionMismatch("adam_step: parameter/gradient/state sizes differ");
  }
  state.t += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  params.array() -= lr * (state.m.array() / bc1) /
                    ((state.v.array() / bc2).sqrt() + state.stability);
}

}  // namespace gefet
