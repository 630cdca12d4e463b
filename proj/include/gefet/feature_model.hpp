#pragma once

#include <Eigen/Core>
#include <string>

#include "gefet/errors.hpp"

namespace gefet {

enum class Activation { kFourier, kSigmoid, kRelu };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// true for activations that pad inputs with a constant 1 and carry an
// output-bias column; Fourier uses neither
bool uses_bias_trick(Activation a);

// feature width p: d for Fourier, d+1 with the bias trick
Eigen::Index feature_width(Activation a, Eigen::Index d);

// output-weight length P: 2N for Fourier (cosine block then sine block),
// N+1 otherwise (N weights plus the output bias)
Eigen::Index output_weight_length(Activation a, Eigen::Index n_features);

// Two-layer model f(x) = sum_l beta_l phi(<w_l, x>) in real form.
// For Fourier the complex weights b_l = beta_l - i beta_{N+l} are recovered
// from the two blocks.
struct TrainedModel {
  Activation activation = Activation::kFourier;
  Eigen::Index d = 0;          // raw input dimension
  Eigen::MatrixXd w;           // N x feature_width(activation, d)
  Eigen::VectorXd beta;        // output_weight_length entries
  Eigen::Index num_features() const { return w.rows(); }
};

void check_model(const TrainedModel& m);

// A(W, X): M x P. X may be M x d (padded internally when the activation
// needs the bias trick) or already padded M x (d+1).
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& w,
                              const Eigen::MatrixXd& x, Activation act);

Eigen::VectorXd predict(const TrainedModel& model, const Eigen::MatrixXd& x);

// Analytic gradient of the model output with respect to the input point.
// The bias coordinate and the output-bias column contribute nothing.
Eigen::VectorXd spatial_gradient(const TrainedModel& model,
                                 const Eigen::VectorXd& x);

// rows are spatial gradients at the corresponding rows of x
Eigen::MatrixXd spatial_gradient_batch(const TrainedModel& model,
                                       const Eigen::MatrixXd& x);

// Gradient of <a_bar, design_matrix(W, X)> with respect to W. ReLU uses the
// subgradient 0 at t = 0.
Eigen::MatrixXd design_matrix_vjp(const Eigen::MatrixXd& w,
                                  const Eigen::MatrixXd& x, Activation act,
                                  const Eigen::MatrixXd& a_bar);

// Same gradient, but reusing an already computed design matrix instead of
// re-evaluating the activation (every Phi derivative here is expressible in
// Phi itself). x must be the matrix the design was built from; p is the
// feature width W.cols(), which disambiguates padded from unpadded x.
Eigen::MatrixXd design_matrix_vjp_pre(const Eigen::MatrixXd& a,
                                      const Eigen::MatrixXd& x, Eigen::Index p,
                                      Activation act,
                                      const Eigen::MatrixXd& a_bar);

namespace detail {
// entrywise cos(2 pi t) and sin(2 pi t) in one pass
void sincos_2pi(const Eigen::MatrixXd& t, Eigen::MatrixXd& c,
                Eigen::MatrixXd& s);
Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& t);
}  // namespace detail

}  // namespace gefet
