#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>

#include "gefet/dataset.hpp"
#include "gefet/feature_model.hpp"
#include "gefet/linalg.hpp"
#include "gefet/rng.hpp"

namespace gefet {

// TV gradient split by dependency path. w_grad covers the explicit
// dependence of the sampled gradients on W; beta_bar is the cotangent on
// the output weights, which the caller chains through the solve when beta
// is itself a function of W (and adds directly when beta is free).
struct TvEval {
  double value = 0.0;          // sampled regularizer R-hat
  Eigen::MatrixXd w_grad;      // N x p
  Eigen::VectorXd beta_bar;    // length P
};

struct ObjectiveEval {
  double loss = 0.0;   // squared-error term L(w)
  double reg = 0.0;    // R-hat (0 when lambda == 0)
  double total = 0.0;  // loss + lambda * reg
  Eigen::MatrixXd w_grad;
  Eigen::VectorXd beta;  // optimal output weights at this W
};

// Free-beta variant used by the joint trainers: gradient of
// ||y - A(W) beta||^2 + lambda * R-hat with respect to both arguments.
struct JointEval {
  double loss = 0.0;
  double reg = 0.0;
  double total = 0.0;
  Eigen::MatrixXd w_grad;
  Eigen::VectorXd beta_grad;
};

// The training objective over a fixed dataset: squared error with output
// weights solved in closed form, optionally plus a Monte-Carlo total
// variation penalty over the data bounding box.
class Objective {
public:
  Objective(const Dataset& data, Activation act, double epsilon, double lambda,
            Eigen::Index tv_samples);

  Activation activation() const { return act_; }
  double epsilon() const { return epsilon_; }
  double lambda() const { return lambda_; }
  Eigen::Index tv_sample_count() const { return tv_samples_; }
  Eigen::Index data_size() const { return y_.size(); }
  Eigen::Index input_dim() const { return d_; }
  // feature width p (d, or d+1 with the bias trick)
  Eigen::Index feature_dim() const { return feature_width(act_, d_); }
  const Eigen::VectorXd& box_min() const { return box_min_; }
  const Eigen::VectorXd& box_max() const { return box_max_; }
  const Eigen::VectorXd& targets() const { return y_; }

  // (A^T A + eps I) beta = A^T y over the training set
  std::pair<Eigen::VectorXd, SolveTape> optimal_output_weights(
      const Eigen::MatrixXd& w) const;

  // squared-error loss at the optimal output weights
  double reduced_loss(const Eigen::MatrixXd& w) const;

  // loss and its exact W-gradient through the solve (no TV term)
  std::pair<double, Eigen::MatrixXd> reduced_loss_grad(
      const Eigen::MatrixXd& w) const;

  // uniform draw of tv_samples points from the data bounding box
  Eigen::MatrixXd draw_tv_points(Rng& rng) const;

  // sampled TV value at explicit sample points
  double tv_regularizer_at(const Eigen::MatrixXd& w,
                           const Eigen::VectorXd& beta,
                           const Eigen::MatrixXd& points) const;
  double tv_regularizer(const Eigen::MatrixXd& w, const Eigen::VectorXd& beta,
                        Rng& rng) const;

  // value, explicit W-gradient, and beta cotangent of the sampled TV term
  TvEval tv_regularizer_grad_parts(const Eigen::MatrixXd& w,
                                   const Eigen::VectorXd& beta,
                                   const Eigen::MatrixXd& points) const;

  // full W-gradient of R-hat alone, including the path through the solved
  // beta(W) (one extra adjoint solve on the supplied tape)
  std::pair<double, Eigen::MatrixXd> tv_regularizer_grad(
      const Eigen::MatrixXd& w, const SolveTape& tape,
      const Eigen::MatrixXd& points) const;

  // Fused loss + lambda * TV with a single adjoint solve; the workhorse of
  // every trainer that solves for beta.
  ObjectiveEval value_and_grad(const Eigen::MatrixXd& w, Rng& rng) const;
  ObjectiveEval value_and_grad_at(
      const Eigen::MatrixXd& w,
      const std::optional<Eigen::MatrixXd>& tv_points) const;

  // free-beta empirical risk (no solve), for the joint and fully-sampled
  // trainers
  JointEval joint_value_and_grad(const Eigen::MatrixXd& w,
                                 const Eigen::VectorXd& beta, Rng& rng) const;
  JointEval joint_value_and_grad_at(
      const Eigen::MatrixXd& w, const Eigen::VectorXd& beta,
      const std::optional<Eigen::MatrixXd>& tv_points) const;

private:
  Activation act_;
  double epsilon_;
  double lambda_;
  Eigen::Index tv_samples_;
  Eigen::Index d_;
  Eigen::MatrixXd x_;  // padded once when the activation uses the bias trick
  Eigen::VectorXd y_;
  Eigen::VectorXd box_min_, box_max_;
};

}  // namespace gefet
