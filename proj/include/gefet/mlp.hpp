#pragma once

#include <Eigen/Core>
#include <vector>

#include "gefet/errors.hpp"
#include "gefet/rng.hpp"

namespace gefet {

// Fully connected ReLU network with a linear output layer. All parameters
// live in one flat vector so the optimizer and serialization can treat the
// network as a plain point in R^n; weight(l)/bias(l) are views into it.
// Layout: [W_0 | b_0 | W_1 | b_1 | ...], each W_l column-major (out x in).
class MlpParams {
public:
  explicit MlpParams(std::vector<Eigen::Index> sizes);

  Eigen::Index num_layers() const {
    return static_cast<Eigen::Index>(sizes_.size()) - 1;
  }
  Eigen::Index input_dim() const { return sizes_.front(); }
  Eigen::Index output_dim() const { return sizes_.back(); }
  const std::vector<Eigen::Index>& sizes() const { return sizes_; }

  Eigen::Map<Eigen::MatrixXd> weight(Eigen::Index layer);
  Eigen::Map<const Eigen::MatrixXd> weight(Eigen::Index layer) const;
  Eigen::Map<Eigen::VectorXd> bias(Eigen::Index layer);
  Eigen::Map<const Eigen::VectorXd> bias(Eigen::Index layer) const;

  Eigen::VectorXd& theta() { return theta_; }
  const Eigen::VectorXd& theta() const { return theta_; }

private:
  std::vector<Eigen::Index> sizes_;
  std::vector<Eigen::Index> offsets_;  // start of W_l; b_l follows it
  Eigen::VectorXd theta_;
};

// Batch activations kept for the backward pass. act[0] is the input batch,
// act[l] for l >= 1 the post-ReLU output of hidden layer l-1.
struct ForwardTape {
  std::vector<Eigen::Index> sizes;
  std::vector<Eigen::MatrixXd> act;
};

struct MlpGradients {
  Eigen::VectorXd param_grad;  // empty when not requested
  Eigen::MatrixXd input_grad;  // empty when not requested
};

// Row-wise application of the network to a batch (rows are samples).
std::pair<Eigen::MatrixXd, ForwardTape> mlp_forward(const MlpParams& p,
                                                    const Eigen::MatrixXd& z);

// Gradients of <out_bar, mlp(z)> with respect to theta and z. ReLU
// subgradient at exactly 0 is 0. Either side can be skipped by flag;
// refinement only needs the input gradient, generator training only theta's.
MlpGradients mlp_backward(const MlpParams& p, const ForwardTape& tape,
                          const Eigen::MatrixXd& out_bar,
                          bool want_param_grad = true,
                          bool want_input_grad = true);

// d_feat -> hidden x depth -> d_feat, He-initialized weights, zero biases.
MlpParams init_generator(Eigen::Index d_feat, Eigen::Index hidden,
                         Eigen::Index depth, Rng& rng);
MlpParams init_generator(Eigen::Index d_feat, Rng& rng);

}  // namespace gefet
