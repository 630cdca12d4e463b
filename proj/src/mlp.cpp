#include "gefet/mlp.hpp"

#include <cmath>
#include <optional>
#include <utility>

namespace gefet {

MlpParams::MlpParams(std::vector<Eigen::Index> sizes)
    : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) {
    throw DimensionMismatch("network needs at least one layer");
  }
  Eigen::Index total = 0;
  offsets_.reserve(sizes_.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
  theta_ = Eigen::VectorXd::Zero(total);
}

Eigen::Map<Eigen::MatrixXd> MlpParams::weight(Eigen::Index layer) {
  return {theta_.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<const Eigen::MatrixXd> MlpParams::weight(Eigen::Index layer) const {
  return {theta_.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<Eigen::VectorXd> MlpParams::bias(Eigen::Index layer) {
  return {theta_.data() + offsets_[layer] + sizes_[layer + 1] * sizes_[layer],
          sizes_[layer + 1]};
}

Eigen::Map<const Eigen::VectorXd> MlpParams::bias(Eigen::Index layer) const {
  return {theta_.data() + offsets_[layer] + sizes_[layer + 1] * sizes_[layer],
          sizes_[layer + 1]};
}

std::pair<Eigen::MatrixXd, ForwardTape> mlp_forward(const MlpParams& p,
                                                    const Eigen::MatrixXd& z) {
  if (z.cols() != p.input_dim()) {
    throw DimensionMismatch("input batch columns do not match network input");
  }
  const Eigen::Index layers = p.num_layers();
  ForwardTape tape;
  tape.sizes = p.sizes();
  tape.act.reserve(layers);
  tape.act.push_back(z);
  Eigen::MatrixXd h = z;
  for (Eigen::Index l = 0; l < layers; ++l) {
    Eigen::MatrixXd t = h * p.weight(l).transpose();
    t.rowwise() += p.bias(l).transpose();
    if (l + 1 < layers) {
      h = t.cwiseMax(0.0);
      tape.act.push_back(h);
    } else {
      h = std::move(t);  // linear output layer
    }
  }
  return {std::move(h), std::move(tape)};
}

MlpGradients mlp_backward(const MlpParams& p, const ForwardTape& tape,
                          const Eigen::MatrixXd& out_bar, bool want_param_grad,
                          bool want_input_grad) {
  const Eigen::Index layers = p.num_layers();
  if (tape.sizes != p.sizes() ||
      static_cast<Eigen::Index>(tape.act.size()) != layers) {
    throw TapeMismatch("tape does not belong to this network");
  }
  if (out_bar.rows() != tape.act[0].rows() ||
      out_bar.cols() != p.output_dim()) {
    throw TapeMismatch("cotangent shape does not match the taped batch");
  }

  MlpGradients g;
  // flat gradient buffer sharing theta's layout, addressed through the
  // same weight/bias views
  std::optional<MlpParams> grad_holder;
  if (want_param_grad) grad_holder.emplace(p.sizes());

  Eigen::MatrixXd t_bar = out_bar;  // output layer is linear
  for (Eigen::Index l = layers - 1; l >= 0; --l) {
    const Eigen::MatrixXd& input = tape.act[l];
    if (want_param_grad) {
      grad_holder->weight(l).noalias() = t_bar.transpose() * input;
      grad_holder->bias(l) = t_bar.colwise().sum().transpose();
    }
    if (l == 0 && !want_input_grad) break;
    Eigen::MatrixXd in_bar = t_bar * p.weight(l);
    if (l > 0) {
      // mask by the taped post-ReLU sign; relu' at exactly 0 taken as 0
      t_bar = ((input.array() > 0.0).cast<double>() * in_bar.array()).matrix();
    } else {
      t_bar = std::move(in_bar);
    }
  }
  if (want_param_grad) g.param_grad = std::move(grad_holder->theta());
  if (want_input_grad) g.input_grad = std::move(t_bar);
  return g;
}

MlpParams init_generator(Eigen::Index d_feat, Eigen::Index hidden,
                         Eigen::Index depth, Rng& rng) {
  if (d_feat < 1) throw DimensionMismatch("feature dimension must be >= 1");
  std::vector<Eigen::Index> sizes;
  sizes.push_back(d_feat);
  for (Eigen::Index i = 0; i < depth; ++i) sizes.push_back(hidden);
  sizes.push_back(d_feat);
  MlpParams p(sizes);
  for (Eigen::Index l = 0; l < p.num_layers(); ++l) {
    const double stddev = std::sqrt(2.0 / static_cast<double>(sizes[l]));
    p.weight(l) = stddev * rng.normal_matrix(sizes[l + 1], sizes[l]);
  }
  return p;
}

MlpParams init_generator(Eigen::Index d_feat, Rng& rng) {
  return init_generator(d_feat, 512, 3, rng);
}

}  // namespace gefet
