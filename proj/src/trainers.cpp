#include "gefet/trainers.hpp"

#include <algorithm>
#include <cmath>

#include "gefet/adam.hpp"
#include "gefet/linalg.hpp"

namespace gefet {

namespace {

Eigen::Map<const Eigen::MatrixXd> as_matrix(const Eigen::VectorXd& flat,
                                            Eigen::Index rows,
                                            Eigen::Index cols) {
  return {flat.data(), rows, cols};
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

void ensure_finite(double value, long step) {
  if (!std::isfinite(value)) {
    throw NonFiniteLoss("training loss became non-finite", step);
  }
}

TrainedModel finalize(const Objective& obj, Activation act, Eigen::Index d,
                      Eigen::MatrixXd w) {
  auto [beta, tape] = obj.optimal_output_weights(w);
  TrainedModel model;
  model.activation = act;
  model.d = d;
  model.w = std::move(w);
  model.beta = std::move(beta);
  return model;
}

}  // namespace

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> methods = {
      "gft", "gft-r", "f-opt", "nn", "nn-noisy", "fully-sampled", "krr"};
  return methods;
}

void check_config(const TrainConfig& cfg) {
  if (std::find(known_methods().begin(), known_methods().end(), cfg.method) ==
      known_methods().end()) {
    throw InvalidConfig("unknown method '" + cfg.method + "'");
  }
  if (cfg.n_features < 1) throw InvalidConfig("n_features must be >= 1");
  if (cfg.steps_gft < 0 || cfg.steps_refine < 0 || cfg.steps_nn < 0) {
    throw InvalidConfig("step counts must be >= 0");
  }
  if (cfg.lr_gft <= 0.0 || cfg.lr_nn <= 0.0) {
    throw InvalidConfig("learning rates must be positive");
  }
  if (cfg.epsilon <= 0.0) throw InvalidConfig("epsilon must be positive");
  if (cfg.lambda < 0.0) throw InvalidConfig("lambda must be nonnegative");
  if (cfg.lambda > 0.0 && cfg.tv_samples < 1) {
    throw InvalidConfig("a positive lambda needs tv_samples >= 1");
  }
  if (cfg.krr_ridge_scale <= 0.0) {
    throw InvalidConfig("kernel ridge scale must be positive");
  }
  if (cfg.generator_hidden < 1 || cfg.generator_depth < 1) {
    throw InvalidConfig("generator needs hidden >= 1 and depth >= 1");
  }
}

GftResult train_gft(const TrainConfig& cfg, const Dataset& data, Rng& rng) {
  check_dataset(data);
  const Eigen::Index d_feat = feature_width(cfg.activation, data.dim());
  MlpParams gen =
      init_generator(d_feat, cfg.generator_hidden, cfg.generator_depth, rng);
  AdamState adam(gen.theta().size());
  Objective obj(data, cfg.activation, cfg.epsilon, cfg.lambda, cfg.tv_samples);

  Trace trace;
  trace.reserve(static_cast<std::size_t>(cfg.steps_gft) + 1);
  for (long step = 0; step < cfg.steps_gft; ++step) {
    Eigen::MatrixXd z = rng.normal_matrix(cfg.n_features, d_feat);
    auto [w, tape] = mlp_forward(gen, z);
    ObjectiveEval eval = obj.value_and_grad(w, rng);
    ensure_finite(eval.total, step);
    trace.push_back({step, eval.loss, eval.reg});
    MlpGradients grads = mlp_backward(gen, tape, eval.w_grad, true, false);
    adam_step(adam, gen.theta(), grads.param_grad, cfg.lr_gft);
  }

  Eigen::MatrixXd z_final = rng.normal_matrix(cfg.n_features, d_feat);
  auto [w_final, tape_final] = mlp_forward(gen, z_final);
  TrainedModel model = finalize(obj, cfg.activation, data.dim(), w_final);
  double final_loss = (obj.targets() - design_matrix(model.w, data.x,
                                                     cfg.activation) *
                                           model.beta)
                          .squaredNorm();
  double final_reg =
      cfg.lambda > 0.0 ? obj.tv_regularizer(model.w, model.beta, rng) : 0.0;
  ensure_finite(final_loss, cfg.steps_gft);
  trace.push_back({cfg.steps_gft, final_loss, final_reg});
  return {std::move(gen), std::move(model), std::move(z_final),
          std::move(trace)};
}

TrainResult refine_features(const MlpParams& generator, const TrainConfig& cfg,
                            const Dataset& data, Rng& rng,
                            const std::optional<Eigen::MatrixXd>& z0) {
  check_dataset(data);
  const Eigen::Index d_feat = generator.output_dim();
  if (generator.input_dim() != d_feat) {
    throw DimensionMismatch("refinement expects a square generator");
  }
  if (d_feat != feature_width(cfg.activation, data.dim())) {
    throw DimensionMismatch("generator width does not fit data and activation");
  }
  Objective obj(data, cfg.activation, cfg.epsilon, cfg.lambda, cfg.tv_samples);

  Eigen::VectorXd z_flat;
  if (z0) {
    if (z0->rows() != cfg.n_features || z0->cols() != d_feat) {
      throw DimensionMismatch("starting latents have the wrong shape");
    }
    z_flat = flatten(*z0);
  } else {
    z_flat = flatten(rng.normal_matrix(cfg.n_features, d_feat));
  }
  AdamState adam(z_flat.size());

  Trace trace;
  trace.reserve(static_cast<std::size_t>(cfg.steps_refine) + 1);
  for (long step = 0; step < cfg.steps_refine; ++step) {
    auto [w, tape] =
        mlp_forward(generator, as_matrix(z_flat, cfg.n_features, d_feat));
    ObjectiveEval eval = obj.value_and_grad(w, rng);
    ensure_finite(eval.total, step);
    trace.push_back({step, eval.loss, eval.reg});
    MlpGradients grads = mlp_backward(generator, tape, eval.w_grad, false, true);
    adam_step(adam, z_flat, flatten(grads.input_grad), cfg.lr_gft);
  }

  auto [w_final, tape_final] =
      mlp_forward(generator, as_matrix(z_flat, cfg.n_features, d_feat));
  TrainedModel model = finalize(obj, cfg.activation, data.dim(), w_final);
  double final_loss =
      (obj.targets() -
       design_matrix(model.w, data.x, cfg.activation) * model.beta)
          .squaredNorm();
  double final_reg =
      cfg.lambda > 0.0 ? obj.tv_regularizer(model.w, model.beta, rng) : 0.0;
  ensure_finite(final_loss, cfg.steps_refine);
  trace.push_back({cfg.steps_refine, final_loss, final_reg});
  return {std::move(model), std::move(trace)};
}

TrainResult train_f_opt(const TrainConfig& cfg, const Dataset& data, Rng& rng) {
  check_dataset(data);
  const Eigen::Index p = feature_width(cfg.activation, data.dim());
  Objective obj(data, cfg.activation, cfg.epsilon, cfg.lambda, cfg.tv_samples);

  Eigen::VectorXd w_flat = flatten(rng.normal_matrix(cfg.n_features, p));
  AdamState adam(w_flat.size());

  Trace trace;
  trace.reserve(static_cast<std::size_t>(cfg.steps_refine) + 1);
  for (long step = 0; step < cfg.steps_refine; ++step) {
    ObjectiveEval eval =
        obj.value_and_grad(as_matrix(w_flat, cfg.n_features, p), rng);
    ensure_finite(eval.total, step);
    trace.push_back({step, eval.loss, eval.reg});
    adam_step(adam, w_flat, flatten(eval.w_grad), cfg.lr_gft);
  }

  TrainedModel model = finalize(obj, cfg.activation, data.dim(),
                                as_matrix(w_flat, cfg.n_features, p));
  double final_loss =
      (obj.targets() -
       design_matrix(model.w, data.x, cfg.activation) * model.beta)
          .squaredNorm();
  double final_reg =
      cfg.lambda > 0.0 ? obj.tv_regularizer(model.w, model.beta, rng) : 0.0;
  ensure_finite(final_loss, cfg.steps_refine);
  trace.push_back({cfg.steps_refine, final_loss, final_reg});
  return {std::move(model), std::move(trace)};
}

TrainResult train_nn(const TrainConfig& cfg, const Dataset& data, Rng& rng,
                     bool noisy) {
  check_dataset(data);
  const Eigen::Index n = cfg.n_features;
  const Eigen::Index p = feature_width(cfg.activation, data.dim());
  const Eigen::Index p_out = output_weight_length(cfg.activation, n);
  Objective obj(data, cfg.activation, cfg.epsilon, cfg.lambda, cfg.tv_samples);

  // features Gaussian, output weights zero: the starting loss is sum(y^2)
  Eigen::VectorXd theta(n * p + p_out);
  theta.head(n * p) = flatten(rng.normal_matrix(n, p));
  theta.tail(p_out).setZero();
  AdamState adam(theta.size());
  const double rho = cfg.lr_nn;
  const double noise_scale = 0.1 * rho;

  Trace trace;
  trace.reserve(static_cast<std::size_t>(cfg.steps_nn) + 1);
  Eigen::VectorXd grad(theta.size());
  for (long step = 0; step < cfg.steps_nn; ++step) {
    Eigen::Map<const Eigen::MatrixXd> w_view(theta.data(), n, p);
    Eigen::Map<const Eigen::VectorXd> beta_view(theta.data() + n * p, p_out);
    JointEval eval = obj.joint_value_and_grad(w_view, beta_view, rng);
    ensure_finite(eval.total, step);
    trace.push_back({step, eval.loss, eval.reg});
    grad.head(n * p) = flatten(eval.w_grad);
    grad.tail(p_out) = eval.beta_grad;
    if (noisy) {
      theta -= rho * grad;
      theta += noise_scale * rng.normal_vector(theta.size());
    } else {
      adam_step(adam, theta, grad, rho);
    }
  }

  TrainedModel model;
  model.activation = cfg.activation;
  model.d = data.dim();
  model.w = Eigen::Map<const Eigen::MatrixXd>(theta.data(), n, p);
  model.beta = theta.tail(p_out);
  JointEval final_eval = obj.joint_value_and_grad(model.w, model.beta, rng);
  ensure_finite(final_eval.total, cfg.steps_nn);
  trace.push_back({cfg.steps_nn, final_eval.loss, final_eval.reg});
  return {std::move(model), std::move(trace)};
}

GftResult train_fully_sampled(const TrainConfig& cfg, const Dataset& data,
                              Rng& rng) {
  check_dataset(data);
  if (cfg.activation != Activation::kFourier) {
    throw InvalidConfig("fully-sampled training is defined for fourier only");
  }
  const Eigen::Index d = data.dim();
  const Eigen::Index d_io = d + 2;  // (w, Re b, Im b) per row
  const Eigen::Index n = cfg.n_features;
  MlpParams gen =
      init_generator(d_io, cfg.generator_hidden, cfg.generator_depth, rng);
  AdamState adam(gen.theta().size());
  Objective obj(data, cfg.activation, cfg.epsilon, cfg.lambda, cfg.tv_samples);

  auto split = [&](const Eigen::MatrixXd& out) {
    Eigen::MatrixXd w = out.leftCols(d);
    Eigen::VectorXd beta(2 * n);
    beta.head(n) = out.col(d);
    beta.tail(n) = -out.col(d + 1);  // b = Re + i Im, beta tail carries -Im
    return std::make_pair(std::move(w), std::move(beta));
  };

  Trace trace;
  trace.reserve(static_cast<std::size_t>(cfg.steps_gft) + 1);
  for (long step = 0; step < cfg.steps_gft; ++step) {
    Eigen::MatrixXd z = rng.normal_matrix(n, d_io);
    auto [out, tape] = mlp_forward(gen, z);
    auto [w, beta] = split(out);
    JointEval eval = obj.joint_value_and_grad(w, beta, rng);
    ensure_finite(eval.total, step);
    trace.push_back({step, eval.loss, eval.reg});
    Eigen::MatrixXd out_bar(n, d_io);
    out_bar.leftCols(d) = eval.w_grad;
    out_bar.col(d) = eval.beta_grad.head(n);
    out_bar.col(d + 1) = -eval.beta_grad.tail(n);
    MlpGradients grads = mlp_backward(gen, tape, out_bar, true, false);
    adam_step(adam, gen.theta(), grads.param_grad, cfg.lr_gft);
  }

  Eigen::MatrixXd z_final = rng.normal_matrix(n, d_io);
  auto [out_final, tape_final] = mlp_forward(gen, z_final);
  auto [w_final, beta_final] = split(out_final);
  TrainedModel model;
  model.activation = cfg.activation;
  model.d = d;
  model.w = std::move(w_final);
  model.beta = std::move(beta_final);
  JointEval final_eval = obj.joint_value_and_grad(model.w, model.beta, rng);
  ensure_finite(final_eval.total, cfg.steps_gft);
  trace.push_back({cfg.steps_gft, final_eval.loss, final_eval.reg});
  return {std::move(gen), std::move(model), std::move(z_final),
          std::move(trace)};
}

double median_pairwise_distance(const Eigen::MatrixXd& x) {
  const Eigen::Index m = x.rows();
  if (m < 2) throw InvalidConfig("need at least two points for a distance");
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      dist.push_back((x.row(i) - x.row(j)).norm());
    }
  }
  std::sort(dist.begin(), dist.end());
  const std::size_t k = dist.size();
  if (k % 2 == 1) return dist[k / 2];
  return 0.5 * (dist[k / 2 - 1] + dist[k / 2]);
}

Eigen::VectorXd kernel_ridge(const Dataset& train,
                             const Eigen::MatrixXd& x_test, double ridge) {
  check_dataset(train);
  if (train.size() < 2) {
    throw InvalidConfig("kernel ridge needs at least two training points");
  }
  if (x_test.cols() != train.dim()) {
    throw DimensionMismatch("test input width does not match training data");
  }
  if (ridge <= 0.0) throw InvalidConfig("ridge must be positive");

  double sigma = median_pairwise_distance(train.x);
  if (sigma <= 0.0) sigma = 1.0;  // all points coincide
  const double inv = 1.0 / (2.0 * sigma * sigma);

  Eigen::VectorXd train_sq = train.x.rowwise().squaredNorm();
  Eigen::MatrixXd k = -2.0 * (train.x * train.x.transpose());
  k.colwise() += train_sq;
  k.rowwise() += train_sq.transpose();
  // squared distances; clip the tiny negatives roundoff leaves on the diagonal
  k = (-inv * k.array().max(0.0)).exp().matrix();
  k.diagonal().array() += ridge;

  Eigen::VectorXd alpha = lu_solve(lu_factor(k), train.y);

  Eigen::VectorXd test_sq = x_test.rowwise().squaredNorm();
  Eigen::MatrixXd k_test = -2.0 * (x_test * train.x.transpose());
  k_test.colwise() += test_sq;
  k_test.rowwise() += train_sq.transpose();
  k_test = (-inv * k_test.array().max(0.0)).exp().matrix();
  return k_test * alpha;
}

TrainResult train_any(const TrainConfig& cfg, const Dataset& data) {
  check_config(cfg);
  if (cfg.lambda_auto) {
    throw InvalidConfig(
        "lambda must be resolved before training (run the selection grid)");
  }
  Rng rng(cfg.seed);
  if (cfg.method == "gft") {
    GftResult g = train_gft(cfg, data, rng);
    TrainResult out{std::move(g.model), std::move(g.trace)};
    out.generator = std::move(g.generator);
    return out;
  }
  if (cfg.method == "gft-r") {
    GftResult g = train_gft(cfg, data, rng);
    TrainResult out =
        refine_features(g.generator, cfg, data, rng, g.final_latent);
    // stitch the two phases into one monotone trace
    Trace merged = std::move(g.trace);
    merged.reserve(merged.size() + out.trace.size());
    for (const TraceRow& row : out.trace) {
      merged.push_back({row.step + cfg.steps_gft + 1, row.loss, row.reg});
    }
    out.trace = std::move(merged);
    out.generator = std::move(g.generator);
    return out;
  }
  if (cfg.method == "f-opt") {
    return train_f_opt(cfg, data, rng);
  }
  if (cfg.method == "nn" || cfg.method == "nn-noisy") {
    return train_nn(cfg, data, rng, cfg.method == "nn-noisy");
  }
  if (cfg.method == "fully-sampled") {
    GftResult g = train_fully_sampled(cfg, data, rng);
    TrainResult out{std::move(g.model), std::move(g.trace)};
    out.generator = std::move(g.generator);
    return out;
  }
  throw InvalidConfig("method '" + cfg.method +
                      "' does not produce a trainable model here");
}

}  // namespace gefet
