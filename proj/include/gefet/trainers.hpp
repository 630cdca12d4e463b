#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gefet/dataset.hpp"
#include "gefet/feature_model.hpp"
#include "gefet/mlp.hpp"
#include "gefet/objective.hpp"
#include "gefet/rng.hpp"

namespace gefet {

struct TrainConfig {
  std::string method = "gft";  // gft gft-r f-opt nn nn-noisy fully-sampled krr
  Activation activation = Activation::kFourier;
  Eigen::Index n_features = 100;
  double lambda = 0.0;
  bool lambda_auto = false;
  long steps_gft = 40000;
  long steps_refine = 40000;
  long steps_nn = 100000;
  double lr_gft = 1e-4;
  double lr_nn = 1e-3;
  double epsilon = 1e-7;
  Eigen::Index tv_samples = 1000;
  double krr_ridge_scale = 1e-6;  // ridge = scale * M
  std::uint64_t seed = 0;
  Eigen::Index generator_hidden = 512;
  Eigen::Index generator_depth = 3;
};

void check_config(const TrainConfig& cfg);
const std::vector<std::string>& known_methods();

struct TraceRow {
  long step;
  double loss;
  double reg;
};
using Trace = std::vector<TraceRow>;

struct GftResult {
  MlpParams generator;
  TrainedModel model;
  Eigen::MatrixXd final_latent;  // the z whose push-forward is the model
  Trace trace;
};

struct TrainResult {
  TrainedModel model;
  Trace trace;
  std::optional<MlpParams> generator;  // present for generator-based methods
};

// Generative phase: one latent sample per Adam step on the generator, loss
// through the closed-form output weights. The returned model is a fresh
// sample from the trained generator.
GftResult train_gft(const TrainConfig& cfg, const Dataset& data, Rng& rng);

// Latent refinement: Adam directly on z -> loss(G(z)), starting from z0
// when given (the pipeline hands over the generative phase's final sample)
// or from a fresh draw otherwise. steps_refine = 0 with z0 returns exactly
// the push-forward model of z0.
TrainResult refine_features(const MlpParams& generator, const TrainConfig& cfg,
                            const Dataset& data, Rng& rng,
                            const std::optional<Eigen::MatrixXd>& z0 = {});

// Gradient descent on the reduced loss from Gaussian-initialized features.
TrainResult train_f_opt(const TrainConfig& cfg, const Dataset& data, Rng& rng);

// Joint first-order training of (W, beta) with beta free. noisy switches to
// SGD with Gaussian perturbations (scale 0.1 * lr) instead of Adam.
TrainResult train_nn(const TrainConfig& cfg, const Dataset& data, Rng& rng,
                     bool noisy);

// Generator emits whole (w, Re b, Im b) rows; empirical risk trained
// directly, no solve. Fourier only.
GftResult train_fully_sampled(const TrainConfig& cfg, const Dataset& data,
                              Rng& rng);

// Gaussian-kernel ridge regression with the median-distance bandwidth.
// Returns predictions at x_test rather than a model.
Eigen::VectorXd kernel_ridge(const Dataset& train, const Eigen::MatrixXd& x_test,
                             double ridge);

// Median of all pairwise Euclidean distances.
double median_pairwise_distance(const Eigen::MatrixXd& x);

// Dispatch on cfg.method (krr excluded: it has no model form). gft-r wires
// train_gft's final sample into refine_features so that refinement truly
// starts where sampling ended.
TrainResult train_any(const TrainConfig& cfg, const Dataset& data);

}  // namespace gefet
