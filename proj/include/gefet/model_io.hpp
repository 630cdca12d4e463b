#pragma once

#include <optional>
#include <string>

#include "gefet/dataset.hpp"
#include "gefet/feature_model.hpp"
#include "gefet/mlp.hpp"

namespace gefet {

// Everything a model file carries besides the model itself.
struct ModelMeta {
  double epsilon = 1e-7;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::optional<Normalization> normalization;
};

struct LoadedModel {
  TrainedModel model;
  ModelMeta meta;
  std::optional<MlpParams> generator;
};

// JSON, format 1. Three probe points with expected outputs are embedded;
// load re-evaluates them and rejects files whose stored parameters no
// longer reproduce the stored predictions.
void save_model(const std::string& path, const TrainedModel& model,
                const ModelMeta& meta,
                const std::optional<MlpParams>& generator = {});

LoadedModel load_model(const std::string& path);

// predictions on raw inputs, routed through the stored input scaling and
// target centering when present
Eigen::VectorXd predict_with_meta(const LoadedModel& loaded,
                                  const Eigen::MatrixXd& x);

}  // namespace gefet
