#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gefet/errors.hpp"
#include "gefet/rng.hpp"

namespace gefet {

// Input scaling applied at load time, kept so predictions on new data can
// reuse the exact transform.
struct Normalization {
  Eigen::VectorXd x_min;
  Eigen::VectorXd x_max;
  double y_mean = 0.0;
  bool y_centered = false;
};

struct Dataset {
  Eigen::MatrixXd x;  // M x d
  Eigen::VectorXd y;  // M
  std::optional<Normalization> normalization;

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
};

void check_dataset(const Dataset& data);

// entrywise min/max of the inputs
std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box(
    const Eigen::MatrixXd& x);

Dataset subset(const Dataset& data, const std::vector<Eigen::Index>& rows);

// Deterministic Fisher-Yates shuffle of 0..n-1 driven by the rng.
std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, Rng& rng);

// Shuffled split; the first ceil(train_fraction * M) rows become the
// training part.
std::pair<Dataset, Dataset> split_train_val(const Dataset& data,
                                            double train_fraction, Rng& rng);

// Min-max scale columns to [0,1] in place, recording the transform.
// Constant columns map to 0.5. Optionally centers y.
void normalize_inputs(Dataset& data, bool center_y);

// Apply a stored transform to fresh inputs.
Eigen::MatrixXd apply_normalization(const Normalization& norm,
                                    const Eigen::MatrixXd& x);

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

}  // namespace gefet
