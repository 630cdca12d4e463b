#pragma once

#include <string>
#include <vector>

#include "gefet/dataset.hpp"
#include "gefet/trainers.hpp"

namespace gefet {

// shortest decimal form that parses back to the same double
std::string format_double(double v);

// Header x1,...,xd,y. With normalize, inputs are min-max scaled to [0,1]
// per column (constant columns to 0.5) and the transform recorded; center_y
// additionally subtracts the target mean.
Dataset load_csv(const std::string& path, bool normalize = false,
                 bool center_y = false);

// Variant for prediction inputs: a trailing y column is optional. Returns
// the dataset and whether targets were present (y is zero-filled otherwise).
std::pair<Dataset, bool> load_csv_maybe_targets(const std::string& path);

void save_csv(const std::string& path, const Eigen::MatrixXd& x,
              const Eigen::VectorXd& y);

void save_predictions_csv(const std::string& path, const Eigen::VectorXd& pred);

void save_trace_csv(const std::string& path, const Trace& trace);

}  // namespace gefet
