#include "gefet/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace gefet {

void check_dataset(const Dataset& data) {
  if (data.x.rows() == 0 || data.x.cols() == 0) {
    throw EmptyDataset("dataset has no rows or no input columns");
  }
  if (data.x.rows() != data.y.size()) {
    throw DimensionMismatch("input rows and target length differ");
  }
  if (!data.x.allFinite() || !data.y.allFinite()) {
    throw ParseError("dataset contains non-finite values");
  }
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box(
    const Eigen::MatrixXd& x) {
  return {x.colwise().minCoeff().transpose(),
          x.colwise().maxCoeff().transpose()};
}

Dataset subset(const Dataset& data, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), data.x.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = data.x.row(rows[i]);
    out.y(static_cast<Eigen::Index>(i)) = data.y(rows[i]);
  }
  out.normalization = data.normalization;
  return out;
}

std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, Rng& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Eigen::Index i = n - 1; i > 0; --i) {
    // uniform in {0..i}
    auto j = static_cast<Eigen::Index>(rng.next_u64() %
                                       static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

std::pair<Dataset, Dataset> split_train_val(const Dataset& data,
                                            double train_fraction, Rng& rng) {
  check_dataset(data);
  const Eigen::Index m = data.size();
  std::vector<Eigen::Index> idx = shuffled_indices(m, rng);
  auto cut = static_cast<Eigen::Index>(
      std::ceil(train_fraction * static_cast<double>(m)));
  cut = std::clamp<Eigen::Index>(cut, 1, m - 1);
  std::vector<Eigen::Index> head(idx.begin(), idx.begin() + cut);
  std::vector<Eigen::Index> tail(idx.begin() + cut, idx.end());
  return {subset(data, head), subset(data, tail)};
}

void normalize_inputs(Dataset& data, bool center_y) {
  check_dataset(data);
  Normalization norm;
  auto [lo, hi] = bounding_box(data.x);
  norm.x_min = lo;
  norm.x_max = hi;
  for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
    const double range = hi(j) - lo(j);
    if (range > 0.0) {
      data.x.col(j) = (data.x.col(j).array() - lo(j)) / range;
    } else {
      data.x.col(j).setConstant(0.5);
    }
  }
  if (center_y) {
    norm.y_mean = data.y.mean();
    norm.y_centered = true;
    data.y.array() -= norm.y_mean;
  }
  data.normalization = norm;
}

Eigen::MatrixXd apply_normalization(const Normalization& norm,
                                    const Eigen::MatrixXd& x) {
  if (x.cols() != norm.x_min.size()) {
    throw DimensionMismatch("normalization record width does not match input");
  }
  Eigen::MatrixXd out = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double range = norm.x_max(j) - norm.x_min(j);
    if (range > 0.0) {
      out.col(j) = (out.col(j).array() - norm.x_min(j)) / range;
    } else {
      out.col(j).setConstant(0.5);
    }
  }
  return out;
}

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  if (pred.size() != truth.size()) {
    throw DimensionMismatch("prediction and target lengths differ");
  }
  if (pred.size() == 0) return 0.0;
  return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

}  // namespace gefet
