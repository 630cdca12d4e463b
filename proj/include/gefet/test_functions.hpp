#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gefet/dataset.hpp"

namespace gefet {

// Names of the built-in regression targets.
const std::vector<std::string>& test_function_names();

bool is_test_function(const std::string& name);

// smallest input dimension the function is defined for (g1-g3 need exactly 2)
Eigen::Index test_function_min_dim(const std::string& name);

double eval_test_function(const std::string& name, const Eigen::VectorXd& x);

Eigen::VectorXd eval_test_function_batch(const std::string& name,
                                         const Eigen::MatrixXd& x);

// M_train + M_test iid uniform points on [0,1]^d, targets exact, train
// drawn first so the two sets never share an index.
std::pair<Dataset, Dataset> generate_dataset(const std::string& name,
                                             Eigen::Index d,
                                             Eigen::Index m_train,
                                             Eigen::Index m_test,
                                             std::uint64_t seed);

}  // namespace gefet
