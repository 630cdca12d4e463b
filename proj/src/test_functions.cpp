#include "gefet/test_functions.hpp"

#include <cmath>

namespace gefet {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

double eval_g(double u, double v) {
  return std::sin(4.0 * kPi * u * u + 1.0) +
         std::cos(4.0 * kPi * (std::pow(v, 4) + v));
}
}  // namespace

const std::vector<std::string>& test_function_names() {
  static const std::vector<std::string> names = {"f1", "f2", "f3", "h1", "h2",
                                                 "h3", "g1", "g2", "g3"};
  return names;
}

bool is_test_function(const std::string& name) {
  for (const auto& n : test_function_names()) {
    if (n == name) return true;
  }
  return false;
}

Eigen::Index test_function_min_dim(const std::string& name) {
  if (name == "f1") return 4;
  if (name == "f2") return 3;
  if (name == "f3" || name == "h3") return 5;
  if (name == "h1" || name == "h2") return 1;
  if (name == "g1" || name == "g2" || name == "g3") return 2;
  throw ParseError("unknown test function '" + name + "'");
}

double eval_test_function(const std::string& name, const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  if (d < test_function_min_dim(name)) {
    throw DimensionMismatch("function " + name + " needs d >= " +
                            std::to_string(test_function_min_dim(name)));
  }
  if (name == "f1") {
    return x(3) * x(3) + x(1) * x(2) + x(0) * x(1) + x(3);
  }
  if (name == "f2") {
    return std::sin(x(0)) + 7.0 * std::sin(x(1)) * std::sin(x(1)) +
           0.1 * std::pow(x(2), 4) * std::sin(x(0));
  }
  if (name == "f3") {
    return 10.0 * std::sin(kPi * x(0) * x(1)) +
           20.0 * (x(2) - 0.5) * (x(2) - 0.5) + 10.0 * x(3) + 5.0 * x(4);
  }
  if (name == "h1") {
    return std::sin(x.sum()) + x.squaredNorm();
  }
  if (name == "h2") {
    return std::sqrt((x.array() - 0.5).abs().sum());
  }
  if (name == "h3") {
    return std::sqrt(eval_test_function("f3", x));
  }
  if (name == "g1" || name == "g2" || name == "g3") {
    if (d != 2) {
      throw DimensionMismatch("g functions are defined on R^2 only");
    }
    double u = x(0), v = x(1);
    if (name == "g2") {
      const double c = std::sqrt(0.5);  // rotation by pi/4
      u = c * x(0) - c * x(1);
      v = c * x(0) + c * x(1);
    } else if (name == "g3") {
      u = x(0) + 0.3 * x(1);
      v = 0.3 * x(0) + x(1);
    }
    return eval_g(u, v);
  }
  throw ParseError("unknown test function '" + name + "'");
}

Eigen::VectorXd eval_test_function_batch(const std::string& name,
                                         const Eigen::MatrixXd& x) {
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    y(i) = eval_test_function(name, x.row(i).transpose());
  }
  return y;
}

std::pair<Dataset, Dataset> generate_dataset(const std::string& name,
                                             Eigen::Index d,
                                             Eigen::Index m_train,
                                             Eigen::Index m_test,
                                             std::uint64_t seed) {
  if (m_train < 1 || m_test < 0) {
    throw InvalidConfig("need at least one training sample");
  }
  if (d < test_function_min_dim(name)) {
    throw DimensionMismatch("function " + name + " needs d >= " +
                            std::to_string(test_function_min_dim(name)));
  }
  if ((name == "g1" || name == "g2" || name == "g3") && d != 2) {
    throw DimensionMismatch("g functions are defined on R^2 only");
  }
  Rng rng(seed);
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd hi = Eigen::VectorXd::Ones(d);
  Dataset train, test;
  train.x = rng.uniform_matrix(m_train, d, lo, hi);
  test.x = rng.uniform_matrix(m_test, d, lo, hi);
  train.y = eval_test_function_batch(name, train.x);
  test.y = eval_test_function_batch(name, test.x);
  return {std::move(train), std::move(test)};
}

}  // namespace gefet
