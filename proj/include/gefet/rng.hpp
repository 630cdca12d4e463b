#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace gefet {

// Deterministic random source. Every piece of randomness in the library is
// drawn through this class with explicitly coded transforms (no
// std::*_distribution), so a seed pins the whole stream bit-for-bit.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // uniform on [0, 1)
  double uniform();
  double uniform(double lo, double hi);

  // standard normal via Box-Muller, one spare cached
  double normal();

  Eigen::VectorXd normal_vector(Eigen::Index n);
  // filled row by row
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);
  Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols,
                                 const Eigen::VectorXd& lo,
                                 const Eigen::VectorXd& hi);

  // statistically independent child stream
  Rng spawn(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// 64-bit mixing for deriving substream seeds
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace gefet
