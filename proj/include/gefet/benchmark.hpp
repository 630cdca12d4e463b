#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gefet/dataset.hpp"
#include "gefet/feature_model.hpp"
#include "gefet/rng.hpp"
#include "gefet/trainers.hpp"

namespace gefet {

// One sweep description: a test function, data sizes, and the grid of
// (method, N) cells to run over a list of seeds.
struct ExperimentSpec {
  std::string function = "f1";
  Eigen::Index d = 5;
  Eigen::Index m_train = 300;
  Eigen::Index m_test = 300;
  std::vector<std::string> methods = {"gft-r"};
  std::vector<Eigen::Index> n_list = {100};
  std::string lambda_policy = "fixed";  // "fixed" or "auto"
  double lambda = 0.0;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  TrainConfig base;  // activation, budgets, learning rates, epsilon, ...
};

void check_experiment_spec(const ExperimentSpec& spec);

// JSON with the same field names as ExperimentSpec ("n" for the feature
// counts, "lambda" either a number or "auto"). Unknown keys are rejected.
ExperimentSpec parse_experiment_spec(const std::string& text,
                                     const std::string& origin = "spec");
ExperimentSpec load_experiment_spec(const std::string& path);
std::string experiment_spec_to_json(const ExperimentSpec& spec);

struct CellResult {
  std::string method;
  Eigen::Index n_features = 0;
  std::vector<std::uint64_t> seeds;     // seeds that produced an entry
  std::vector<double> per_seed_mse;     // one entry per successful seed
  std::vector<double> per_seed_lambda;  // resolved lambda per successful seed
  double mean_mse = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> errors;  // one message per failed seed
};

struct ResultsTable {
  ExperimentSpec spec;
  std::vector<CellResult> cells;  // method-major order, N within
};

const std::vector<double>& lambda_grid();

// 90/10 validation split (shuffle driven by rng); trains once per grid
// value with everything except lambda held fixed, so the comparison is
// paired, and returns the argmin of validation MSE. Exact ties go to the
// smaller candidate.
double select_lambda(const TrainConfig& cfg, const Dataset& train_data,
                     Rng& rng);

// Same selection with the split rng derived from cfg.seed, so a given
// (data, config, seed) picks the same value standalone and inside
// run_experiment.
double select_lambda_auto(const TrainConfig& cfg, const Dataset& train_data);

// Runs every (method, N, seed) combination. A failure in one cell is
// recorded in that cell's errors and does not stop the rest. jobs > 1
// fans cells out to a thread pool; results are merged by cell index, so
// the output does not depend on scheduling.
ResultsTable run_experiment(const ExperimentSpec& spec, int jobs = 1);

std::string results_to_json(const ResultsTable& table);
std::string results_to_text(const ResultsTable& table);

// Scatter rows (w coordinates..., |b_l|), header w1,...,wp,abs_b. Fourier
// weight pairs fold into a single magnitude; trailing output bias entries
// are not features and are excluded.
void dump_features(const TrainedModel& model, const std::string& path);

}  // namespace gefet
