#include "gefet/benchmark.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "gefet/csv.hpp"
#include "gefet/errors.hpp"
#include "gefet/test_functions.hpp"

namespace gefet {

namespace {

using nlohmann::json;

constexpr std::uint64_t kLambdaSplitStream = 0x6c616d626461ull;

bool needs_exact_dim(const std::string& name) {
  return !name.empty() && name[0] == 'g';
}

}  // namespace

const std::vector<double>& lambda_grid() {
  static const std::vector<double> grid = {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  return grid;
}

void check_experiment_spec(const ExperimentSpec& spec) {
  if (!is_test_function(spec.function)) {
    throw InvalidConfig("unknown test function '" + spec.function + "'");
  }
  const Eigen::Index min_d = test_function_min_dim(spec.function);
  if (spec.d < min_d || (needs_exact_dim(spec.function) && spec.d != min_d)) {
    throw InvalidConfig("function '" + spec.function + "' is not defined for d=" +
                        std::to_string(spec.d));
  }
  if (spec.m_train < 1 || spec.m_test < 1) {
    throw InvalidConfig("m_train and m_test must be at least 1");
  }
  if (spec.methods.empty()) throw InvalidConfig("methods list is empty");
  for (const std::string& m : spec.methods) {
    const auto& known = known_methods();
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      throw InvalidConfig("unknown method '" + m + "'");
    }
  }
  if (spec.n_list.empty()) throw InvalidConfig("feature count list is empty");
  for (Eigen::Index n : spec.n_list) {
    if (n < 1) throw InvalidConfig("feature counts must be at least 1");
  }
  if (spec.seeds.empty()) throw InvalidConfig("seeds list is empty");
  if (spec.lambda_policy != "fixed" && spec.lambda_policy != "auto") {
    throw InvalidConfig("lambda policy must be 'fixed' or 'auto'");
  }
  if (!(spec.lambda >= 0.0) || !std::isfinite(spec.lambda)) {
    throw InvalidConfig("lambda must be finite and nonnegative");
  }
}

ExperimentSpec parse_experiment_spec(const std::string& text,
                                     const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError(origin + ": spec must be an object");

  ExperimentSpec spec;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "function") {
        spec.function = value.get<std::string>();
      } else if (key == "d") {
        spec.d = value.get<Eigen::Index>();
      } else if (key == "m_train") {
        spec.m_train = value.get<Eigen::Index>();
      } else if (key == "m_test") {
        spec.m_test = value.get<Eigen::Index>();
      } else if (key == "methods") {
        spec.methods.clear();
        if (value.is_string()) {
          spec.methods.push_back(value.get<std::string>());
        } else {
          for (const json& m : value) spec.methods.push_back(m.get<std::string>());
        }
      } else if (key == "n") {
        spec.n_list.clear();
        if (value.is_number()) {
          spec.n_list.push_back(value.get<Eigen::Index>());
        } else {
          for (const json& n : value) spec.n_list.push_back(n.get<Eigen::Index>());
        }
      } else if (key == "lambda") {
        if (value.is_string()) {
          if (value.get<std::string>() != "auto") {
            throw ParseError(origin + ": lambda must be a number or \"auto\"");
          }
          spec.lambda_policy = "auto";
          spec.lambda = 0.0;
        } else {
          spec.lambda_policy = "fixed";
          spec.lambda = value.get<double>();
        }
      } else if (key == "seeds") {
        spec.seeds.clear();
        for (const json& s : value) spec.seeds.push_back(s.get<std::uint64_t>());
      } else if (key == "activation") {
        spec.base.activation = activation_from_name(value.get<std::string>());
      } else if (key == "steps_gft") {
        spec.base.steps_gft = value.get<long>();
      } else if (key == "steps_refine") {
        spec.base.steps_refine = value.get<long>();
      } else if (key == "steps_nn") {
        spec.base.steps_nn = value.get<long>();
      } else if (key == "lr_gft") {
        spec.base.lr_gft = value.get<double>();
      } else if (key == "lr_nn") {
        spec.base.lr_nn = value.get<double>();
      } else if (key == "epsilon") {
        spec.base.epsilon = value.get<double>();
      } else if (key == "tv_samples") {
        spec.base.tv_samples = value.get<Eigen::Index>();
      } else if (key == "krr_ridge_scale") {
        spec.base.krr_ridge_scale = value.get<double>();
      } else if (key == "generator_hidden") {
        spec.base.generator_hidden = value.get<Eigen::Index>();
      } else if (key == "generator_depth") {
        spec.base.generator_depth = value.get<Eigen::Index>();
      } else {
        throw ParseError(origin + ": unknown field '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  check_experiment_spec(spec);
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec(buf.str(), path);
}

std::string experiment_spec_to_json(const ExperimentSpec& spec) {
  json doc;
  doc["function"] = spec.function;
  doc["d"] = spec.d;
  doc["m_train"] = spec.m_train;
  doc["m_test"] = spec.m_test;
  doc["methods"] = spec.methods;
  doc["n"] = spec.n_list;
  if (spec.lambda_policy == "auto") {
    doc["lambda"] = "auto";
  } else {
    doc["lambda"] = spec.lambda;
  }
  doc["seeds"] = spec.seeds;
  doc["activation"] = activation_name(spec.base.activation);
  doc["steps_gft"] = spec.base.steps_gft;
  doc["steps_refine"] = spec.base.steps_refine;
  doc["steps_nn"] = spec.base.steps_nn;
  doc["lr_gft"] = spec.base.lr_gft;
  doc["lr_nn"] = spec.base.lr_nn;
  doc["epsilon"] = spec.base.epsilon;
  doc["tv_samples"] = spec.base.tv_samples;
  doc["krr_ridge_scale"] = spec.base.krr_ridge_scale;
  doc["generator_hidden"] = spec.base.generator_hidden;
  doc["generator_depth"] = spec.base.generator_depth;
  return doc.dump(2);
}

double select_lambda(const TrainConfig& cfg, const Dataset& train_data,
                     Rng& rng) {
  auto [fit, val] = split_train_val(train_data, 0.9, rng);
  double best_lambda = lambda_grid().front();
  double best_mse = std::numeric_limits<double>::infinity();
  for (double lam : lambda_grid()) {
    TrainConfig candidate = cfg;
    candidate.lambda = lam;
    candidate.lambda_auto = false;
    TrainResult result = train_any(candidate, fit);
    const double val_mse = mse(predict(result.model, val.x), val.y);
    if (val_mse < best_mse) {
      best_mse = val_mse;
      best_lambda = lam;
    }
  }
  return best_lambda;
}

double select_lambda_auto(const TrainConfig& cfg, const Dataset& train_data) {
  Rng split_rng = Rng(cfg.seed).spawn(kLambdaSplitStream);
  return select_lambda(cfg, train_data, split_rng);
}

namespace {

struct SeedOutcome {
  bool ok = false;
  double test_mse = 0.0;
  double lambda = 0.0;
  std::string error;
};

SeedOutcome run_one_seed(const ExperimentSpec& spec, const std::string& method,
                         Eigen::Index n, std::uint64_t seed) {
  SeedOutcome out;
  try {
    auto [train, test] =
        generate_dataset(spec.function, spec.d, spec.m_train, spec.m_test, seed);
    TrainConfig cfg = spec.base;
    cfg.method = method;
    cfg.n_features = n;
    cfg.seed = seed;
    cfg.lambda = spec.lambda;
    cfg.lambda_auto = false;
    if (spec.lambda_policy == "auto" && method != "krr") {
      cfg.lambda = select_lambda_auto(cfg, train);
    }
    if (method == "krr") {
      const double ridge =
          cfg.krr_ridge_scale * static_cast<double>(train.size());
      out.test_mse = mse(kernel_ridge(train, test.x, ridge), test.y);
    } else {
      TrainResult result = train_any(cfg, train);
      out.test_mse = mse(predict(result.model, test.x), test.y);
    }
    out.lambda = cfg.lambda;
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

CellResult run_cell(const ExperimentSpec& spec, const std::string& method,
                    Eigen::Index n) {
  CellResult cell;
  cell.method = method;
  cell.n_features = n;
  for (std::uint64_t seed : spec.seeds) {
    SeedOutcome outcome = run_one_seed(spec, method, n, seed);
    if (outcome.ok) {
      cell.seeds.push_back(seed);
      cell.per_seed_mse.push_back(outcome.test_mse);
      cell.per_seed_lambda.push_back(outcome.lambda);
    } else {
      cell.errors.push_back("seed " + std::to_string(seed) + ": " +
                            outcome.error);
    }
  }
  if (!cell.per_seed_mse.empty()) {
    cell.mean_mse =
        std::accumulate(cell.per_seed_mse.begin(), cell.per_seed_mse.end(),
                        0.0) /
        static_cast<double>(cell.per_seed_mse.size());
  }
  return cell;
}

}  // namespace

ResultsTable run_experiment(const ExperimentSpec& spec, int jobs) {
  check_experiment_spec(spec);
  ResultsTable table;
  table.spec = spec;

  struct CellKey {
    std::string method;
    Eigen::Index n;
  };
  std::vector<CellKey> keys;
  for (const std::string& method : spec.methods) {
    for (Eigen::Index n : spec.n_list) keys.push_back({method, n});
  }
  table.cells.resize(keys.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < keys.size();
         i = next.fetch_add(1)) {
      table.cells[i] = run_cell(spec, keys[i].method, keys[i].n);
    }
  };

  const int pool_size =
      std::min<int>(std::max(jobs, 1), static_cast<int>(keys.size()));
  if (pool_size <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(pool_size);
    for (int i = 0; i < pool_size; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return table;
}

std::string results_to_json(const ResultsTable& table) {
  json doc;
  doc["spec"] = json::parse(experiment_spec_to_json(table.spec));
  json cells = json::array();
  for (const CellResult& cell : table.cells) {
    json c;
    c["method"] = cell.method;
    c["n"] = cell.n_features;
    c["seeds"] = cell.seeds;
    c["mse"] = cell.per_seed_mse;
    c["lambda"] = cell.per_seed_lambda;
    c["mean_mse"] = cell.mean_mse;  // NaN serializes as null
    c["errors"] = cell.errors;
    cells.push_back(c);
  }
  doc["cells"] = cells;
  return doc.dump(2);
}

std::string results_to_text(const ResultsTable& table) {
  const ExperimentSpec& spec = table.spec;
  std::ostringstream out;
  out << "function " << spec.function << "  d " << spec.d << "  train "
      << spec.m_train << "  test " << spec.m_test << "  activation "
      << activation_name(spec.base.activation) << "  lambda ";
  if (spec.lambda_policy == "auto") {
    out << "auto";
  } else {
    out << format_double(spec.lambda);
  }
  out << "\n";

  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-14s %7s %13s  %s", "method", "N",
                "mean MSE", "per-seed MSE");
  out << buf << "\n";
  for (const CellResult& cell : table.cells) {
    if (cell.per_seed_mse.empty()) {
      std::snprintf(buf, sizeof(buf), "%-14s %7lld %13s", cell.method.c_str(),
                    static_cast<long long>(cell.n_features), "-");
    } else {
      std::snprintf(buf, sizeof(buf), "%-14s %7lld %13.4e ",
                    cell.method.c_str(),
                    static_cast<long long>(cell.n_features), cell.mean_mse);
    }
    out << buf;
    for (std::size_t i = 0; i < cell.per_seed_mse.size(); ++i) {
      std::snprintf(buf, sizeof(buf), " %.3e", cell.per_seed_mse[i]);
      out << buf;
    }
    if (spec.lambda_policy == "auto" && !cell.per_seed_lambda.empty()) {
      out << "  lambda";
      for (double lam : cell.per_seed_lambda) {
        out << " " << format_double(lam);
      }
    }
    out << "\n";
    for (const std::string& err : cell.errors) {
      out << "    ! " << err << "\n";
    }
  }
  return out.str();
}

void dump_features(const TrainedModel& model, const std::string& path) {
  check_model(model);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const Eigen::Index p = model.w.cols();
  const Eigen::Index n = model.num_features();
  for (Eigen::Index j = 0; j < p; ++j) {
    out << "w" << (j + 1) << ",";
  }
  out << "abs_b\n";
  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index j = 0; j < p; ++j) {
      out << format_double(model.w(l, j)) << ",";
    }
    const double magnitude =
        model.activation == Activation::kFourier
            ? std::hypot(model.beta(l), model.beta(n + l))
            : std::abs(model.beta(l));
    out << format_double(magnitude) << "\n";
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace gefet
