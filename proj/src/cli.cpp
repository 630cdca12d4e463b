#include "gefet/cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "gefet/benchmark.hpp"
#include "gefet/csv.hpp"
#include "gefet/errors.hpp"
#include "gefet/model_io.hpp"
#include "gefet/test_functions.hpp"
#include "gefet/trainers.hpp"

namespace gefet {

namespace {

struct TrainFlags {
  TrainConfig cfg;
  std::string activation_text = "fourier";
  std::string lambda_text = "0";
  bool normalize = false;
  bool center_y = false;
  std::string data_path;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_lambda) {
  cmd->add_option("--data", f.data_path, "training data CSV (header x1,...,xd,y)")
      ->required();
  cmd->add_option("--method", f.cfg.method, "training method")
      ->check(CLI::IsMember(known_methods()));
  cmd->add_option("--activation", f.activation_text, "feature activation")
      ->check(CLI::IsMember({"fourier", "sigmoid", "relu"}));
  cmd->add_option("--n", f.cfg.n_features, "number of features");
  if (with_lambda) {
    cmd->add_option("--lambda", f.lambda_text,
                    "regularization weight, or 'auto' for the selection grid");
  }
  cmd->add_option("--steps-gft", f.cfg.steps_gft, "generator training steps");
  cmd->add_option("--steps-refine", f.cfg.steps_refine, "refinement steps");
  cmd->add_option("--steps-nn", f.cfg.steps_nn, "joint-training steps");
  cmd->add_option("--lr-gft", f.cfg.lr_gft,
                  "learning rate for generator training and refinement");
  cmd->add_option("--lr-nn", f.cfg.lr_nn, "learning rate for joint training");
  cmd->add_option("--epsilon", f.cfg.epsilon, "output-weight ridge");
  cmd->add_option("--tv-samples", f.cfg.tv_samples,
                  "Monte Carlo points per regularizer evaluation");
  cmd->add_option("--krr-ridge-scale", f.cfg.krr_ridge_scale,
                  "kernel ridge = scale * M");
  cmd->add_option("--generator-hidden", f.cfg.generator_hidden,
                  "generator hidden width");
  cmd->add_option("--generator-depth", f.cfg.generator_depth,
                  "generator hidden layer count");
  cmd->add_option("--seed", f.cfg.seed, "rng seed")->envname("GEFET_SEED");
  auto* norm = cmd->add_flag("--normalize", f.normalize,
                             "min-max scale inputs to [0,1] per column");
  cmd->add_flag("--center-y", f.center_y,
                "subtract the target mean (requires --normalize)")
      ->needs(norm);
}

// applies the string-typed flags onto the config; returns whether the
// lambda grid should run
bool resolve_config(TrainFlags& f) {
  f.cfg.activation = activation_from_name(f.activation_text);
  f.cfg.lambda_auto = false;
  if (f.lambda_text == "auto") {
    f.cfg.lambda = 0.0;
    return true;
  }
  const char* b = f.lambda_text.data();
  const char* e = b + f.lambda_text.size();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) {
    throw InvalidConfig("lambda must be a number or 'auto', got '" +
                        f.lambda_text + "'");
  }
  f.cfg.lambda = v;
  return false;
}

void check_function_dim(const std::string& name, Eigen::Index d) {
  const Eigen::Index min_d = test_function_min_dim(name);
  const bool exact = !name.empty() && name[0] == 'g';
  if (d < min_d || (exact && d != min_d)) {
    throw InvalidConfig("function '" + name + "' is not defined for d=" +
                        std::to_string(d));
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed while writing '" + path + "'");
}

struct SynthFlags {
  std::string function;
  Eigen::Index d = 0;
  Eigen::Index m_train = 300;
  Eigen::Index m_test = 300;
  std::uint64_t seed = 0;
  std::string out_train;
  std::string out_test;
};

int do_synth(const SynthFlags& f) {
  if (!is_test_function(f.function)) {
    throw InvalidConfig("unknown test function '" + f.function + "'");
  }
  const Eigen::Index d = f.d == 0 ? test_function_min_dim(f.function) : f.d;
  check_function_dim(f.function, d);
  if (f.m_train < 1 || f.m_test < 1) {
    throw InvalidConfig("sample counts must be at least 1");
  }
  auto [train, test] =
      generate_dataset(f.function, d, f.m_train, f.m_test, f.seed);
  const std::string out_train =
      f.out_train.empty() ? f.function + "_train.csv" : f.out_train;
  const std::string out_test =
      f.out_test.empty() ? f.function + "_test.csv" : f.out_test;
  save_csv(out_train, train.x, train.y);
  save_csv(out_test, test.x, test.y);
  std::cout << "wrote " << out_train << " (" << train.size() << " rows) and "
            << out_test << " (" << test.size() << " rows)\n";
  return 0;
}

int do_train(TrainFlags& f, const std::string& model_out,
             const std::string& trace_out) {
  const bool lambda_auto = resolve_config(f);
  if (f.cfg.method == "krr") {
    throw InvalidConfig(
        "method 'krr' fits no explicit feature model and cannot be saved; "
        "run it through the benchmark subcommand instead");
  }
  Dataset data = load_csv(f.data_path, f.normalize, f.center_y);
  if (lambda_auto) f.cfg.lambda = select_lambda_auto(f.cfg, data);
  TrainResult result = train_any(f.cfg, data);
  ModelMeta meta;
  meta.epsilon = f.cfg.epsilon;
  meta.lambda = f.cfg.lambda;
  meta.seed = f.cfg.seed;
  meta.normalization = data.normalization;
  save_model(model_out, result.model, meta, result.generator);
  if (!trace_out.empty()) save_trace_csv(trace_out, result.trace);
  const double train_mse = mse(predict(result.model, data.x), data.y);
  std::cout << "model " << model_out << "  lambda "
            << format_double(f.cfg.lambda) << "  train MSE "
            << format_double(train_mse) << "\n";
  return 0;
}

int do_predict(const std::string& model_path, const std::string& data_path,
               const std::string& out_path) {
  LoadedModel loaded = load_model(model_path);
  auto [data, has_y] = load_csv_maybe_targets(data_path);
  Eigen::VectorXd pred = predict_with_meta(loaded, data.x);
  save_predictions_csv(out_path, pred);
  std::cout << "predictions " << out_path << " (" << pred.size() << " rows)\n";
  if (has_y) std::cout << "MSE " << format_double(mse(pred, data.y)) << "\n";
  return 0;
}

int do_benchmark(const std::string& spec_path, const std::string& out_path,
                 const std::string& table_path, int jobs) {
  ExperimentSpec spec = load_experiment_spec(spec_path);
  ResultsTable table = run_experiment(spec, jobs);
  write_text_file(out_path, results_to_json(table) + "\n");
  const std::string text = results_to_text(table);
  if (!table_path.empty()) write_text_file(table_path, text);
  std::cout << text;
  return 0;
}

int do_dump_features(const std::string& model_path,
                     const std::string& out_path) {
  LoadedModel loaded = load_model(model_path);
  dump_features(loaded.model, out_path);
  std::cout << "features " << out_path << " ("
            << loaded.model.num_features() << " rows)\n";
  return 0;
}

int do_select_lambda(TrainFlags& f) {
  resolve_config(f);
  if (f.cfg.method == "krr") {
    throw InvalidConfig("method 'krr' takes no regularization weight");
  }
  Dataset data = load_csv(f.data_path, f.normalize, f.center_y);
  std::cout << format_double(select_lambda_auto(f.cfg, data)) << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"two-layer feature models trained through their closed-form "
               "output weights",
               "gefet"};
  app.require_subcommand(1);

  SynthFlags synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "sample a test function to train/test CSVs");
  synth_cmd->add_option("--function", synth.function, "test function name")
      ->required()
      ->check(CLI::IsMember(test_function_names()));
  synth_cmd->add_option(
      "--d", synth.d, "input dimension (default: smallest the function allows)");
  synth_cmd->add_option("--train", synth.m_train, "training rows");
  synth_cmd->add_option("--test", synth.m_test, "test rows");
  synth_cmd->add_option("--seed", synth.seed, "rng seed")->envname("GEFET_SEED");
  synth_cmd->add_option("--out-train", synth.out_train,
                        "training CSV path (default <function>_train.csv)");
  synth_cmd->add_option("--out-test", synth.out_test,
                        "test CSV path (default <function>_test.csv)");

  TrainFlags train;
  std::string model_out = "model.json";
  std::string trace_out;
  CLI::App* train_cmd =
      app.add_subcommand("train", "fit a model on a CSV dataset");
  add_train_flags(train_cmd, train, true);
  train_cmd->add_option("--model", model_out, "model JSON output path");
  train_cmd->add_option("--trace", trace_out, "per-step loss CSV output path");

  std::string predict_model;
  std::string predict_data;
  std::string predict_out = "predictions.csv";
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "evaluate a saved model on a CSV");
  predict_cmd->add_option("--model", predict_model, "model JSON path")
      ->required();
  predict_cmd
      ->add_option("--data", predict_data,
                   "input CSV (header x1,...,xd[,y]; prints MSE when y present)")
      ->required();
  predict_cmd->add_option("--out", predict_out, "predictions CSV path");

  std::string bench_spec;
  std::string bench_out = "results.json";
  std::string bench_table;
  int bench_jobs = 1;
  CLI::App* bench_cmd =
      app.add_subcommand("benchmark", "run a (method, N, seed) sweep");
  bench_cmd->add_option("--spec", bench_spec, "experiment spec JSON path")
      ->required();
  bench_cmd->add_option("--out", bench_out, "results JSON path");
  bench_cmd->add_option("--table", bench_table, "also write the text table here");
  bench_cmd->add_option("--jobs", bench_jobs, "worker threads for cells")
      ->check(CLI::PositiveNumber);

  std::string dump_model;
  std::string dump_out = "features.csv";
  CLI::App* dump_cmd = app.add_subcommand(
      "dump-features", "write (w, |b|) scatter rows for a saved model");
  dump_cmd->add_option("--model", dump_model, "model JSON path")->required();
  dump_cmd->add_option("--out", dump_out, "scatter CSV path");

  TrainFlags select;
  CLI::App* select_cmd = app.add_subcommand(
      "select-lambda", "run the regularization grid and print the pick");
  add_train_flags(select_cmd, select, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (synth_cmd->parsed()) return do_synth(synth);
    if (train_cmd->parsed()) return do_train(train, model_out, trace_out);
    if (predict_cmd->parsed())
      return do_predict(predict_model, predict_data, predict_out);
    if (bench_cmd->parsed())
      return do_benchmark(bench_spec, bench_out, bench_table, bench_jobs);
    if (dump_cmd->parsed()) return do_dump_features(dump_model, dump_out);
    if (select_cmd->parsed()) return do_select_lambda(select);
  } catch (const InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace gefet
