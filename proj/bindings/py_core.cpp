#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gefet/benchmark.hpp"
#include "gefet/model_io.hpp"
#include "gefet/test_functions.hpp"
#include "gefet/trainers.hpp"

namespace py = pybind11;

namespace {

Eigen::MatrixXd trace_matrix(const gefet::Trace& trace) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(trace.size()), 3);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const gefet::TraceRow& row = trace[static_cast<std::size_t>(i)];
    out(i, 0) = static_cast<double>(row.step);
    out(i, 1) = row.loss;
    out(i, 2) = row.reg;
  }
  return out;
}

gefet::Dataset make_dataset(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  gefet::Dataset data;
  data.x = x;
  data.y = y;
  gefet::check_dataset(data);
  return data;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "two-layer feature models trained through their closed-form output "
      "weights";

  py::register_exception<gefet::InvalidConfig>(m, "InvalidConfig",
                                               PyExc_ValueError);
  py::register_exception<gefet::ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<gefet::TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("method", &gefet::TrainConfig::method)
      .def_property(
          "activation",
          [](const gefet::TrainConfig& c) { return activation_name(c.activation); },
          [](gefet::TrainConfig& c, const std::string& name) {
            c.activation = gefet::activation_from_name(name);
          })
      .def_readwrite("n_features", &gefet::TrainConfig::n_features)
      .def_readwrite("lambda_", &gefet::TrainConfig::lambda)
      .def_readwrite("lambda_auto", &gefet::TrainConfig::lambda_auto)
      .def_readwrite("steps_gft", &gefet::TrainConfig::steps_gft)
      .def_readwrite("steps_refine", &gefet::TrainConfig::steps_refine)
      .def_readwrite("steps_nn", &gefet::TrainConfig::steps_nn)
      .def_readwrite("lr_gft", &gefet::TrainConfig::lr_gft)
      .def_readwrite("lr_nn", &gefet::TrainConfig::lr_nn)
      .def_readwrite("epsilon", &gefet::TrainConfig::epsilon)
      .def_readwrite("tv_samples", &gefet::TrainConfig::tv_samples)
      .def_readwrite("krr_ridge_scale", &gefet::TrainConfig::krr_ridge_scale)
      .def_readwrite("seed", &gefet::TrainConfig::seed)
      .def_readwrite("generator_hidden", &gefet::TrainConfig::generator_hidden)
      .def_readwrite("generator_depth", &gefet::TrainConfig::generator_depth);

  py::class_<gefet::TrainedModel>(m, "TrainedModel")
      .def(py::init<>())
      .def_property(
          "activation",
          [](const gefet::TrainedModel& mdl) {
            return activation_name(mdl.activation);
          },
          [](gefet::TrainedModel& mdl, const std::string& name) {
            mdl.activation = gefet::activation_from_name(name);
          })
      .def_readwrite("d", &gefet::TrainedModel::d)
      .def_readwrite("w", &gefet::TrainedModel::w)
      .def_readwrite("beta", &gefet::TrainedModel::beta)
      .def("num_features", &gefet::TrainedModel::num_features)
      .def("predict",
           [](const gefet::TrainedModel& mdl, const Eigen::MatrixXd& x) {
             return gefet::predict(mdl, x);
           })
      .def("spatial_gradient",
           [](const gefet::TrainedModel& mdl, const Eigen::MatrixXd& x) {
             return gefet::spatial_gradient_batch(mdl, x);
           });

  py::class_<gefet::TrainResult>(m, "TrainResult")
      .def_readonly("model", &gefet::TrainResult::model)
      .def_property_readonly(
          "trace",
          [](const gefet::TrainResult& r) { return trace_matrix(r.trace); })
      .def_property_readonly("has_generator", [](const gefet::TrainResult& r) {
        return r.generator.has_value();
      });

  m.def("test_function_names",
        []() { return gefet::test_function_names(); });

  m.def(
      "eval_test_function",
      [](const std::string& name, const Eigen::MatrixXd& x) {
        return gefet::eval_test_function_batch(name, x);
      },
      py::arg("name"), py::arg("x"));

  m.def(
      "generate_dataset",
      [](const std::string& name, Eigen::Index d, Eigen::Index m_train,
         Eigen::Index m_test, std::uint64_t seed) {
        auto [train, test] = gefet::generate_dataset(name, d, m_train, m_test, seed);
        return py::make_tuple(train.x, train.y, test.x, test.y);
      },
      py::arg("name"), py::arg("d"), py::arg("m_train"), py::arg("m_test"),
      py::arg("seed") = 0);

  m.def(
      "train",
      [](const gefet::TrainConfig& cfg, const Eigen::MatrixXd& x,
         const Eigen::VectorXd& y) {
        return gefet::train_any(cfg, make_dataset(x, y));
      },
      py::arg("config"), py::arg("x"), py::arg("y"),
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "select_lambda",
      [](const gefet::TrainConfig& cfg, const Eigen::MatrixXd& x,
         const Eigen::VectorXd& y) {
        return gefet::select_lambda_auto(cfg, make_dataset(x, y));
      },
      py::arg("config"), py::arg("x"), py::arg("y"),
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "kernel_ridge",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
         const Eigen::MatrixXd& x_test, double ridge) {
        return gefet::kernel_ridge(make_dataset(x, y), x_test, ridge);
      },
      py::arg("x"), py::arg("y"), py::arg("x_test"), py::arg("ridge"));

  m.def(
      "save_model",
      [](const std::string& path, const gefet::TrainedModel& model) {
        gefet::save_model(path, model, gefet::ModelMeta{});
      },
      py::arg("path"), py::arg("model"));

  m.def(
      "load_model",
      [](const std::string& path) { return gefet::load_model(path).model; },
      py::arg("path"));

  m.def(
      "run_experiment_json",
      [](const std::string& spec_json, int jobs) {
        gefet::ExperimentSpec spec =
            gefet::parse_experiment_spec(spec_json, "spec");
        return gefet::results_to_json(gefet::run_experiment(spec, jobs));
      },
      py::arg("spec_json"), py::arg("jobs") = 1,
      py::call_guard<py::gil_scoped_release>());
}
