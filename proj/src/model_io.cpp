#include "gefet/model_io.hpp"

#include <fstream>

#include "json.hpp"

#include "gefet/rng.hpp"

namespace gefet {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr std::uint64_t kProbeSeed = 0x70726f6265ull;  // fixed probe stream
constexpr int kProbeCount = 3;

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

json matrix_to_json_row_major(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  }
  return arr;
}

Eigen::MatrixXd matrix_from_json_row_major(const json& arr, Eigen::Index rows,
                                           Eigen::Index cols) {
  if (static_cast<Eigen::Index>(arr.size()) != rows * cols) {
    throw ParseError("matrix entry count does not match its stated shape");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = arr[k++].get<double>();
  }
  return m;
}

Eigen::MatrixXd probe_points(Eigen::Index d) {
  Rng rng(kProbeSeed);
  return rng.uniform_matrix(kProbeCount, d, Eigen::VectorXd::Zero(d),
                            Eigen::VectorXd::Ones(d));
}

}  // namespace

void save_model(const std::string& path, const TrainedModel& model,
                const ModelMeta& meta,
                const std::optional<MlpParams>& generator) {
  check_model(model);
  json doc;
  doc["format"] = kFormatVersion;
  doc["activation"] = activation_name(model.activation);
  doc["d"] = model.d;
  doc["n_features"] = model.num_features();
  doc["bias_trick"] = uses_bias_trick(model.activation);
  doc["output_bias"] = uses_bias_trick(model.activation);
  doc["w"] = matrix_to_json_row_major(model.w);
  doc["beta"] = vector_to_json(model.beta);
  doc["epsilon"] = meta.epsilon;
  doc["lambda"] = meta.lambda;
  doc["seed"] = meta.seed;
  if (meta.normalization) {
    json norm;
    norm["x_min"] = vector_to_json(meta.normalization->x_min);
    norm["x_max"] = vector_to_json(meta.normalization->x_max);
    norm["y_mean"] = meta.normalization->y_mean;
    norm["y_centered"] = meta.normalization->y_centered;
    doc["normalization"] = norm;
  }
  if (generator) {
    json gen;
    gen["sizes"] = json::array();
    for (Eigen::Index s : generator->sizes()) gen["sizes"].push_back(s);
    gen["theta"] = vector_to_json(generator->theta());
    doc["generator"] = gen;
  }

  Eigen::MatrixXd px = probe_points(model.d);
  Eigen::VectorXd py = predict(model, px);
  json probes = json::array();
  for (int i = 0; i < kProbeCount; ++i) {
    json probe;
    probe["x"] = vector_to_json(px.row(i).transpose());
    probe["y"] = py(i);
    probes.push_back(probe);
  }
  doc["probes"] = probes;

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("failed while writing '" + path + "'");
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }

  try {
    if (!doc.contains("format")) {
      throw VersionMismatch(path + ": missing format field");
    }
    if (doc["format"].get<int>() != kFormatVersion) {
      throw VersionMismatch(path + ": unsupported format " +
                            doc["format"].dump() + " (expected " +
                            std::to_string(kFormatVersion) + ")");
    }

    LoadedModel out;
    out.model.activation = activation_from_name(doc["activation"].get<std::string>());
    out.model.d = doc["d"].get<Eigen::Index>();
    const auto n = doc["n_features"].get<Eigen::Index>();
    out.model.w = matrix_from_json_row_major(
        doc["w"], n, feature_width(out.model.activation, out.model.d));
    out.model.beta = vector_from_json(doc["beta"]);
    check_model(out.model);

    out.meta.epsilon = doc["epsilon"].get<double>();
    out.meta.lambda = doc["lambda"].get<double>();
    out.meta.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("normalization")) {
      const json& norm = doc["normalization"];
      Normalization record;
      record.x_min = vector_from_json(norm["x_min"]);
      record.x_max = vector_from_json(norm["x_max"]);
      record.y_mean = norm["y_mean"].get<double>();
      record.y_centered = norm["y_centered"].get<bool>();
      out.meta.normalization = record;
    }
    if (doc.contains("generator")) {
      const json& gen = doc["generator"];
      std::vector<Eigen::Index> sizes;
      for (const json& s : gen["sizes"]) sizes.push_back(s.get<Eigen::Index>());
      MlpParams params(sizes);
      Eigen::VectorXd theta = vector_from_json(gen["theta"]);
      if (theta.size() != params.theta().size()) {
        throw ParseError(path + ": generator parameter count is wrong");
      }
      params.theta() = theta;
      out.generator = std::move(params);
    }

    const json& probes = doc["probes"];
    if (probes.size() != static_cast<std::size_t>(kProbeCount)) {
      throw ChecksumMismatch(path + ": expected " +
                             std::to_string(kProbeCount) + " probe points");
    }
    for (const json& probe : probes) {
      Eigen::VectorXd px = vector_from_json(probe["x"]);
      const double want = probe["y"].get<double>();
      const double got = predict(out.model, px.transpose())(0);
      if (!(std::abs(got - want) <= 1e-12 * (1.0 + std::abs(want)))) {
        throw ChecksumMismatch(
            path + ": stored parameters do not reproduce probe predictions");
      }
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Eigen::VectorXd predict_with_meta(const LoadedModel& loaded,
                                  const Eigen::MatrixXd& x) {
  Eigen::MatrixXd inputs = x;
  if (loaded.meta.normalization) {
    inputs = apply_normalization(*loaded.meta.normalization, x);
  }
  Eigen::VectorXd pred = predict(loaded.model, inputs);
  if (loaded.meta.normalization && loaded.meta.normalization->y_centered) {
    pred.array() += loaded.meta.normalization->y_mean;
  }
  return pred;
}

}  // namespace gefet
