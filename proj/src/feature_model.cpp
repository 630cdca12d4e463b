#include "gefet/feature_model.hpp"

#include <cmath>

namespace gefet {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// inner products <w_l, x_k> with the bias trick folded in when the
// activation calls for it and x arrives unpadded
Eigen::MatrixXd preactivations(const Eigen::MatrixXd& w,
                               const Eigen::MatrixXd& x, Activation act) {
  const Eigen::Index p = w.cols();
  if (uses_bias_trick(act)) {
    if (x.cols() == p) {
      return x * w.transpose();
    }
    if (x.cols() == p - 1) {
      Eigen::MatrixXd t = x * w.leftCols(p - 1).transpose();
      t.rowwise() += w.col(p - 1).transpose();
      return t;
    }
    throw DimensionMismatch("input width matches neither d nor d+1");
  }
  if (x.cols() != p) {
    throw DimensionMismatch("input width does not match feature width");
  }
  return x * w.transpose();
}
}  // namespace

namespace detail {

void sincos_2pi(const Eigen::MatrixXd& t, Eigen::MatrixXd& c,
                Eigen::MatrixXd& s) {
  c.resize(t.rows(), t.cols());
  s.resize(t.rows(), t.cols());
  const double* src = t.data();
  double* cd = c.data();
  double* sd = s.data();
  const Eigen::Index n = t.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    ::sincos(kTwoPi * src[i], &sd[i], &cd[i]);
  }
}

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& t) {
  return (1.0 + (-t.array()).exp()).inverse().matrix();
}

}  // namespace detail

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::kFourier: return "fourier";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kRelu: return "relu";
  }
  return "fourier";
}

Activation activation_from_name(const std::string& name) {
  if (name == "fourier") return Activation::kFourier;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "relu") return Activation::kRelu;
  throw ParseError("unknown activation '" + name +
                   "' (expected fourier, sigmoid, or relu)");
}

bool uses_bias_trick(Activation a) { return a != Activation::kFourier; }

Eigen::Index feature_width(Activation a, Eigen::Index d) {
  return uses_bias_trick(a) ? d + 1 : d;
}

Eigen::Index output_weight_length(Activation a, Eigen::Index n_features) {
  return a == Activation::kFourier ? 2 * n_features : n_features + 1;
}

void check_model(const TrainedModel& m) {
  if (m.d < 1 || m.w.rows() < 1) {
    throw DimensionMismatch("model needs d >= 1 and at least one feature");
  }
  if (m.w.cols() != feature_width(m.activation, m.d)) {
    throw DimensionMismatch("feature matrix width does not fit the activation");
  }
  if (m.beta.size() != output_weight_length(m.activation, m.w.rows())) {
    throw DimensionMismatch("output weight length does not fit the activation");
  }
  if (!m.w.allFinite() || !m.beta.allFinite()) {
    throw DimensionMismatch("model parameters must be finite");
  }
}

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& w,
                              const Eigen::MatrixXd& x, Activation act) {
  const Eigen::MatrixXd t = preactivations(w, x, act);
  const Eigen::Index m = t.rows();
  const Eigen::Index n = t.cols();
  switch (act) {
    case Activation::kFourier: {
      Eigen::MatrixXd a(m, 2 * n);
      Eigen::MatrixXd c, s;
      detail::sincos_2pi(t, c, s);
      a.leftCols(n) = c;
      a.rightCols(n) = s;
      return a;
    }
    case Activation::kSigmoid: {
      Eigen::MatrixXd a(m, n + 1);
      a.leftCols(n) = detail::sigmoid(t);
      a.col(n).setOnes();
      return a;
    }
    case Activation::kRelu: {
      Eigen::MatrixXd a(m, n + 1);
      a.leftCols(n) = t.cwiseMax(0.0);
      a.col(n).setOnes();
      return a;
    }
  }
  throw DimensionMismatch("unreachable activation");
}

Eigen::VectorXd predict(const TrainedModel& model, const Eigen::MatrixXd& x) {
  check_model(model);
  if (x.cols() != model.d) {
    throw DimensionMismatch("prediction input width does not match model d");
  }
  return design_matrix(model.w, x, model.activation) * model.beta;
}

// Per-sample coefficients c_{k,l} with grad f(x_k) = sum_l c_{k,l} w_l
// (bias coordinate dropped); shared by the single-point and batch paths.
static Eigen::MatrixXd gradient_coefficients(const TrainedModel& model,
                                             const Eigen::MatrixXd& t) {
  const Eigen::Index n = model.num_features();
  switch (model.activation) {
    case Activation::kFourier: {
      Eigen::MatrixXd c, s;
      detail::sincos_2pi(t, c, s);
      return kTwoPi *
             (s * (-model.beta.head(n)).asDiagonal() +
              c * model.beta.tail(n).asDiagonal());
    }
    case Activation::kSigmoid: {
      Eigen::ArrayXXd sig = detail::sigmoid(t).array();
      return ((sig * (1.0 - sig)).matrix() * model.beta.head(n).asDiagonal());
    }
    case Activation::kRelu: {
      return ((t.array() > 0.0).cast<double>().matrix() *
              model.beta.head(n).asDiagonal());
    }
  }
  throw DimensionMismatch("unreachable activation");
}

Eigen::MatrixXd spatial_gradient_batch(const TrainedModel& model,
                                       const Eigen::MatrixXd& x) {
  check_model(model);
  Eigen::MatrixXd t = preactivations(model.w, x, model.activation);
  Eigen::MatrixXd coef = gradient_coefficients(model, t);
  return coef * model.w.leftCols(model.d);
}

Eigen::VectorXd spatial_gradient(const TrainedModel& model,
                                 const Eigen::VectorXd& x) {
  return spatial_gradient_batch(model, x.transpose()).row(0).transpose();
}

Eigen::MatrixXd design_matrix_vjp_pre(const Eigen::MatrixXd& a,
                                      const Eigen::MatrixXd& x, Eigen::Index p,
                                      Activation act,
                                      const Eigen::MatrixXd& a_bar) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n =
      act == Activation::kFourier ? a.cols() / 2 : a.cols() - 1;
  if (a_bar.rows() != m || a_bar.cols() != a.cols()) {
    throw DimensionMismatch("cotangent shape does not match the design matrix");
  }

  // g = a_bar chained through dPhi/dt, per (sample, feature); each
  // derivative is written in terms of the stored Phi values
  Eigen::MatrixXd g;
  switch (act) {
    case Activation::kFourier: {
      // d cos = -2pi sin, d sin = 2pi cos; the blocks of a are cos | sin
      g = kTwoPi * (a_bar.rightCols(n).cwiseProduct(a.leftCols(n)) -
                    a_bar.leftCols(n).cwiseProduct(a.rightCols(n)));
      break;
    }
    case Activation::kSigmoid: {
      auto sig = a.leftCols(n).array();
      g = (a_bar.leftCols(n).array() * sig * (1.0 - sig)).matrix();
      break;
    }
    case Activation::kRelu: {
      // relu(t) > 0 iff t > 0, so the mask survives in the design values
      g = (a_bar.leftCols(n).array() *
           (a.leftCols(n).array() > 0.0).cast<double>())
              .matrix();
      break;
    }
  }

  if (x.cols() == p) {
    return g.transpose() * x;
  }
  if (uses_bias_trick(act) && x.cols() == p - 1) {
    Eigen::MatrixXd w_bar(n, p);
    w_bar.leftCols(p - 1).noalias() = g.transpose() * x;
    w_bar.col(p - 1) = g.colwise().sum().transpose();
    return w_bar;
  }
  throw DimensionMismatch("input width matches neither p nor p-1");
}

Eigen::MatrixXd design_matrix_vjp(const Eigen::MatrixXd& w,
                                  const Eigen::MatrixXd& x, Activation act,
                                  const Eigen::MatrixXd& a_bar) {
  return design_matrix_vjp_pre(design_matrix(w, x, act), x, w.cols(), act,
                               a_bar);
}

}  // namespace gefet
