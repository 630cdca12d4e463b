#include "gefet/objective.hpp"

#include <cmath>

namespace gefet {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

Eigen::MatrixXd pad_ones(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.cols() + 1);
  out.leftCols(x.cols()) = x;
  out.col(x.cols()).setOnes();
  return out;
}
}  // namespace

Objective::Objective(const Dataset& data, Activation act, double epsilon,
                     double lambda, Eigen::Index tv_samples)
    : act_(act),
      epsilon_(epsilon),
      lambda_(lambda),
      tv_samples_(tv_samples),
      d_(data.dim()) {
  check_dataset(data);
  if (epsilon_ <= 0.0) throw InvalidConfig("epsilon must be positive");
  if (lambda_ < 0.0) throw InvalidConfig("lambda must be nonnegative");
  if (lambda_ > 0.0 && tv_samples_ < 1) {
    throw InvalidConfig("a positive lambda needs at least one TV sample");
  }
  x_ = uses_bias_trick(act_) ? pad_ones(data.x) : data.x;
  y_ = data.y;
  std::tie(box_min_, box_max_) = bounding_box(data.x);
}

std::pair<Eigen::VectorXd, SolveTape> Objective::optimal_output_weights(
    const Eigen::MatrixXd& w) const {
  Eigen::MatrixXd a = design_matrix(w, x_, act_);
  return solve_regularized_ls(a, y_, epsilon_);
}

double Objective::reduced_loss(const Eigen::MatrixXd& w) const {
  auto [beta, tape] = optimal_output_weights(w);
  return (y_ - tape.design * beta).squaredNorm();
}

std::pair<double, Eigen::MatrixXd> Objective::reduced_loss_grad(
    const Eigen::MatrixXd& w) const {
  ObjectiveEval eval = value_and_grad_at(w, std::nullopt);
  return {eval.loss, std::move(eval.w_grad)};
}

Eigen::MatrixXd Objective::draw_tv_points(Rng& rng) const {
  return rng.uniform_matrix(tv_samples_, d_, box_min_, box_max_);
}

// Everything the TV term needs at the sample points: pre-activations and the
// per-(sample, feature) coefficients c with grad f(x_m) = sum_l c_{m,l} w_l.
namespace {
struct TvTables {
  Eigen::MatrixXd xs;    // samples, padded when the activation pads
  Eigen::MatrixXd cos_t; // Fourier only
  Eigen::MatrixXd sin_t; // Fourier only
  Eigen::MatrixXd phi;   // sigmoid values / relu mask
  Eigen::MatrixXd coef;  // S x N
};

TvTables tv_tables(Activation act, const Eigen::MatrixXd& w,
                   const Eigen::VectorXd& beta,
                   const Eigen::MatrixXd& points) {
  const Eigen::Index n = w.rows();
  TvTables tb;
  tb.xs = uses_bias_trick(act) ? pad_ones(points) : points;
  if (tb.xs.cols() != w.cols()) {
    throw DimensionMismatch("TV sample width does not match feature width");
  }
  Eigen::MatrixXd t = tb.xs * w.transpose();
  switch (act) {
    case Activation::kFourier:
      detail::sincos_2pi(t, tb.cos_t, tb.sin_t);
      tb.coef = kTwoPi * (tb.cos_t * beta.tail(n).asDiagonal() -
                          tb.sin_t * beta.head(n).asDiagonal());
      break;
    case Activation::kSigmoid: {
      tb.phi = detail::sigmoid(t);  // sigma; sigma' and sigma'' derive from it
      tb.coef = (tb.phi.array() * (1.0 - tb.phi.array())).matrix() *
                beta.head(n).asDiagonal();
      break;
    }
    case Activation::kRelu:
      tb.phi = (t.array() > 0.0).cast<double>().matrix();
      tb.coef = tb.phi * beta.head(n).asDiagonal();
      break;
  }
  return tb;
}
}  // namespace

double Objective::tv_regularizer_at(const Eigen::MatrixXd& w,
                                    const Eigen::VectorXd& beta,
                                    const Eigen::MatrixXd& points) const {
  TvTables tb = tv_tables(act_, w, beta, points);
  Eigen::MatrixXd grads = tb.coef * w.leftCols(d_);
  return grads.cwiseAbs().sum() / static_cast<double>(points.rows());
}

double Objective::tv_regularizer(const Eigen::MatrixXd& w,
                                 const Eigen::VectorXd& beta, Rng& rng) const {
  return tv_regularizer_at(w, beta, draw_tv_points(rng));
}

TvEval Objective::tv_regularizer_grad_parts(const Eigen::MatrixXd& w,
                                            const Eigen::VectorXd& beta,
                                            const Eigen::MatrixXd& points) const {
  const Eigen::Index n = w.rows();
  const Eigen::Index p = w.cols();
  const double inv_s = 1.0 / static_cast<double>(points.rows());

  TvTables tb = tv_tables(act_, w, beta, points);
  Eigen::MatrixXd grads = tb.coef * w.leftCols(d_);  // S x d

  TvEval out;
  out.value = grads.cwiseAbs().sum() * inv_s;
  Eigen::MatrixXd g_bar = (grads.array().sign() * inv_s).matrix();  // S x d

  // explicit dependence: grads = coef * W_d
  out.w_grad = Eigen::MatrixXd::Zero(n, p);
  out.w_grad.leftCols(d_).noalias() = tb.coef.transpose() * g_bar;

  Eigen::MatrixXd coef_bar = g_bar * w.leftCols(d_).transpose();  // S x N

  out.beta_bar = Eigen::VectorXd::Zero(beta.size());
  switch (act_) {
    case Activation::kFourier: {
      // coef = 2pi (cos * diag(beta_tail) - sin * diag(beta_head))
      Eigen::MatrixXd t_bar =
          (coef_bar.array() *
           (kTwoPi * kTwoPi *
            (-(tb.cos_t * beta.head(n).asDiagonal()) -
             tb.sin_t * beta.tail(n).asDiagonal())
                .array()))
              .matrix();
      out.w_grad.noalias() += t_bar.transpose() * tb.xs;
      out.beta_bar.head(n) =
          -kTwoPi * coef_bar.cwiseProduct(tb.sin_t).colwise().sum().transpose();
      out.beta_bar.tail(n) =
          kTwoPi * coef_bar.cwiseProduct(tb.cos_t).colwise().sum().transpose();
      break;
    }
    case Activation::kSigmoid: {
      Eigen::ArrayXXd sig = tb.phi.array();
      Eigen::MatrixXd dsig = (sig * (1.0 - sig)).matrix();
      // coef = sigma'(t) beta_l, so dcoef/dt = sigma'(1 - 2 sigma) beta_l
      Eigen::MatrixXd t_bar =
          (coef_bar.array() *
           ((dsig.array() * (1.0 - 2.0 * sig)).matrix() *
            beta.head(n).asDiagonal())
               .array())
              .matrix();
      out.w_grad.noalias() += t_bar.transpose() * tb.xs;
      out.beta_bar.head(n) =
          coef_bar.cwiseProduct(dsig).colwise().sum().transpose();
      break;
    }
    case Activation::kRelu:
      // coefficient is piecewise constant in t: no path through W beyond
      // the explicit one; beta still moves
      out.beta_bar.head(n) =
          coef_bar.cwiseProduct(tb.phi).colwise().sum().transpose();
      break;
  }
  return out;
}

std::pair<double, Eigen::MatrixXd> Objective::tv_regularizer_grad(
    const Eigen::MatrixXd& w, const SolveTape& tape,
    const Eigen::MatrixXd& points) const {
  TvEval parts = tv_regularizer_grad_parts(w, tape.solution, points);
  LsVjp vjp = solve_regularized_ls_vjp(tape, parts.beta_bar, y_);
  Eigen::MatrixXd w_grad =
      parts.w_grad +
      design_matrix_vjp_pre(tape.design, x_, w.cols(), act_, vjp.a_bar);
  return {parts.value, std::move(w_grad)};
}

ObjectiveEval Objective::value_and_grad(const Eigen::MatrixXd& w,
                                        Rng& rng) const {
  if (lambda_ > 0.0 && tv_samples_ > 0) {
    return value_and_grad_at(w, draw_tv_points(rng));
  }
  return value_and_grad_at(w, std::nullopt);
}

ObjectiveEval Objective::value_and_grad_at(
    const Eigen::MatrixXd& w,
    const std::optional<Eigen::MatrixXd>& tv_points) const {
  Eigen::MatrixXd a = design_matrix(w, x_, act_);
  auto [beta, tape] = solve_regularized_ls(a, y_, epsilon_);
  Eigen::VectorXd r = y_ - a * beta;

  ObjectiveEval out;
  out.loss = r.squaredNorm();
  out.beta = beta;

  Eigen::VectorXd g_bar = -2.0 * (a.transpose() * r);
  Eigen::MatrixXd a_bar = -2.0 * r * beta.transpose();

  TvEval tv;
  if (tv_points) {
    tv = tv_regularizer_grad_parts(w, beta, *tv_points);
    out.reg = tv.value;
    g_bar += lambda_ * tv.beta_bar;
  }
  out.total = out.loss + lambda_ * out.reg;

  LsVjp vjp = solve_regularized_ls_vjp(tape, g_bar, y_);
  a_bar += vjp.a_bar;
  out.w_grad = design_matrix_vjp_pre(a, x_, w.cols(), act_, a_bar);
  if (tv_points) {
    out.w_grad += lambda_ * tv.w_grad;
  }
  return out;
}

JointEval Objective::joint_value_and_grad(const Eigen::MatrixXd& w,
                                          const Eigen::VectorXd& beta,
                                          Rng& rng) const {
  if (lambda_ > 0.0 && tv_samples_ > 0) {
    return joint_value_and_grad_at(w, beta, draw_tv_points(rng));
  }
  return joint_value_and_grad_at(w, beta, std::nullopt);
}

JointEval Objective::joint_value_and_grad_at(
    const Eigen::MatrixXd& w, const Eigen::VectorXd& beta,
    const std::optional<Eigen::MatrixXd>& tv_points) const {
  if (beta.size() != output_weight_length(act_, w.rows())) {
    throw DimensionMismatch("output-weight length does not fit the features");
  }
  Eigen::MatrixXd a = design_matrix(w, x_, act_);
  Eigen::VectorXd r = y_ - a * beta;

  JointEval out;
  out.loss = r.squaredNorm();
  out.beta_grad = -2.0 * (a.transpose() * r);
  Eigen::MatrixXd a_bar = -2.0 * r * beta.transpose();
  out.w_grad = design_matrix_vjp_pre(a, x_, w.cols(), act_, a_bar);

  if (tv_points) {
    TvEval tv = tv_regularizer_grad_parts(w, beta, *tv_points);
    out.reg = tv.value;
    out.w_grad += lambda_ * tv.w_grad;
    out.beta_grad += lambda_ * tv.beta_bar;
  }
  out.total = out.loss + lambda_ * out.reg;
  return out;
}

}  // namespace gefet
