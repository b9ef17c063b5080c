// Truncated-loss empirical risk for linear models:
//
//   F_alpha(w) = scale * sum_i phi_alpha(l(w.x_i, y_i)) + lambda |w|^2
//
// where scale is 1/(2n) for the square loss (so the square-loss objective is
// exactly the truncated least-squares form with gradient
// (1/n) sum phi'(z_i^2) z_i x_i) and 1/n for the Lipschitz losses.
//
// The regularizer enters every per-sample stochastic gradient as the full
// 2 lambda w term, so the mean of sample gradients equals the full gradient
// and both share fixed points.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "truncreg/dataset.hpp"
#include "truncreg/loss.hpp"

namespace truncreg {

/// A linear model is just its weight vector.
using LinearModel = Eigen::VectorXd;

enum class ObjectiveScale { HalfMean, Mean };

/// Truncated loss + ridge weight + averaging convention. HalfMean is tied
/// to the square base loss; everything else averages plainly.
struct ObjectiveSpec {
  TruncatedLoss tl;
  double lambda = 0.0;
  ObjectiveScale scale = ObjectiveScale::Mean;

  static ObjectiveSpec make(TruncatedLoss tl, double lambda = 0.0) {
    if (lambda < 0.0) throw std::invalid_argument("ObjectiveSpec: lambda must be >= 0");
    const auto scale = tl.base.kind == LossKind::Square ? ObjectiveScale::HalfMean
                                                        : ObjectiveScale::Mean;
    return {tl, lambda, scale};
  }

  double scale_factor(int n) const {
    return (scale == ObjectiveScale::HalfMean ? 0.5 : 1.0) / n;
  }
  /// Weight of one sample's loss term inside a per-sample gradient.
  double sample_factor() const { return scale == ObjectiveScale::HalfMean ? 0.5 : 1.0; }
};

namespace detail {

inline void require_dims(const ObjectiveSpec&, const LinearModel& w, const Dataset& data) {
  data.require_consistent();
  if (data.n() == 0) throw std::invalid_argument("objective: dataset is empty");
  if (w.size() != data.X.cols())
    throw std::invalid_argument("objective: model dimension does not match dataset");
}

}  // namespace detail

inline double objective(const ObjectiveSpec& spec, const LinearModel& w, const Dataset& data) {
  detail::require_dims(spec, w, data);
  const Eigen::VectorXd pred = data.X * w;
  double sum = 0.0;
  for (int i = 0; i < data.n(); ++i) sum += spec.tl.value(pred[i], data.y[i]);
  return spec.scale_factor(data.n()) * sum + spec.lambda * w.squaredNorm();
}

inline Eigen::VectorXd full_gradient(const ObjectiveSpec& spec, const LinearModel& w,
                                     const Dataset& data) {
  detail::require_dims(spec, w, data);
  const Eigen::VectorXd pred = data.X * w;
  Eigen::VectorXd coeff(data.n());
  for (int i = 0; i < data.n(); ++i) coeff[i] = spec.tl.dz(pred[i], data.y[i]);
  return spec.scale_factor(data.n()) * (data.X.transpose() * coeff) + 2.0 * spec.lambda * w;
}

/// Gradient of the per-sample objective sample_factor * phi(l(w.x_i, y_i))
/// + lambda |w|^2; its mean over i equals full_gradient.
inline Eigen::VectorXd sample_gradient(const ObjectiveSpec& spec, const LinearModel& w,
                                       const Dataset& data, int index) {
  detail::require_dims(spec, w, data);
  if (index < 0 || index >= data.n())
    throw std::out_of_range("sample_gradient: index out of range");
  const double pred = data.X.row(index).dot(w);
  const double c = spec.sample_factor() * spec.tl.dz(pred, data.y[index]);
  return c * data.X.row(index).transpose() + 2.0 * spec.lambda * w;
}

inline double stationarity_norm(const ObjectiveSpec& spec, const LinearModel& w,
                                const Dataset& data) {
  return full_gradient(spec, w, data).norm();
}

/// Exact minimizer of (1/2n) sum (w.x_i - y_i)^2 + lambda |w|^2 via the
/// normal equations (X'X/n + 2 lambda I) w = X'y/n.
inline LinearModel ridge_oracle(const Dataset& data, double lambda) {
  data.require_consistent();
  if (data.n() == 0) throw std::invalid_argument("ridge_oracle: dataset is empty");
  if (lambda < 0.0) throw std::invalid_argument("ridge_oracle: lambda must be >= 0");
  Eigen::MatrixXd gram = data.X.transpose() * data.X / data.n();
  gram.diagonal().array() += 2.0 * lambda;
  const Eigen::VectorXd rhs = data.X.transpose() * data.y / data.n();
  const auto ldlt = gram.ldlt();
  const Eigen::VectorXd w = ldlt.solve(rhs);
  const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
  const double residual = (gram * w - rhs).norm();
  if (!w.allFinite() || ldlt.info() != Eigen::Success ||
      pivots.minCoeff() <= 1e-12 * pivots.maxCoeff() ||
      residual > 1e-8 * std::max(1.0, rhs.norm()))
    throw std::runtime_error("ridge_oracle: normal equations are singular (lambda = 0?)");
  return w;
}

/// Parameter-space distance |w - w*|.
inline double statistical_error(const LinearModel& w, const Eigen::VectorXd& w_star) {
  if (w.size() != w_star.size())
    throw std::invalid_argument("statistical_error: length mismatch");
  return (w - w_star).norm();
}

struct TestMetrics {
  double mse = 0.0;
  double mae = 0.0;
};

inline TestMetrics test_metrics(const LinearModel& w, const Dataset& data) {
  data.require_consistent();
  if (data.n() == 0) throw std::invalid_argument("test_metrics: dataset is empty");
  if (w.size() != data.X.cols())
    throw std::invalid_argument("test_metrics: model dimension does not match dataset");
  const Eigen::VectorXd r = data.X * w - data.y;
  return {r.squaredNorm() / data.n(), r.cwiseAbs().mean()};
}

/// Largest sample norm R = max_i |x_i|; feeds the inverse-sqrt step rule.
inline double max_row_norm(const Dataset& data) {
  double best = 0.0;
  for (int i = 0; i < data.n(); ++i) best = std::max(best, data.X.row(i).norm());
  return best;
}

/// Binds an objective to a dataset so SGD can drive it. Also exposes the
/// (2 kappa + 1) R^2 curvature scale used by the inverse-sqrt step rule.
class LinearProblem {
 public:
  LinearProblem(ObjectiveSpec spec, const Dataset& data)
      : spec_(std::move(spec)), data_(&data), max_row_norm_(max_row_norm(data)) {
    data.require_consistent();
  }

  using Model = LinearModel;

  int dim() const { return data_->dim(); }
  int sample_count() const { return data_->n(); }
  const ObjectiveSpec& spec() const { return spec_; }
  const Dataset& data() const { return *data_; }

  double objective(const Model& w) const { return truncreg::objective(spec_, w, *data_); }
  Eigen::VectorXd full_gradient(const Model& w) const {
    return truncreg::full_gradient(spec_, w, *data_);
  }
  Eigen::VectorXd sample_gradient(const Model& w, int index) const {
    return truncreg::sample_gradient(spec_, w, *data_, index);
  }

  /// Allocation-free single-sample update w -= eta * sample_gradient;
  /// returns false on a non-finite gradient. Same gradient as
  /// sample_gradient up to floating-point association.
  bool sample_step(Model& w, int index, double eta) const {
    const auto x = data_->X.row(index);
    const double pred = x.dot(w);
    const double c = spec_.sample_factor() * spec_.tl.dz(pred, data_->y[index]);
    if (!std::isfinite(pred) || !std::isfinite(c)) return false;
    w = (1.0 - 2.0 * eta * spec_.lambda) * w - (eta * c) * x.transpose();
    return true;
  }

  double curvature_scale() const {
    const double kappa = constants_of(spec_.tl.trunc).kappa;
    return (2.0 * kappa + 1.0) * max_row_norm_ * max_row_norm_;
  }

 private:
  ObjectiveSpec spec_;
  const Dataset* data_;
  double max_row_norm_;
};

}  // namespace truncreg
