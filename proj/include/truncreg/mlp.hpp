// Small feed-forward ReLU regressor trained with truncated losses at the
// output. Backpropagation is exact through the truncation: the output error
// signal of sample i is phi'_alpha(l_i) * dl_i/dpred, so one outlier with a
// huge residual contributes a vanishing gradient.
//
// Conventions: hidden activations are ReLU with subgradient 0 at 0, the
// output is affine, the ridge term lambda * sum |W_l|_F^2 applies to weights
// only. Glorot-uniform init: W entries ~ U[-sqrt(6/(fan_in+fan_out)), +...],
// biases zero, entries drawn in Eigen's column-major storage order.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "truncreg/dataset.hpp"
#include "truncreg/loss.hpp"
#include "truncreg/rng.hpp"

namespace truncreg {

struct MlpModel {
  std::vector<int> layer_dims;             ///< input, hidden..., output
  std::vector<Eigen::MatrixXd> weights;    ///< weights[l] is dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  std::size_t layer_count() const { return weights.size(); }

  void require_consistent() const {
    if (layer_dims.size() < 2) throw std::invalid_argument("MlpModel: need at least two layer dims");
    if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size())
      throw std::invalid_argument("MlpModel: layer count mismatch");
    for (std::size_t l = 0; l < weights.size(); ++l) {
      if (weights[l].rows() != layer_dims[l + 1] || weights[l].cols() != layer_dims[l] ||
          biases[l].size() != layer_dims[l + 1])
        throw std::invalid_argument("MlpModel: weight shape mismatch at layer " + std::to_string(l));
    }
  }
};

/// Gradient (or any tangent) with the same shape as an MlpModel.
struct MlpGradient {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

inline MlpGradient zero_gradient_like(const MlpModel& model) {
  MlpGradient g;
  g.weights.reserve(model.weights.size());
  g.biases.reserve(model.biases.size());
  for (const auto& w : model.weights) g.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : model.biases) g.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  return g;
}

// SGD plumbing (see sgd.hpp for the Eigen::VectorXd versions).
inline void apply_step(MlpModel& model, double eta, const MlpGradient& g) {
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    model.weights[l].noalias() -= eta * g.weights[l];
    model.biases[l].noalias() -= eta * g.biases[l];
  }
}
inline void apply_step(MlpGradient& a, double eta, const MlpGradient& b) {
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    a.weights[l].noalias() -= eta * b.weights[l];
    a.biases[l].noalias() -= eta * b.biases[l];
  }
}
inline double squared_norm(const MlpGradient& g) {
  double sum = 0.0;
  for (const auto& w : g.weights) sum += w.squaredNorm();
  for (const auto& b : g.biases) sum += b.squaredNorm();
  return sum;
}
inline bool all_finite(const MlpGradient& g) {
  for (const auto& w : g.weights)
    if (!w.allFinite()) return false;
  for (const auto& b : g.biases)
    if (!b.allFinite()) return false;
  return true;
}
inline void accumulate(MlpGradient& acc, const MlpGradient& g) {
  for (std::size_t l = 0; l < acc.weights.size(); ++l) {
    acc.weights[l] += g.weights[l];
    acc.biases[l] += g.biases[l];
  }
}
inline void scale_in_place(MlpGradient& g, double s) {
  for (auto& w : g.weights) w *= s;
  for (auto& b : g.biases) b *= s;
}

/// Default desk-scale architecture: input d, three hidden ReLU layers of
/// the given width, scalar output.
inline std::vector<int> default_mlp_dims(int input_dim, int hidden_width = 80) {
  return {input_dim, hidden_width, hidden_width, hidden_width, 1};
}

/// Glorot-uniform initialization, reproducible under the seed.
inline MlpModel mlp_init(const std::vector<int>& layer_dims, std::uint64_t seed) {
  if (layer_dims.size() < 2)
    throw std::invalid_argument("mlp_init: need at least input and output dims");
  for (int d : layer_dims)
    if (d < 1) throw std::invalid_argument("mlp_init: layer dims must be positive");

  Rng rng(seed);
  MlpModel model;
  model.layer_dims = layer_dims;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = rng.uniform(-bound, bound);
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return model;
}

/// Forward pass producing the full output vector.
inline Eigen::VectorXd forward_vec(const MlpModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    a = model.weights[l] * a + model.biases[l];
    if (l + 1 < model.layer_count()) a = a.cwiseMax(0.0);
  }
  return a;
}

/// Scalar prediction (requires a one-unit output layer).
inline double forward(const MlpModel& model, const Eigen::VectorXd& x) {
  if (model.output_dim() != 1)
    throw std::invalid_argument("forward: scalar prediction needs a 1-unit output layer");
  return forward_vec(model, x)[0];
}

/// Gradient of (1/B) sum_i phi_alpha(l(forward(x_i), y_i)) + lambda * sum
/// of squared weights over the rows [begin, end) of the dataset.
inline MlpGradient mlp_backward(const MlpModel& model, const Dataset& batch,
                                const TruncatedLoss& tl, double lambda, int begin = 0,
                                int end = -1) {
  model.require_consistent();
  batch.require_consistent();
  if (end < 0) end = batch.n();
  if (begin < 0 || begin >= end || end > batch.n())
    throw std::invalid_argument("mlp_backward: empty or out-of-range batch");
  if (batch.dim() != model.input_dim())
    throw std::invalid_argument("mlp_backward: input dimension mismatch");
  if (model.output_dim() != 1)
    throw std::invalid_argument("mlp_backward: training expects a scalar output");

  const int batch_size = end - begin;
  const auto layers = model.layer_count();
  MlpGradient grad = zero_gradient_like(model);

  std::vector<Eigen::VectorXd> activations(layers + 1);  // post-activation per layer
  std::vector<Eigen::VectorXd> pre(layers);              // pre-activation per layer

  for (int i = begin; i < end; ++i) {
    activations[0] = batch.X.row(i).transpose();
    for (std::size_t l = 0; l < layers; ++l) {
      pre[l] = model.weights[l] * activations[l] + model.biases[l];
      activations[l + 1] = (l + 1 < layers) ? pre[l].cwiseMax(0.0) : pre[l];
    }

    const double prediction = activations[layers][0];
    // truncation-aware error signal at the output
    double delta_scalar = tl.dz(prediction, batch.y[i]) / batch_size;
    Eigen::VectorXd delta = Eigen::VectorXd::Constant(1, delta_scalar);

    for (std::size_t l = layers; l-- > 0;) {
      grad.weights[l].noalias() += delta * activations[l].transpose();
      grad.biases[l].noalias() += delta;
      if (l > 0) {
        delta = model.weights[l].transpose() * delta;
        // ReLU subgradient, 0 at the kink
        for (Eigen::Index k = 0; k < delta.size(); ++k)
          if (pre[l - 1][k] <= 0.0) delta[k] = 0.0;
      }
    }
  }

  if (lambda != 0.0)
    for (std::size_t l = 0; l < layers; ++l) grad.weights[l].noalias() += 2.0 * lambda * model.weights[l];
  return grad;
}

/// MLP objective matching mlp_backward.
inline double mlp_objective(const MlpModel& model, const Dataset& batch, const TruncatedLoss& tl,
                            double lambda) {
  model.require_consistent();
  batch.require_consistent();
  if (batch.n() == 0) throw std::invalid_argument("mlp_objective: empty dataset");
  double sum = 0.0;
  for (int i = 0; i < batch.n(); ++i)
    sum += tl.value(forward(model, batch.X.row(i).transpose()), batch.y[i]);
  double reg = 0.0;
  for (const auto& w : model.weights) reg += w.squaredNorm();
  return sum / batch.n() + lambda * reg;
}

/// Binds (dataset, truncated loss, lambda) for the SGD driver.
class MlpProblem {
 public:
  MlpProblem(const Dataset& data, TruncatedLoss tl, double lambda)
      : data_(&data), tl_(std::move(tl)), lambda_(lambda) {
    data.require_consistent();
  }

  using Model = MlpModel;

  int sample_count() const { return data_->n(); }
  const TruncatedLoss& loss() const { return tl_; }

  double objective(const Model& m) const { return mlp_objective(m, *data_, tl_, lambda_); }
  MlpGradient full_gradient(const Model& m) const {
    return mlp_backward(m, *data_, tl_, lambda_);
  }
  MlpGradient sample_gradient(const Model& m, int index) const {
    return mlp_backward(m, *data_, tl_, lambda_, index, index + 1);
  }

 private:
  const Dataset* data_;
  TruncatedLoss tl_;
  double lambda_;
};

}  // namespace truncreg
