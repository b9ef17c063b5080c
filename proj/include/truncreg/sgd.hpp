// Seeded stochastic gradient descent over any problem exposing per-sample
// gradients:
//
//   w_{t+1} = w_t - eta_t * g_t,   g_t = mean of sample_gradient over a
//                                        batch of i.i.d. uniform indices
//
// Step rules: a constant rate, or an inverse-square-root-horizon schedule
// eta_t = 1 / ((2 kappa + 1) R^2 sqrt(T)) (capped by the same constant
// without the sqrt(T)), which the problem supplies via curvature_scale().
//
// Runs are reproducible bit-for-bit under a fixed seed: one RNG stream per
// run, drawing first the randomized-output step (a uniform choice among the
// recorded steps, the classic randomized-iterate rule for nonconvex SGD)
// and then batch_size indices per step.
//
// Sampling is with replacement and there is no projection; the iterate is
// free-range, matching the unconstrained update rule.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "truncreg/rng.hpp"

namespace truncreg {

enum class StepRule { Constant, InverseSqrtT };

struct SgdConfig {
  long long total_steps = 1000;
  StepRule step_rule = StepRule::InverseSqrtT;
  double eta = 0.0;  ///< required (> 0) for StepRule::Constant
  int batch_size = 1;
  std::uint64_t seed = 0;
  double lambda = 0.0;  ///< ridge weight; consumed by the harness when it builds the objective
  long long record_every = 100;

  void validate() const {
    if (total_steps < 0) throw std::invalid_argument("SgdConfig: total_steps must be >= 0");
    if (step_rule == StepRule::Constant && !(eta > 0.0))
      throw std::invalid_argument("SgdConfig: constant rule needs eta > 0");
    if (batch_size < 1) throw std::invalid_argument("SgdConfig: batch_size must be >= 1");
    if (lambda < 0.0) throw std::invalid_argument("SgdConfig: lambda must be >= 0");
    if (record_every < 1) throw std::invalid_argument("SgdConfig: record_every must be >= 1");
  }
};

/// Raised when a non-finite gradient shows up mid-run.
struct NumericalError : std::runtime_error {
  long long step;
  int sample_index;
  NumericalError(long long step_, int index_)
      : std::runtime_error("sgd: non-finite gradient at step " + std::to_string(step_) +
                           ", sample " + std::to_string(index_)),
        step(step_),
        sample_index(index_) {}
};

template <class Model>
struct TrainReport {
  Model final_model;
  std::vector<std::pair<long long, double>> grad_norm_trace;  ///< (step, |grad F|^2)
  std::vector<std::pair<long long, double>> objective_trace;  ///< (step, F)
  long long wall_steps = 0;
  Model sampled_iterate;  ///< model at a uniformly random recorded step >= 1
  std::uint64_t seed = 0;

  double final_grad_norm_sq() const {
    return grad_norm_trace.empty() ? 0.0 : grad_norm_trace.back().second;
  }
  double min_grad_norm_sq() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [step, g] : grad_norm_trace) best = std::min(best, g);
    return best;
  }
};

// Model/gradient plumbing for Eigen vectors; other model types (the MLP)
// overload these in their own headers.
inline void apply_step(Eigen::VectorXd& w, double eta, const Eigen::VectorXd& g) {
  w.noalias() -= eta * g;
}
inline double squared_norm(const Eigen::VectorXd& g) { return g.squaredNorm(); }
inline bool all_finite(const Eigen::VectorXd& g) { return g.allFinite(); }
inline void accumulate(Eigen::VectorXd& acc, const Eigen::VectorXd& g) { acc += g; }
inline void scale_in_place(Eigen::VectorXd& g, double s) { g *= s; }

template <class Problem>
TrainReport<typename Problem::Model> sgd(const Problem& problem, typename Problem::Model init,
                                         const SgdConfig& config) {
  using Model = typename Problem::Model;
  config.validate();
  const int n = problem.sample_count();
  if (n < 1) throw std::invalid_argument("sgd: problem has no samples");
  if (config.batch_size > n)
    throw std::invalid_argument("sgd: batch_size exceeds sample count");

  const long long t_total = config.total_steps;
  double eta = config.eta;
  if (config.step_rule == StepRule::InverseSqrtT) {
    if constexpr (requires { problem.curvature_scale(); }) {
      const double scale = problem.curvature_scale();
      if (!(scale > 0.0)) throw std::invalid_argument("sgd: curvature scale must be > 0");
      const double cap = 1.0 / scale;
      eta = std::min(cap, 1.0 / (scale * std::sqrt(static_cast<double>(std::max(t_total, 1LL)))));
    } else {
      throw std::invalid_argument("sgd: problem does not support the inverse-sqrt step rule");
    }
  }

  // Recorded steps: 0, record_every, 2*record_every, ..., plus the final step.
  std::vector<long long> recorded;
  for (long long t = 0; t <= t_total; t += config.record_every) recorded.push_back(t);
  if (recorded.back() != t_total) recorded.push_back(t_total);

  Rng rng(config.seed);
  long long sampled_step = 0;
  if (recorded.size() > 1) {
    const auto pick = 1 + rng.bounded(recorded.size() - 1);  // uniform over recorded steps >= 1
    sampled_step = recorded[static_cast<std::size_t>(pick)];
  }

  TrainReport<Model> report;
  report.seed = config.seed;
  Model w = std::move(init);
  report.sampled_iterate = w;

  std::size_t next_record = 0;
  auto record_state = [&](long long step) {
    report.grad_norm_trace.emplace_back(step, squared_norm(problem.full_gradient(w)));
    report.objective_trace.emplace_back(step, problem.objective(w));
  };
  record_state(0);
  ++next_record;

  // problems may expose an allocation-free fused update for batch size 1
  constexpr bool has_fast_step = requires(const Problem& p, Model& m) {
    { p.sample_step(m, 0, 0.0) } -> std::convertible_to<bool>;
  };

  for (long long t = 1; t <= t_total; ++t) {
    const auto first_index = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    if constexpr (has_fast_step) {
      if (config.batch_size == 1) {
        if (!problem.sample_step(w, first_index, eta)) throw NumericalError(t, first_index);
        if (next_record < recorded.size() && recorded[next_record] == t) {
          record_state(t);
          ++next_record;
        }
        if (t == sampled_step) report.sampled_iterate = w;
        continue;
      }
    }
    auto grad = problem.sample_gradient(w, first_index);
    for (int b = 1; b < config.batch_size; ++b) {
      const auto index = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
      accumulate(grad, problem.sample_gradient(w, index));
    }
    if (config.batch_size > 1) scale_in_place(grad, 1.0 / config.batch_size);
    if (!all_finite(grad)) throw NumericalError(t, first_index);

    apply_step(w, eta, grad);

    if (next_record < recorded.size() && recorded[next_record] == t) {
      record_state(t);
      ++next_record;
    }
    if (t == sampled_step) report.sampled_iterate = w;
  }

  if (!std::isfinite(report.grad_norm_trace.back().second))
    throw NumericalError(t_total, -1);
  report.final_model = std::move(w);
  report.wall_steps = t_total;
  return report;
}

/// Empirical mean squared deviation of sample gradients from the full
/// gradient over sample_count i.i.d. uniform indices; estimates the
/// stochastic-gradient variance at the given iterate.
template <class Problem>
double grad_variance(const Problem& problem, const typename Problem::Model& w, int sample_count,
                     std::uint64_t seed) {
  if (sample_count < 2) throw std::invalid_argument("grad_variance: sample_count must be >= 2");
  const int n = problem.sample_count();
  const auto full = problem.full_gradient(w);
  Rng rng(seed);
  double sum = 0.0;
  for (int k = 0; k < sample_count; ++k) {
    const auto index = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    auto g = problem.sample_gradient(w, index);
    apply_step(g, 1.0, full);  // g -= full gradient
    sum += squared_norm(g);
  }
  return sum / sample_count;
}

}  // namespace truncreg
