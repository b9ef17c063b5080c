// Synthetic data generation for the linear model y_i = w*.x_i + eps_i with
// heavy-tailed noise and corruption families:
//
//   Gaussian(sigma)              eps ~ N(0, sigma^2)
//   StudentT(df)                 eps ~ t_df (normal / sqrt(chi^2_df / df))
//   ParetoRecentered(tail)       eps ~ Pareto(scale 1, tail) - tail/(tail-1),
//                                so the population mean is zero (tail > 1)
//   SparseOutputCorruption(...)  eps ~ N(0, base_sigma^2), plus a sparse
//                                spike vector b: round(fraction * n) rows get
//                                an extra U[-beta, beta] term
//   InputCorruption(...)         eps ~ N(0, base_sigma^2); y comes from the
//                                clean X, then every X entry is shifted by
//                                U[-beta, beta]
//
// Draw order inside gen_linear (one stream per call, fixed for
// reproducibility): X entries row-major, then w* entries, then the noise
// vector, then corruption-specific draws (spike positions via partial
// Fisher-Yates, spike values; or the input-corruption entries row-major).
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "truncreg/dataset.hpp"
#include "truncreg/rng.hpp"

namespace truncreg {

enum class NoiseKind { Gaussian, StudentT, ParetoRecentered, SparseOutputCorruption, InputCorruption };

inline const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::StudentT: return "student-t";
    case NoiseKind::ParetoRecentered: return "pareto";
    case NoiseKind::SparseOutputCorruption: return "corrupt-output";
    case NoiseKind::InputCorruption: return "corrupt-input";
  }
  return "?";
}

/// One of the noise/corruption generators. `level` is sigma for Gaussian,
/// df for StudentT, the tail index for Pareto, and beta for the two
/// corruption models.
struct NoiseModel {
  NoiseKind kind = NoiseKind::Gaussian;
  double level = 1.0;
  double nonzero_fraction = 0.2;  // SparseOutputCorruption only
  double base_sigma = 1.0;        // corruption models only

  static NoiseModel gaussian(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("gaussian: sigma must be >= 0");
    return {NoiseKind::Gaussian, sigma, 0.2, 1.0};
  }
  static NoiseModel student_t(double df) {
    if (!(df > 0.0)) throw std::invalid_argument("student_t: df must be > 0");
    return {NoiseKind::StudentT, df, 0.2, 1.0};
  }
  static NoiseModel pareto(double tail) {
    if (!(tail > 1.0))
      throw std::invalid_argument("pareto: tail must exceed 1 for recentering");
    return {NoiseKind::ParetoRecentered, tail, 0.2, 1.0};
  }
  static NoiseModel sparse_output(double beta, double fraction = 0.2, double base_sigma = 1.0) {
    if (!(beta > 0.0)) throw std::invalid_argument("sparse_output: beta must be > 0");
    if (!(fraction > 0.0 && fraction < 1.0))
      throw std::invalid_argument("sparse_output: fraction must lie in (0, 1)");
    if (base_sigma < 0.0) throw std::invalid_argument("sparse_output: base_sigma must be >= 0");
    return {NoiseKind::SparseOutputCorruption, beta, fraction, base_sigma};
  }
  static NoiseModel input_corruption(double beta, double base_sigma = 1.0) {
    if (!(beta > 0.0)) throw std::invalid_argument("input_corruption: beta must be > 0");
    if (base_sigma < 0.0)
      throw std::invalid_argument("input_corruption: base_sigma must be >= 0");
    return {NoiseKind::InputCorruption, beta, 0.2, base_sigma};
  }
};

namespace detail {

inline void fill_additive_noise(const NoiseModel& noise, Eigen::VectorXd& out, Rng& rng) {
  const auto n = out.size();
  switch (noise.kind) {
    case NoiseKind::Gaussian:
      for (Eigen::Index i = 0; i < n; ++i) out[i] = noise.level * rng.normal();
      return;
    case NoiseKind::StudentT:
      for (Eigen::Index i = 0; i < n; ++i) out[i] = rng.student_t(noise.level);
      return;
    case NoiseKind::ParetoRecentered: {
      const double mean = noise.level / (noise.level - 1.0);
      for (Eigen::Index i = 0; i < n; ++i) out[i] = rng.pareto(noise.level) - mean;
      return;
    }
    case NoiseKind::SparseOutputCorruption:
      for (Eigen::Index i = 0; i < n; ++i) out[i] = noise.base_sigma * rng.normal();
      return;
    case NoiseKind::InputCorruption:
      for (Eigen::Index i = 0; i < n; ++i) out[i] = noise.base_sigma * rng.normal();
      return;
  }
}

// First k entries of a seeded permutation of 0..n-1 (partial Fisher-Yates).
inline std::vector<int> choose_indices(int n, int k, Rng& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace detail

/// i.i.d. draws of the additive noise families. The two corruption models
/// are not plain additive noise vectors: SparseOutputCorruption returns the
/// Gaussian-plus-spikes sum; InputCorruption is rejected.
inline Eigen::VectorXd sample_noise(const NoiseModel& noise, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_noise: n must be >= 1");
  if (noise.kind == NoiseKind::InputCorruption)
    throw std::invalid_argument("sample_noise: input corruption has no additive noise form");
  Rng rng(seed);
  Eigen::VectorXd eps(n);
  detail::fill_additive_noise(noise, eps, rng);
  if (noise.kind == NoiseKind::SparseOutputCorruption) {
    const int k = static_cast<int>(std::lround(noise.nonzero_fraction * n));
    const auto idx = detail::choose_indices(n, k, rng);
    for (int i : idx) eps[i] += rng.uniform(-noise.level, noise.level);
  }
  return eps;
}

/// Generates a training set: X entries i.i.d. standard normal, w* entries
/// i.i.d. U[0, 1], y per the noise model (see header comment for the exact
/// draw order). The corrupted row set is recorded in the provenance.
inline Dataset gen_linear(int n, int d, const NoiseModel& noise, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("gen_linear: need n >= 1 and d >= 1");
  Rng rng(seed);

  Dataset data;
  data.X = RowMajorMatrix(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) data.X(i, j) = rng.normal();

  Eigen::VectorXd w_star(d);
  for (int j = 0; j < d; ++j) w_star[j] = rng.uniform01();

  Eigen::VectorXd eps(n);
  detail::fill_additive_noise(noise, eps, rng);
  data.y = data.X * w_star + eps;

  if (noise.kind == NoiseKind::SparseOutputCorruption) {
    const int k = static_cast<int>(std::lround(noise.nonzero_fraction * n));
    data.provenance.corrupted_indices = detail::choose_indices(n, k, rng);
    for (int i : data.provenance.corrupted_indices)
      data.y[i] += rng.uniform(-noise.level, noise.level);
  } else if (noise.kind == NoiseKind::InputCorruption) {
    // y above used the clean X; only the stored inputs are corrupted
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) data.X(i, j) += rng.uniform(-noise.level, noise.level);
  }

  data.w_star = std::move(w_star);
  data.provenance.noise = to_string(noise.kind);
  data.provenance.level = noise.level;
  data.provenance.seed = seed;
  return data;
}

/// Clean evaluation set: fresh standard-normal X, y = X w* with no noise.
inline Dataset test_set_for(const Eigen::VectorXd& w_star, int n_test, std::uint64_t seed) {
  if (n_test < 1) throw std::invalid_argument("test_set_for: n_test must be >= 1");
  Rng rng(seed);
  Dataset data;
  data.X = RowMajorMatrix(n_test, static_cast<int>(w_star.size()));
  for (int i = 0; i < n_test; ++i)
    for (int j = 0; j < data.dim(); ++j) data.X(i, j) = rng.normal();
  data.y = data.X * w_star;
  data.w_star = w_star;
  data.provenance.noise = "clean-test";
  data.provenance.seed = seed;
  return data;
}

/// Adds U[-beta, beta] to every entry of X (used when corrupted test inputs
/// are explicitly requested; training corruption happens in gen_linear).
inline void corrupt_inputs(Dataset& data, double beta, std::uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < data.n(); ++i)
    for (int j = 0; j < data.dim(); ++j) data.X(i, j) += rng.uniform(-beta, beta);
}

}  // namespace truncreg
