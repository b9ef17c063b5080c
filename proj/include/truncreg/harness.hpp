// Experiment orchestration: noise-level sweeps comparing truncated vs
// untruncated SGD on identical data, k-fold cross-validation over
// (alpha, lambda), statistical-error rate checks, the housing protocol,
// the MLP demo, and Q-Q plot data.
//
// The untruncated baseline runs the identical SGD path with alpha = 1e9, so
// comparisons isolate the truncation effect; a closed-form ridge solution is
// carried along as a sanity column. Every CSV row ends with the master seed
// and an FNV-1a hash of the configuration, and all randomness flows through
// derive_seed, so re-running a command with the same flags reproduces its
// output byte for byte.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "truncreg/csv.hpp"
#include "truncreg/datagen.hpp"
#include "truncreg/dataset.hpp"
#include "truncreg/linear_model.hpp"
#include "truncreg/loss.hpp"
#include "truncreg/mlp.hpp"
#include "truncreg/sgd.hpp"
#include "truncreg/truncation.hpp"

namespace truncreg {

/// Alpha used for the "without truncation" arm of every comparison.
inline constexpr double kUntruncatedAlpha = 1e9;

// ---------------------------------------------------------------------------
// Q-Q plot data
// ---------------------------------------------------------------------------

/// Inverse standard-normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9 over (0, 1)).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

enum class QqReference { Normal };

/// Pairs standard-normal quantiles at plotting positions (i - 0.5)/n with
/// the sorted residuals standardized by their sample mean and standard
/// deviation. Errors out on fewer than two residuals or zero variance.
inline std::vector<std::pair<double, double>> qq_data(std::vector<double> residuals,
                                                      QqReference = QqReference::Normal) {
  const auto n = residuals.size();
  if (n < 2) throw std::invalid_argument("qq_data: need at least two residuals");
  double mean = 0.0;
  for (double r : residuals) mean += r;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double r : residuals) ss += (r - mean) * (r - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw std::invalid_argument("qq_data: residuals have zero variance");

  std::sort(residuals.begin(), residuals.end());
  std::vector<std::pair<double, double>> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    points.emplace_back(normal_quantile(p), (residuals[i] - mean) / sd);
  }
  return points;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class Task { Sweep, CrossVal, RateCheck, Housing, MlpDemo, AxiomCheck };

inline const char* to_string(Task task) {
  switch (task) {
    case Task::Sweep: return "sweep";
    case Task::CrossVal: return "crossval";
    case Task::RateCheck: return "rate-check";
    case Task::Housing: return "housing";
    case Task::MlpDemo: return "mlp-demo";
    case Task::AxiomCheck: return "check-axioms";
  }
  return "?";
}

struct ExperimentConfig {
  Task task = Task::Sweep;

  // data / noise
  int n = 1000;
  int d = 1000;
  int n_test = 1000;
  int trials = 5;
  NoiseKind noise_kind = NoiseKind::SparseOutputCorruption;
  std::vector<double> levels = {10, 20, 30, 40, 50};
  double fraction = 0.2;     ///< corrupted-output nonzero fraction
  double base_sigma = 1.0;   ///< Gaussian sigma underneath the corruption models
  bool corrupt_test_inputs = false;

  // method
  LossKind base_kind = LossKind::Square;
  double base_param = 0.0;
  TruncationKind trunc_kind = TruncationKind::Log;
  int catoni_m = 2;
  std::vector<double> alpha_grid = {0.1, 0.5, 1, 5, 10, 50, 100, kUntruncatedAlpha};
  std::vector<double> lambda_grid = {0, 1e-4, 1e-3, 1e-2, 1e-1};
  int cv_folds = 5;
  double fixed_alpha = 10.0;   ///< rate-check / mlp-demo truncation level
  double fixed_lambda = 1e-3;  ///< rate-check / mlp-demo ridge weight

  // solver; cross-validation folds may train on a reduced step budget
  SgdConfig sgd;
  long long cv_total_steps = 0;  ///< 0 = same as sgd.total_steps

  SgdConfig cv_sgd() const {
    SgdConfig out = sgd;
    if (cv_total_steps > 0) out.total_steps = cv_total_steps;
    return out;
  }

  // rate check
  std::vector<int> n_grid = {500, 2000, 8000};

  // mlp demo
  std::vector<int> hidden_dims = {16, 16};
  int teacher_hidden = 16;

  std::uint64_t seed = 0;
  std::string output_path;

  BaseLoss base_loss() const {
    switch (base_kind) {
      case LossKind::Square: return BaseLoss::square();
      case LossKind::Absolute: return BaseLoss::absolute();
      case LossKind::Huber: return BaseLoss::huber(base_param);
      case LossKind::EpsInsensitive: return BaseLoss::eps_insensitive(base_param);
      case LossKind::Pinball: return BaseLoss::pinball(base_param);
    }
    return BaseLoss::square();
  }
  TruncationSpec truncation(double alpha) const {
    return TruncationSpec::make(trunc_kind, alpha, catoni_m);
  }
  NoiseModel noise_model(double level) const {
    switch (noise_kind) {
      case NoiseKind::Gaussian: return NoiseModel::gaussian(level);
      case NoiseKind::StudentT: return NoiseModel::student_t(level);
      case NoiseKind::ParetoRecentered: return NoiseModel::pareto(level);
      case NoiseKind::SparseOutputCorruption:
        return NoiseModel::sparse_output(level, fraction, base_sigma);
      case NoiseKind::InputCorruption: return NoiseModel::input_corruption(level, base_sigma);
    }
    return NoiseModel::gaussian(level);
  }

  /// Canonical key=value description; hashed into every CSV row.
  std::string describe() const {
    std::ostringstream os;
    auto seq = [&os](const char* name, const auto& values) {
      os << ' ' << name << '=';
      for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "|" : "") << values[i];
    };
    os << "task=" << to_string(task) << " n=" << n << " d=" << d << " n_test=" << n_test << " trials=" << trials
       << " noise=" << to_string(noise_kind) << " fraction=" << fraction
       << " base_sigma=" << base_sigma << " corrupt_test=" << corrupt_test_inputs
       << " base=" << to_string(base_kind) << " base_param=" << base_param
       << " trunc=" << to_string(trunc_kind) << " catoni_m=" << catoni_m;
    seq("levels", levels);
    seq("alphas", alpha_grid);
    seq("lambdas", lambda_grid);
    seq("n_grid", n_grid);
    seq("hidden", hidden_dims);
    os << " cv_folds=" << cv_folds << " fixed_alpha=" << fixed_alpha
       << " fixed_lambda=" << fixed_lambda << " steps=" << sgd.total_steps
       << " rule=" << (sgd.step_rule == StepRule::Constant ? "constant" : "inv-sqrt-t")
       << " eta=" << sgd.eta << " batch=" << sgd.batch_size
       << " record_every=" << sgd.record_every << " cv_steps=" << cv_total_steps
       << " teacher_hidden=" << teacher_hidden
       << " seed=" << seed;
    return os.str();
  }
  std::uint64_t config_hash() const { return fnv1a_hash(describe()); }
};

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

struct CvCell {
  double alpha;
  double lambda;
  double mean_score;
};

struct CvResult {
  double alpha = 0.0;
  double lambda = 0.0;
  std::vector<CvCell> table;
};

namespace detail {

inline LinearModel train_linear(const Dataset& data, const BaseLoss& base,
                                const TruncationSpec& trunc, double lambda,
                                SgdConfig sgd_config, std::uint64_t seed) {
  sgd_config.seed = seed;
  sgd_config.lambda = lambda;
  const auto spec = ObjectiveSpec::make(TruncatedLoss{base, trunc}, lambda);
  LinearProblem problem(spec, data);
  return sgd(problem, LinearModel(Eigen::VectorXd::Zero(data.dim())), sgd_config).final_model;
}

inline double validation_score(const BaseLoss& base, const LinearModel& w, const Dataset& val) {
  const auto metrics = test_metrics(w, val);
  return base.kind == LossKind::Square ? metrics.mse : metrics.mae;
}

}  // namespace detail

/// k-fold CV over the (alpha, lambda) grid, minimizing validation MSE for
/// the square base and MAE otherwise. Near-equal scores (relative 1e-6)
/// break toward larger alpha, then larger lambda: less truncation and more
/// regularization when validation cannot tell the difference.
inline CvResult cross_validate(const Dataset& data, const BaseLoss& base,
                               TruncationKind trunc_kind, const std::vector<double>& alpha_grid,
                               const std::vector<double>& lambda_grid, int k, std::uint64_t seed,
                               const SgdConfig& sgd_config, int catoni_m = 2) {
  data.require_consistent();
  if (alpha_grid.empty() || lambda_grid.empty())
    throw std::invalid_argument("cross_validate: grids must be non-empty");
  if (k < 2) throw std::invalid_argument("cross_validate: need k >= 2 folds");
  if (k > data.n()) throw std::invalid_argument("cross_validate: k exceeds sample count");

  const auto perm = random_permutation(data.n(), seed);
  std::vector<Dataset> fold_train, fold_val;
  fold_train.reserve(static_cast<std::size_t>(k));
  fold_val.reserve(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    const int lo = static_cast<int>(static_cast<long long>(data.n()) * f / k);
    const int hi = static_cast<int>(static_cast<long long>(data.n()) * (f + 1) / k);
    std::vector<int> val_idx(perm.begin() + lo, perm.begin() + hi);
    std::vector<int> train_idx(perm.begin(), perm.begin() + lo);
    train_idx.insert(train_idx.end(), perm.begin() + hi, perm.end());
    fold_train.push_back(subset(data, train_idx));
    fold_val.push_back(subset(data, val_idx));
  }

  CvResult result;
  bool have_best = false;
  double best_score = std::numeric_limits<double>::infinity();
  int grid_index = 0;
  for (double alpha : alpha_grid) {
    const auto trunc = TruncationSpec::make(trunc_kind, alpha, catoni_m);
    for (double lambda : lambda_grid) {
      double total = 0.0;
      for (int f = 0; f < k; ++f) {
        const auto w = detail::train_linear(
            fold_train[static_cast<std::size_t>(f)], base, trunc, lambda, sgd_config,
            derive_seed(seed, static_cast<std::uint64_t>(grid_index) * k + f + 1));
        total += detail::validation_score(base, w, fold_val[static_cast<std::size_t>(f)]);
      }
      const double score = total / k;
      result.table.push_back({alpha, lambda, score});

      const double tie_tol = 1e-9 + 1e-6 * std::max(std::fabs(score), std::fabs(best_score));
      const bool tie = have_best && std::fabs(score - best_score) <= tie_tol;
      const bool better = !have_best || (!tie && score < best_score);
      const bool tie_preferred =
          tie && (alpha > result.alpha || (alpha == result.alpha && lambda > result.lambda));
      if (better || tie_preferred) {
        // keep the smaller score as the reference even on a tie-break
        best_score = std::min(best_score, score);
        result.alpha = alpha;
        result.lambda = lambda;
        have_best = true;
      }
      ++grid_index;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Noise-level sweep
// ---------------------------------------------------------------------------

struct SweepCell {
  double level = 0.0;
  int trial = 0;
  std::string method;  ///< "truncated" or "untruncated"
  bool failed = false;
  std::string error;
  double mse = 0.0, mae = 0.0, stat_err = 0.0;
  double alpha = 0.0, lambda = 0.0;
  double ridge_mse = std::numeric_limits<double>::quiet_NaN();
};

struct SweepRow {
  double level = 0.0;
  std::string method;
  int trials_ok = 0;
  double mse_mean = 0.0, mse_std = 0.0;
  double mae_mean = 0.0, mae_std = 0.0;
  double stat_err_mean = 0.0, stat_err_std = 0.0;
  double alpha_mean = 0.0, lambda_mean = 0.0;
  double ridge_mse_mean = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepRow> rows;
};

namespace detail {

struct MeanStd {
  double mean = 0.0, std = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

inline SweepRow aggregate_cells(const std::vector<SweepCell>& cells, double level,
                                const std::string& method) {
  SweepRow row;
  row.level = level;
  row.method = method;
  std::vector<double> mse, mae, stat, alpha, lambda, ridge;
  for (const auto& cell : cells) {
    if (cell.level != level || cell.method != method || cell.failed) continue;
    mse.push_back(cell.mse);
    mae.push_back(cell.mae);
    stat.push_back(cell.stat_err);
    alpha.push_back(cell.alpha);
    lambda.push_back(cell.lambda);
    if (std::isfinite(cell.ridge_mse)) ridge.push_back(cell.ridge_mse);
  }
  row.trials_ok = static_cast<int>(mse.size());
  const auto m1 = mean_std(mse);
  row.mse_mean = m1.mean;
  row.mse_std = m1.std;
  const auto m2 = mean_std(mae);
  row.mae_mean = m2.mean;
  row.mae_std = m2.std;
  const auto m3 = mean_std(stat);
  row.stat_err_mean = m3.mean;
  row.stat_err_std = m3.std;
  row.alpha_mean = mean_std(alpha).mean;
  row.lambda_mean = mean_std(lambda).mean;
  row.ridge_mse_mean = ridge.empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : mean_std(ridge).mean;
  return row;
}

}  // namespace detail

/// One sweep: for every noise level and trial, generate data, cross-validate
/// (alpha, lambda) for the truncated method and lambda for the untruncated
/// baseline, train both by SGD on the identical train set, and evaluate on
/// the identical clean test set. Failures mark the cell, not the sweep.
inline SweepResult run_sweep(const ExperimentConfig& config) {
  if (config.levels.empty()) throw std::invalid_argument("run_sweep: level grid is empty");
  if (config.trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");

  SweepResult result;
  const auto base = config.base_loss();

  for (std::size_t li = 0; li < config.levels.size(); ++li) {
    const double level = config.levels[li];
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t cell_seed =
          derive_seed(config.seed, (static_cast<std::uint64_t>(li) << 20) | static_cast<std::uint64_t>(trial));
      SweepCell truncated, untruncated;
      truncated.level = untruncated.level = level;
      truncated.trial = untruncated.trial = trial;
      truncated.method = "truncated";
      untruncated.method = "untruncated";
      try {
        const auto noise = config.noise_model(level);
        const auto train = gen_linear(config.n, config.d, noise, derive_seed(cell_seed, 0));
        auto test = test_set_for(*train.w_star, config.n_test, derive_seed(cell_seed, 1));
        if (config.corrupt_test_inputs && config.noise_kind == NoiseKind::InputCorruption)
          corrupt_inputs(test, level, derive_seed(cell_seed, 6));

        const auto cv_trunc =
            cross_validate(train, base, config.trunc_kind, config.alpha_grid, config.lambda_grid,
                           config.cv_folds, derive_seed(cell_seed, 2), config.cv_sgd(), config.catoni_m);
        const auto cv_plain =
            cross_validate(train, base, config.trunc_kind, {kUntruncatedAlpha}, config.lambda_grid,
                           config.cv_folds, derive_seed(cell_seed, 3), config.cv_sgd(), config.catoni_m);

        const auto w_trunc = detail::train_linear(
            train, base, config.truncation(cv_trunc.alpha), cv_trunc.lambda, config.sgd,
            derive_seed(cell_seed, 4));
        const auto w_plain = detail::train_linear(
            train, base, config.truncation(kUntruncatedAlpha), cv_plain.lambda, config.sgd,
            derive_seed(cell_seed, 5));

        const auto fill = [&](SweepCell& cell, const LinearModel& w, const CvResult& cv) {
          const auto metrics = test_metrics(w, test);
          cell.mse = metrics.mse;
          cell.mae = metrics.mae;
          cell.stat_err = train.w_star ? statistical_error(w, *train.w_star)
                                       : std::numeric_limits<double>::quiet_NaN();
          cell.alpha = cv.alpha;
          cell.lambda = cv.lambda;
        };
        fill(truncated, w_trunc, cv_trunc);
        fill(untruncated, w_plain, cv_plain);

        try {
          const auto ridge = ridge_oracle(train, cv_plain.lambda);
          const double ridge_mse = test_metrics(ridge, test).mse;
          truncated.ridge_mse = untruncated.ridge_mse = ridge_mse;
        } catch (const std::exception&) {
          // singular normal equations with lambda = 0; leave the column NaN
        }
      } catch (const std::exception& e) {
        truncated.failed = untruncated.failed = true;
        truncated.error = untruncated.error = e.what();
      }
      result.cells.push_back(std::move(truncated));
      result.cells.push_back(std::move(untruncated));
    }
  }

  for (double level : config.levels)
    for (const char* method : {"truncated", "untruncated"})
      result.rows.push_back(detail::aggregate_cells(result.cells, level, method));
  return result;
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& result,
                            const ExperimentConfig& config) {
  CsvWriter csv(out);
  csv.header({"noise", "level", "method", "trials_ok", "mse_mean", "mse_std", "mae_mean",
              "mae_std", "stat_err_mean", "stat_err_std", "alpha_mean", "lambda_mean",
              "ridge_mse_mean", "seed", "config_hash"});
  for (const auto& row : result.rows) {
    csv.cell(std::string(to_string(config.noise_kind)))
        .cell(row.level)
        .cell(row.method)
        .cell(row.trials_ok)
        .cell(row.mse_mean)
        .cell(row.mse_std)
        .cell(row.mae_mean)
        .cell(row.mae_std)
        .cell(row.stat_err_mean)
        .cell(row.stat_err_std)
        .cell(row.alpha_mean)
        .cell(row.lambda_mean)
        .cell(row.ridge_mse_mean)
        .cell(config.seed)
        .cell(config.config_hash());
    csv.end_row();
  }
}

// ---------------------------------------------------------------------------
// Statistical-error rate check
// ---------------------------------------------------------------------------

struct RateCheckResult {
  std::vector<std::pair<int, double>> rows;  ///< (n, median statistical error)
  double slope = 0.0;                        ///< fitted log-log slope
};

/// Median statistical error |w - w*| after SGD with fixed (alpha, lambda),
/// per training-set size, plus the least-squares slope of log(error) on
/// log(n); a sqrt(1/n) rate shows up as a slope near -1/2.
inline RateCheckResult rate_check(const ExperimentConfig& config) {
  if (config.n_grid.size() < 3)
    throw std::invalid_argument("rate_check: need at least three n values");
  for (std::size_t i = 1; i < config.n_grid.size(); ++i)
    if (config.n_grid[i] <= config.n_grid[i - 1])
      throw std::invalid_argument("rate_check: n grid must be ascending");

  const auto base = config.base_loss();
  const auto trunc = config.truncation(config.fixed_alpha);
  const auto noise = config.noise_model(config.levels.front());

  RateCheckResult result;
  for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    const int n = config.n_grid[ni];
    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>(config.trials));
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t cell_seed =
          derive_seed(config.seed, (static_cast<std::uint64_t>(ni) << 20) | static_cast<std::uint64_t>(trial));
      const auto train = gen_linear(n, config.d, noise, derive_seed(cell_seed, 0));
      const auto w = detail::train_linear(train, base, trunc, config.fixed_lambda, config.sgd,
                                          derive_seed(cell_seed, 1));
      errors.push_back(statistical_error(w, *train.w_star));
    }
    std::sort(errors.begin(), errors.end());
    const auto mid = errors.size() / 2;
    const double median = errors.size() % 2 ? errors[mid] : 0.5 * (errors[mid - 1] + errors[mid]);
    result.rows.emplace_back(n, median);
  }

  // least-squares slope of log(err) against log(n)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto count = static_cast<double>(result.rows.size());
  for (const auto& [n, err] : result.rows) {
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  result.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return result;
}

inline void write_rate_check_csv(std::ostream& out, const RateCheckResult& result,
                                 const ExperimentConfig& config) {
  CsvWriter csv(out);
  csv.header({"n", "median_stat_err", "loglog_slope", "seed", "config_hash"});
  for (const auto& [n, err] : result.rows) {
    csv.cell(n).cell(err).cell(result.slope).cell(config.seed).cell(config.config_hash());
    csv.end_row();
  }
}

// ---------------------------------------------------------------------------
// Housing protocol
// ---------------------------------------------------------------------------

struct HousingCell {
  int trial = 0;
  std::string base;    ///< "square" or "absolute"
  std::string method;  ///< "truncated" or "untruncated"
  double alpha = 0.0, lambda = 0.0;
  double mse = 0.0, mae = 0.0;
};

struct HousingResult {
  std::vector<HousingCell> cells;

  /// Mean of the given metric over trials for one (base, method) arm.
  double mean(const std::string& base, const std::string& method, bool use_mae) const {
    double sum = 0.0;
    int count = 0;
    for (const auto& cell : cells) {
      if (cell.base != base || cell.method != method) continue;
      sum += use_mae ? cell.mae : cell.mse;
      ++count;
    }
    if (count == 0) throw std::runtime_error("HousingResult: no cells for " + base + "/" + method);
    return sum / count;
  }
};

namespace detail {

// z-scores features by train statistics and appends a constant-1 intercept
// column (the raw housing features are on wildly different scales and the
// model has no intercept otherwise).
inline void standardize_with_intercept(Dataset& train, Dataset& test) {
  const Eigen::VectorXd mean = train.X.colwise().mean();
  Eigen::VectorXd sd(train.dim());
  for (int j = 0; j < train.dim(); ++j) {
    const double ss = (train.X.col(j).array() - mean[j]).square().sum();
    sd[j] = std::sqrt(ss / std::max(1, train.n() - 1));
    if (!(sd[j] > 0.0)) sd[j] = 1.0;
  }
  auto apply = [&](Dataset& data) {
    RowMajorMatrix augmented(data.n(), data.dim() + 1);
    for (int j = 0; j < data.dim(); ++j)
      augmented.col(j) = (data.X.col(j).array() - mean[j]) / sd[j];
    augmented.col(data.dim()).setOnes();
    data.X = std::move(augmented);
    data.w_star.reset();
  };
  apply(train);
  apply(test);
}

}  // namespace detail

/// The housing protocol: per trial, split the file 50/50 at random,
/// standardize by train statistics (plus intercept column), cross-validate
/// on the training half, train by SGD, and report clean-test MSE/MAE for
/// both base losses and both methods.
inline HousingResult run_housing(const Dataset& full, const ExperimentConfig& config) {
  full.require_consistent();
  if (full.n() < 4) throw std::invalid_argument("run_housing: dataset too small");

  HousingResult result;
  const int n_train = full.n() / 2;
  for (int trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(trial));
    auto split = train_test_split(full, n_train, derive_seed(trial_seed, 0));
    Dataset& train = split.first;
    Dataset& test = split.second;
    detail::standardize_with_intercept(train, test);

    int arm = 0;
    for (const auto base : {BaseLoss::square(), BaseLoss::absolute()}) {
      const auto cv_trunc = cross_validate(train, base, config.trunc_kind, config.alpha_grid,
                                           config.lambda_grid, config.cv_folds,
                                           derive_seed(trial_seed, 1 + 4 * arm), config.cv_sgd(),
                                           config.catoni_m);
      const auto cv_plain = cross_validate(train, base, config.trunc_kind, {kUntruncatedAlpha},
                                           config.lambda_grid, config.cv_folds,
                                           derive_seed(trial_seed, 2 + 4 * arm), config.cv_sgd(),
                                           config.catoni_m);
      const auto w_trunc = detail::train_linear(
          train, base, TruncationSpec::make(config.trunc_kind, cv_trunc.alpha, config.catoni_m),
          cv_trunc.lambda, config.sgd, derive_seed(trial_seed, 3 + 4 * arm));
      const auto w_plain = detail::train_linear(
          train, base, TruncationSpec::make(config.trunc_kind, kUntruncatedAlpha, config.catoni_m),
          cv_plain.lambda, config.sgd, derive_seed(trial_seed, 4 + 4 * arm));

      const auto push = [&](const char* method, const LinearModel& w, const CvResult& cv) {
        const auto metrics = test_metrics(w, test);
        result.cells.push_back({trial, to_string(base.kind), method, cv.alpha, cv.lambda,
                                metrics.mse, metrics.mae});
      };
      push("truncated", w_trunc, cv_trunc);
      push("untruncated", w_plain, cv_plain);
      ++arm;
    }
  }
  return result;
}

inline HousingResult run_housing(const std::string& path, const ExperimentConfig& config) {
  return run_housing(parse_libsvm_file(path), config);
}

inline void write_housing_csv(std::ostream& out, const HousingResult& result,
                              const ExperimentConfig& config) {
  CsvWriter csv(out);
  csv.header({"trial", "base", "method", "alpha", "lambda", "mse", "mae", "seed", "config_hash"});
  for (const auto& cell : result.cells) {
    csv.cell(cell.trial)
        .cell(cell.base)
        .cell(cell.method)
        .cell(cell.alpha)
        .cell(cell.lambda)
        .cell(cell.mse)
        .cell(cell.mae)
        .cell(config.seed)
        .cell(config.config_hash());
    csv.end_row();
  }
}

// ---------------------------------------------------------------------------
// MLP demo
// ---------------------------------------------------------------------------

struct MlpDemoCell {
  int trial = 0;
  std::string method;
  double mse = 0.0, mae = 0.0;
};

struct MlpDemoResult {
  std::vector<MlpDemoCell> cells;

  double mean_mse(const std::string& method) const {
    double sum = 0.0;
    int count = 0;
    for (const auto& cell : cells)
      if (cell.method == method) {
        sum += cell.mse;
        ++count;
      }
    if (count == 0) throw std::runtime_error("MlpDemoResult: no cells for " + method);
    return sum / count;
  }
};

/// Teacher-student demo: a fixed random teacher MLP generates a nonlinear
/// target; training labels receive sparse output corruption; students with
/// and without truncation share the init, data order, and step size, so the
/// comparison isolates the truncation of the loss.
inline MlpDemoResult run_mlp_demo(const ExperimentConfig& config) {
  if (config.sgd.step_rule != StepRule::Constant)
    throw std::invalid_argument("run_mlp_demo: use a constant step size for the MLP");
  const double beta = config.levels.front();

  std::vector<int> teacher_dims = {config.d, config.teacher_hidden, config.teacher_hidden, 1};
  const auto teacher = mlp_init(teacher_dims, derive_seed(config.seed, 0x7EAC));

  std::vector<int> student_dims;
  student_dims.push_back(config.d);
  for (int h : config.hidden_dims) student_dims.push_back(h);
  student_dims.push_back(1);

  MlpDemoResult result;
  for (int trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(trial));

    auto make_inputs = [&](int rows, std::uint64_t seed) {
      Rng rng(seed);
      RowMajorMatrix x(rows, config.d);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < config.d; ++j) x(i, j) = rng.normal();
      return x;
    };

    Dataset train;
    train.X = make_inputs(config.n, derive_seed(trial_seed, 0));
    train.y = Eigen::VectorXd(config.n);
    for (int i = 0; i < config.n; ++i) train.y[i] = forward(teacher, train.X.row(i).transpose());
    {
      Rng noise_rng(derive_seed(trial_seed, 1));
      for (int i = 0; i < config.n; ++i) train.y[i] += config.base_sigma * noise_rng.normal();
      if (beta > 0.0) {
        const int k = static_cast<int>(std::lround(config.fraction * config.n));
        const auto idx = detail::choose_indices(config.n, k, noise_rng);
        for (int i : idx) train.y[i] += noise_rng.uniform(-beta, beta);
        train.provenance.corrupted_indices = idx;
      }
    }

    Dataset test;
    test.X = make_inputs(config.n_test, derive_seed(trial_seed, 2));
    test.y = Eigen::VectorXd(config.n_test);
    for (int i = 0; i < config.n_test; ++i) test.y[i] = forward(teacher, test.X.row(i).transpose());

    const auto init = mlp_init(student_dims, derive_seed(trial_seed, 3));
    auto train_student = [&](double alpha) {
      SgdConfig sgd_config = config.sgd;
      sgd_config.seed = derive_seed(trial_seed, 4);  // shared stream: paired data order
      sgd_config.lambda = config.fixed_lambda;
      MlpProblem problem(train, TruncatedLoss{config.base_loss(), config.truncation(alpha)},
                         config.fixed_lambda);
      return sgd(problem, init, sgd_config).final_model;
    };

    const auto student_trunc = train_student(config.fixed_alpha);
    const auto student_plain = train_student(kUntruncatedAlpha);

    auto evaluate = [&](const MlpModel& model, const char* method) {
      double se = 0.0, ae = 0.0;
      for (int i = 0; i < config.n_test; ++i) {
        const double r = forward(model, test.X.row(i).transpose()) - test.y[i];
        se += r * r;
        ae += std::fabs(r);
      }
      result.cells.push_back({trial, method, se / config.n_test, ae / config.n_test});
    };
    evaluate(student_trunc, "truncated");
    evaluate(student_plain, "untruncated");
  }
  return result;
}

inline void write_mlp_demo_csv(std::ostream& out, const MlpDemoResult& result,
                               const ExperimentConfig& config) {
  CsvWriter csv(out);
  csv.header({"trial", "method", "mse", "mae", "seed", "config_hash"});
  for (const auto& cell : result.cells) {
    csv.cell(cell.trial).cell(cell.method).cell(cell.mse).cell(cell.mae).cell(config.seed).cell(
        config.config_hash());
    csv.end_row();
  }
}

// ---------------------------------------------------------------------------
// Axiom-check and Q-Q CSV output
// ---------------------------------------------------------------------------

inline void write_axiom_csv(std::ostream& out, const AxiomReport& report,
                            const TruncationSpec& spec, std::uint64_t seed = 0,
                            std::uint64_t config_hash = 0) {
  CsvWriter csv(out);
  csv.header({"kind", "axiom", "pass", "worst_violation", "worst_u", "worst_alpha", "seed",
              "config_hash"});
  for (const auto& check : report.checks) {
    csv.cell(std::string(to_string(spec.kind)))
        .cell(check.name)
        .cell(check.pass ? std::string("1") : std::string("0"))
        .cell(check.worst_violation)
        .cell(check.worst_u)
        .cell(check.worst_alpha)
        .cell(seed)
        .cell(config_hash);
    csv.end_row();
  }
}

inline void write_qq_csv(std::ostream& out, const std::vector<std::pair<double, double>>& points,
                         std::uint64_t seed = 0, std::uint64_t config_hash = 0) {
  CsvWriter csv(out);
  csv.header({"theoretical_quantile", "empirical_quantile", "seed", "config_hash"});
  for (const auto& [theoretical, empirical] : points) {
    csv.cell(theoretical).cell(empirical).cell(seed).cell(config_hash);
    csv.end_row();
  }
}

}  // namespace truncreg
