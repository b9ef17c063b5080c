// Command-line driver for the truncated-loss regression experiments.
//
// Subcommands: gen, train, sweep, crossval, rate-check, housing, mlp-demo,
// qq, check-axioms. Every command accepts --seed and --out, plus
// --config <file> with "key=value" lines whose keys equal the long flag
// names. Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
// failure (including axiom violations from check-axioms).

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "truncreg/csv.hpp"
#include "truncreg/datagen.hpp"
#include "truncreg/dataset.hpp"
#include "truncreg/harness.hpp"
#include "truncreg/linear_model.hpp"
#include "truncreg/mlp.hpp"
#include "truncreg/sgd.hpp"
#include "truncreg/truncation.hpp"

namespace {

using namespace truncreg;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

LossKind parse_loss(const std::string& name) {
  if (name == "square") return LossKind::Square;
  if (name == "absolute") return LossKind::Absolute;
  if (name == "huber") return LossKind::Huber;
  if (name == "eps-insensitive") return LossKind::EpsInsensitive;
  if (name == "pinball") return LossKind::Pinball;
  throw CLI::ValidationError("--base", "unknown base loss '" + name + "'");
}

TruncationKind parse_trunc(const std::string& name) {
  if (name == "log") return TruncationKind::Log;
  if (name == "catoni") return TruncationKind::CatoniM;
  if (name == "cubic-hard") return TruncationKind::CubicHard;
  throw CLI::ValidationError("--trunc", "unknown truncation kind '" + name + "'");
}

NoiseKind parse_noise(const std::string& name) {
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "student-t") return NoiseKind::StudentT;
  if (name == "pareto") return NoiseKind::ParetoRecentered;
  if (name == "corrupt-output") return NoiseKind::SparseOutputCorruption;
  if (name == "corrupt-input") return NoiseKind::InputCorruption;
  throw CLI::ValidationError("--noise", "unknown noise model '" + name + "'");
}

StepRule parse_rule(const std::string& name) {
  if (name == "constant") return StepRule::Constant;
  if (name == "inv-sqrt-t") return StepRule::InverseSqrtT;
  throw CLI::ValidationError("--step-rule", "unknown step rule '" + name + "'");
}

struct CliOptions {
  ExperimentConfig config;
  std::string base = "square";
  std::string trunc = "log";
  std::string noise = "corrupt-output";
  std::string step_rule = "inv-sqrt-t";
  long long steps = 0;  // 0 -> auto (50 n)
  std::string data_path;
  std::string in_path;
  std::string wstar_out;
  std::string model_out;
  double level = 50.0;
  double alpha = 10.0;
  double lambda = 1e-3;
  double grid_max = 100.0;
  int grid_points = 2000;

  void finalize(int n_for_auto_steps) {
    config.base_kind = parse_loss(base);
    config.trunc_kind = parse_trunc(trunc);
    config.noise_kind = parse_noise(noise);
    config.sgd.step_rule = parse_rule(step_rule);
    config.sgd.total_steps = steps > 0 ? steps : 50LL * n_for_auto_steps;
    if (config.sgd.record_every <= 0) config.sgd.record_every = 100;
  }
};

void add_method_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--base", opt.base, "base loss: square|absolute|huber|eps-insensitive|pinball");
  cmd->add_option("--base-param", opt.config.base_param,
                  "huber delta / eps tube width / pinball tau");
  cmd->add_option("--trunc", opt.trunc, "truncation kind: log|catoni|cubic-hard");
  cmd->add_option("--catoni-m", opt.config.catoni_m, "order m of the catoni family");
}

void add_sgd_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--steps", opt.steps, "SGD steps (default 50*n)");
  cmd->add_option("--step-rule", opt.step_rule, "constant|inv-sqrt-t");
  cmd->add_option("--eta", opt.config.sgd.eta, "constant step size");
  cmd->add_option("--batch", opt.config.sgd.batch_size, "minibatch size");
  cmd->add_option("--record-every", opt.config.sgd.record_every, "trace recording stride");
}

void add_grid_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--alphas", opt.config.alpha_grid, "alpha grid")->delimiter(',');
  cmd->add_option("--lambdas", opt.config.lambda_grid, "lambda grid")->delimiter(',');
  cmd->add_option("--cv-folds", opt.config.cv_folds, "cross-validation folds");
  cmd->add_option("--cv-steps", opt.config.cv_total_steps,
                  "SGD steps inside CV folds (0 = same as --steps)");
}

void add_data_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--n", opt.config.n, "training samples");
  cmd->add_option("--d", opt.config.d, "feature dimension");
  cmd->add_option("--n-test", opt.config.n_test, "test samples");
  cmd->add_option("--trials", opt.config.trials, "random trials");
  cmd->add_option("--noise", opt.noise,
                  "gaussian|student-t|pareto|corrupt-output|corrupt-input");
  cmd->add_option("--levels", opt.config.levels, "noise level grid")->delimiter(',');
  cmd->add_option("--fraction", opt.config.fraction, "corrupted-output nonzero fraction");
  cmd->add_option("--base-sigma", opt.config.base_sigma, "gaussian sigma under corruption");
  cmd->add_flag("--corrupt-test-inputs", opt.config.corrupt_test_inputs,
                "also corrupt test inputs (corrupt-input only)");
}

std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  if (values.empty()) throw std::runtime_error("no numbers in input file: " + path);
  return values;
}

std::string trimmed(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

// Expands "--config <file>" into --key=value tokens (keys identical to the
// long flag names, one per line, '#' comments allowed). Explicit
// command-line flags win over config-file entries.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
    } else {
      ++i;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file: " + config_path);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string entry = trimmed(line);
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error("config file line " + std::to_string(line_number) +
                               ": expected key=value");
    const std::string key = trimmed(entry.substr(0, eq));
    const std::string value = trimmed(entry.substr(eq + 1));
    const std::string flag = "--" + key;
    bool given = false;  // explicit flags take precedence
    for (const auto& arg : args)
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) given = true;
    if (!given) args.push_back(flag + "=" + value);
  }
  return args;
}

int run(int argc, char** argv) {
  CLI::App app{"truncated-loss robust regression experiments"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string config_path_for_help;
  const auto add_common_flags = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.config.seed, "master RNG seed");
    cmd->add_option("--out", opt.config.output_path, "output CSV path");
    // consumed by expand_config before parsing; registered for --help only
    cmd->add_option("--config", config_path_for_help, "read options from a key=value file");
  };

  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset (libsvm format)");
  add_common_flags(gen);
  add_data_flags(gen, opt);
  gen->add_option("--level", opt.level, "noise level (sigma/df/tail/beta)");
  gen->add_option("--wstar-out", opt.wstar_out, "also write the true weights, one per line");

  auto* train = app.add_subcommand("train", "train one model by SGD on a libsvm file");
  add_common_flags(train);
  train->add_option("--data", opt.data_path, "libsvm input")->required();
  add_method_flags(train, opt);
  add_sgd_flags(train, opt);
  train->add_option("--alpha", opt.alpha, "truncation level");
  train->add_option("--lambda", opt.lambda, "ridge weight");
  train->add_option("--model-out", opt.model_out, "write final weights, one per line");

  auto* sweep = app.add_subcommand("sweep", "noise-level sweep: truncated vs untruncated");
  add_common_flags(sweep);
  add_data_flags(sweep, opt);
  add_method_flags(sweep, opt);
  add_sgd_flags(sweep, opt);
  add_grid_flags(sweep, opt);

  auto* crossval = app.add_subcommand("crossval", "k-fold CV over (alpha, lambda)");
  add_common_flags(crossval);
  crossval->add_option("--data", opt.data_path, "libsvm input")->required();
  add_method_flags(crossval, opt);
  add_sgd_flags(crossval, opt);
  add_grid_flags(crossval, opt);

  auto* rate = app.add_subcommand("rate-check", "statistical error vs n at fixed alpha");
  add_common_flags(rate);
  add_data_flags(rate, opt);
  add_method_flags(rate, opt);
  add_sgd_flags(rate, opt);
  rate->add_option("--n-grid", opt.config.n_grid, "training sizes")->delimiter(',');
  rate->add_option("--fixed-alpha", opt.config.fixed_alpha, "truncation level");
  rate->add_option("--fixed-lambda", opt.config.fixed_lambda, "ridge weight");

  auto* housing = app.add_subcommand("housing", "the 50/50-split real-data protocol");
  add_common_flags(housing);
  housing->add_option("--data", opt.data_path, "libsvm input")->required();
  housing->add_option("--trials", opt.config.trials, "random splits");
  add_method_flags(housing, opt);
  add_sgd_flags(housing, opt);
  add_grid_flags(housing, opt);

  auto* mlp = app.add_subcommand("mlp-demo", "teacher-student MLP with corrupted labels");
  add_common_flags(mlp);
  add_data_flags(mlp, opt);
  add_method_flags(mlp, opt);
  add_sgd_flags(mlp, opt);
  mlp->add_option("--hidden", opt.config.hidden_dims, "student hidden widths")->delimiter(',');
  mlp->add_option("--teacher-hidden", opt.config.teacher_hidden, "teacher hidden width");
  mlp->add_option("--fixed-alpha", opt.config.fixed_alpha, "truncation level");
  mlp->add_option("--fixed-lambda", opt.config.fixed_lambda, "ridge weight");

  auto* qq = app.add_subcommand("qq", "Q-Q plot data against the standard normal");
  add_common_flags(qq);
  qq->add_option("--in", opt.in_path, "text file of residuals, one per line")->required();

  auto* axioms = app.add_subcommand("check-axioms", "verify the truncation-function axioms");
  add_common_flags(axioms);
  add_method_flags(axioms, opt);
  axioms->add_option("--alphas", opt.config.alpha_grid, "alpha grid")->delimiter(',');
  axioms->add_option("--grid-max", opt.grid_max, "largest grid point");
  axioms->add_option("--grid-points", opt.grid_points, "number of grid points");

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 vector parse wants reverse order
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  const bool want_file = !opt.config.output_path.empty();
  std::ofstream file_out;
  if (want_file) file_out = open_output(opt.config.output_path);
  std::ostream& out = want_file ? static_cast<std::ostream&>(file_out) : std::cout;

  if (gen->parsed()) {
    opt.finalize(opt.config.n);
    opt.config.levels = {opt.level};
    const auto data =
        gen_linear(opt.config.n, opt.config.d, opt.config.noise_model(opt.level), opt.config.seed);
    write_libsvm(out, data);
    if (!opt.wstar_out.empty()) {
      auto wout = open_output(opt.wstar_out);
      char buffer[40];
      for (int j = 0; j < data.dim(); ++j) {
        std::snprintf(buffer, sizeof buffer, "%.17g", (*data.w_star)[j]);
        wout << buffer << '\n';
      }
    }
    return 0;
  }

  if (train->parsed()) {
    const auto data = parse_libsvm_file(opt.data_path);
    opt.finalize(data.n());
    opt.config.fixed_alpha = opt.alpha;  // so the config hash covers them
    opt.config.fixed_lambda = opt.lambda;
    const auto spec = ObjectiveSpec::make(
        TruncatedLoss{opt.config.base_loss(), opt.config.truncation(opt.alpha)}, opt.lambda);
    LinearProblem problem(spec, data);
    SgdConfig sgd_config = opt.config.sgd;
    sgd_config.seed = opt.config.seed;
    sgd_config.lambda = opt.lambda;
    const auto report = sgd(problem, LinearModel(Eigen::VectorXd::Zero(data.dim())), sgd_config);

    CsvWriter csv(out);
    csv.header({"step", "objective", "grad_norm_sq", "seed", "config_hash"});
    for (std::size_t i = 0; i < report.objective_trace.size(); ++i) {
      csv.cell(report.objective_trace[i].first)
          .cell(report.objective_trace[i].second)
          .cell(report.grad_norm_trace[i].second)
          .cell(opt.config.seed)
          .cell(opt.config.config_hash());
      csv.end_row();
    }
    if (!opt.model_out.empty()) {
      auto mout = open_output(opt.model_out);
      char buffer[40];
      for (int j = 0; j < data.dim(); ++j) {
        std::snprintf(buffer, sizeof buffer, "%.17g", report.final_model[j]);
        mout << buffer << '\n';
      }
    }
    const double variance =
        grad_variance(problem, report.final_model, std::min(data.n(), 256), opt.config.seed);
    std::fprintf(stdout, "final_objective=%.9g final_grad_norm_sq=%.9g grad_variance=%.9g\n",
                 report.objective_trace.back().second, report.final_grad_norm_sq(), variance);
    return 0;
  }

  if (sweep->parsed()) {
    opt.config.task = Task::Sweep;
    opt.finalize(opt.config.n);
    const auto result = run_sweep(opt.config);
    write_sweep_csv(out, result, opt.config);
    return 0;
  }

  if (crossval->parsed()) {
    opt.config.task = Task::CrossVal;
    const auto data = parse_libsvm_file(opt.data_path);
    opt.finalize(data.n());
    SgdConfig sgd_config = opt.config.sgd;
    const auto cv = cross_validate(data, opt.config.base_loss(), opt.config.trunc_kind,
                                   opt.config.alpha_grid, opt.config.lambda_grid,
                                   opt.config.cv_folds, opt.config.seed, sgd_config,
                                   opt.config.catoni_m);
    CsvWriter csv(out);
    csv.header({"alpha", "lambda", "mean_score", "selected", "seed", "config_hash"});
    for (const auto& cell : cv.table) {
      const bool selected = cell.alpha == cv.alpha && cell.lambda == cv.lambda;
      csv.cell(cell.alpha)
          .cell(cell.lambda)
          .cell(cell.mean_score)
          .cell(selected ? std::string("1") : std::string("0"))
          .cell(opt.config.seed)
          .cell(opt.config.config_hash());
      csv.end_row();
    }
    std::fprintf(stdout, "selected_alpha=%.9g selected_lambda=%.9g\n", cv.alpha, cv.lambda);
    return 0;
  }

  if (rate->parsed()) {
    opt.config.task = Task::RateCheck;
    opt.finalize(opt.config.n_grid.back());
    const auto result = rate_check(opt.config);
    write_rate_check_csv(out, result, opt.config);
    std::fprintf(stdout, "loglog_slope=%.9g\n", result.slope);
    return 0;
  }

  if (housing->parsed()) {
    opt.config.task = Task::Housing;
    const auto data = parse_libsvm_file(opt.data_path);
    opt.finalize(data.n() / 2);
    const auto result = run_housing(data, opt.config);
    write_housing_csv(out, result, opt.config);
    for (const char* base : {"square", "absolute"}) {
      const bool mae = std::string(base) == "absolute";
      std::fprintf(stdout, "%s_%s: truncated=%.9g untruncated=%.9g\n", base,
                   mae ? "mae" : "mse", result.mean(base, "truncated", mae),
                   result.mean(base, "untruncated", mae));
    }
    return 0;
  }

  if (mlp->parsed()) {
    opt.config.task = Task::MlpDemo;
    if (opt.steps == 0) opt.steps = 50LL * opt.config.n;
    if (!mlp->count("--step-rule")) opt.step_rule = "constant";
    if (!mlp->count("--eta") && opt.config.sgd.eta == 0.0) opt.config.sgd.eta = 0.005;
    opt.finalize(opt.config.n);
    const auto result = run_mlp_demo(opt.config);
    write_mlp_demo_csv(out, result, opt.config);
    std::fprintf(stdout, "mlp_mse: truncated=%.9g untruncated=%.9g\n",
                 result.mean_mse("truncated"), result.mean_mse("untruncated"));
    return 0;
  }

  if (qq->parsed()) {
    const auto residuals = read_numbers(opt.in_path);
    write_qq_csv(out, qq_data(residuals), opt.config.seed,
                 fnv1a_hash("qq in=" + opt.in_path));
    return 0;
  }

  if (axioms->parsed()) {
    opt.config.task = Task::AxiomCheck;
    opt.finalize(1);
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(opt.grid_points));
    for (int i = 0; i < opt.grid_points; ++i)
      grid.push_back(opt.grid_max * i / (opt.grid_points - 1.0));
    // the config default is the CV grid; use the standard axiom grid unless given
    std::vector<double> alphas = opt.config.alpha_grid;
    if (!axioms->count("--alphas")) alphas = {0.5, 1.0, 10.0, 100.0};
    const auto spec = TruncationSpec::make(opt.config.trunc_kind, alphas.front(), opt.config.catoni_m);
    const auto report = check_axioms(spec, grid, alphas);
    write_axiom_csv(out, report, spec, opt.config.seed, opt.config.config_hash());
    for (const auto& check : report.checks)
      std::fprintf(stdout, "%-34s %s (worst violation %.3g)\n", check.name.c_str(),
                   check.pass ? "PASS" : "FAIL", check.worst_violation);
    return report.all_pass() ? 0 : kExitNumerical;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const truncreg::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
