// Truncation functions: concave transforms phi_alpha of a nonnegative loss
// that behave like the identity near zero (phi(0) = 0, phi'(0) = 1) and
// flatten for large arguments, with the truncation level set by alpha
// (larger alpha, less truncation).
//
// Three families are provided:
//   Log        phi(u) = alpha * log(1 + u/alpha)
//   CatoniM(m) phi(u) = alpha * log(1 + sum_{k=1..m} u^k / (alpha^k k!))
//   CubicHard  phi(u) = alpha/3 * (1 - (1 - u/alpha)^3) for u < alpha,
//              alpha/3 beyond (hard plateau)
//
// Each family carries three constants:
//   M       quadratic-gap constant: |phi(u) - u| <= M u^2 / alpha
//   kappa   curvature constant: |x^2 phi''(x^2)| <= kappa, alpha-free
//   L_alpha bound on |phi''|
// check_axioms() verifies all of the defining properties on a user grid and
// reports the worst violation per axiom.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace truncreg {

enum class TruncationKind { Log, CatoniM, CubicHard };

inline const char* to_string(TruncationKind kind) {
  switch (kind) {
    case TruncationKind::Log: return "log";
    case TruncationKind::CatoniM: return "catoni";
    case TruncationKind::CubicHard: return "cubic-hard";
  }
  return "?";
}

/// Per-kind constants; see the header comment for their meaning.
struct TruncationConstants {
  double m_gap;    ///< M in |phi(u) - u| <= M u^2 / alpha
  double kappa;    ///< bound on |x^2 phi''(x^2)|
  double l_alpha;  ///< bound on |phi''|
};

/// One member of the truncation family: kind plus level alpha.
///
/// catoni_m is the order of the CatoniM log-polynomial (m = 2 is the
/// classic Catoni-style influence); ignored by the other kinds.
struct TruncationSpec {
  TruncationKind kind = TruncationKind::Log;
  double alpha = 1.0;
  int catoni_m = 2;

  static TruncationSpec log_kind(double alpha) { return validated({TruncationKind::Log, alpha, 2}); }
  static TruncationSpec catoni(double alpha, int m = 2) {
    return validated({TruncationKind::CatoniM, alpha, m});
  }
  static TruncationSpec cubic_hard(double alpha) {
    return validated({TruncationKind::CubicHard, alpha, 2});
  }
  static TruncationSpec make(TruncationKind kind, double alpha, int m = 2) {
    return validated({kind, alpha, m});
  }

  static TruncationSpec validated(TruncationSpec spec) {
    if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha))
      throw std::invalid_argument("TruncationSpec: alpha must be positive and finite");
    if (spec.kind == TruncationKind::CatoniM && spec.catoni_m < 1)
      throw std::invalid_argument("TruncationSpec: CatoniM requires m >= 1");
    return spec;
  }
};

namespace detail {

inline void require_nonnegative(double u) {
  if (std::isnan(u) || u < 0.0)
    throw std::domain_error("truncation: argument must be nonnegative");
}

// Partial exponential sum sum_{k=0..m} t^k / k!, evaluated by forward
// recurrence; terms stay positive so there is no cancellation.
inline double exp_partial_sum(double t, int m) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= m; ++k) {
    term *= t / k;
    sum += term;
  }
  return sum;
}

// Same sum without the constant term, sum_{k=1..m} t^k / k!; summing the
// tail directly keeps full relative precision for tiny t (the +1/-1 round
// trip would cost absolute 1-ulp errors that dwarf t itself).
inline double exp_partial_sum_tail(double t, int m) {
  double term = 1.0, sum = 0.0;
  for (int k = 1; k <= m; ++k) {
    term *= t / k;
    sum += term;
  }
  return sum;
}

}  // namespace detail

/// phi_alpha(u) for u >= 0. Result lies in [0, u]; CubicHard returns
/// exactly alpha/3 on its plateau u >= alpha.
inline double phi(const TruncationSpec& spec, double u) {
  detail::require_nonnegative(u);
  const double a = spec.alpha;
  switch (spec.kind) {
    case TruncationKind::Log:
      return a * std::log1p(u / a);
    case TruncationKind::CatoniM: {
      const double t = u / a;
      const int m = spec.catoni_m;
      const double s = detail::exp_partial_sum_tail(t, m);
      if (std::isinf(s))  // dominant-term fallback for astronomically large t
        return a * (m * std::log(t) - std::lgamma(m + 1.0));
      return a * std::log1p(s);
    }
    case TruncationKind::CubicHard: {
      if (u >= a) return a / 3.0;
      const double t = u / a;
      // (a/3)(1 - (1-t)^3) expanded to u (1 - t + t^2/3); avoids cancellation
      // for small t and hits the plateau value exactly at t = 1.
      return u * (1.0 - t + t * t / 3.0);
    }
  }
  return 0.0;
}

/// phi'_alpha(u); equals 1 at u = 0, decreases monotonically to 0.
inline double phi_prime(const TruncationSpec& spec, double u) {
  detail::require_nonnegative(u);
  const double a = spec.alpha;
  const double t = u / a;
  switch (spec.kind) {
    case TruncationKind::Log:
      return 1.0 / (1.0 + t);
    case TruncationKind::CatoniM: {
      const int m = spec.catoni_m;
      const double num = detail::exp_partial_sum(t, m - 1);
      const double den = detail::exp_partial_sum(t, m);
      if (std::isinf(den)) return t > 0.0 ? m / t : 1.0;
      return num / den;
    }
    case TruncationKind::CubicHard: {
      if (t >= 1.0) return 0.0;
      const double s = 1.0 - t;
      return s * s;
    }
  }
  return 0.0;
}

/// phi''_alpha(u). Nonpositive for Log and CatoniM; |phi''| <= L_alpha.
/// CubicHard is taken one-sidedly from the left at the joint u = alpha
/// (both one-sided values are 0 there; the kink is in phi''').
inline double phi_second(const TruncationSpec& spec, double u) {
  detail::require_nonnegative(u);
  const double a = spec.alpha;
  const double t = u / a;
  switch (spec.kind) {
    case TruncationKind::Log: {
      const double d = 1.0 + t;
      return -(1.0 / a) / (d * d);
    }
    case TruncationKind::CatoniM: {
      // phi' = N/D with N, D partial exponential sums; differentiating the
      // ratio gives phi'' = (P D - N^2) / (alpha D^2), P the order-(m-2) sum.
      const int m = spec.catoni_m;
      const double n = detail::exp_partial_sum(t, m - 1);
      const double d = detail::exp_partial_sum(t, m);
      const double p = m >= 2 ? detail::exp_partial_sum(t, m - 2) : 0.0;
      if (std::isinf(d)) return t > 0.0 ? -m / (a * t * t) : 0.0;
      return (p * d - n * n) / (a * d * d);
    }
    case TruncationKind::CubicHard: {
      if (t >= 1.0) return 0.0;
      return -(2.0 / a) * (1.0 - t);
    }
  }
  return 0.0;
}

/// The (M, kappa, L_alpha) constants for the given spec.
///
/// kappa for Log is the sharp value 1/4 (max of s/(1+s)^2); for CubicHard
/// the sharp alpha-free value 1/2 (max of 2s(1-s) on [0,1]); for CatoniM
/// the looser bound 1 is used, validated on grids by check_axioms.
inline TruncationConstants constants_of(const TruncationSpec& spec) {
  switch (spec.kind) {
    case TruncationKind::Log:
      return {0.5, 0.25, 1.0 / spec.alpha};
    case TruncationKind::CatoniM:
      return {0.5, 1.0, 1.0 / spec.alpha};
    case TruncationKind::CubicHard:
      return {1.0, 0.5, 2.0 / spec.alpha};
  }
  return {0.5, 1.0, 1.0 / spec.alpha};
}

/// Result of one axiom check: worst violation over the grid and where it
/// occurred. violation <= tolerance counts as a pass.
struct AxiomCheck {
  std::string name;
  bool pass = true;
  double worst_violation = 0.0;
  double worst_u = 0.0;
  double worst_alpha = 0.0;
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Checks the defining axioms of the truncation family on the given grids:
///   phi'(0) = 1; phi' in [0, 1]; phi' non-increasing in u; phi'
///   non-decreasing in alpha; |phi(u) - u| <= M u^2 / alpha;
///   |phi''| <= L_alpha; |x^2 phi''(x^2)| <= kappa with x = sqrt(u).
/// Grids must be non-empty and ascending. Failures are reported, not thrown.
inline AxiomReport check_axioms(const TruncationSpec& spec,
                                const std::vector<double>& grid,
                                const std::vector<double>& alpha_grid,
                                double tolerance = 1e-10) {
  if (grid.empty() || alpha_grid.empty())
    throw std::invalid_argument("check_axioms: grids must be non-empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] < grid[i - 1])
      throw std::invalid_argument("check_axioms: grid must be ascending");
  for (std::size_t i = 1; i < alpha_grid.size(); ++i)
    if (alpha_grid[i] < alpha_grid[i - 1])
      throw std::invalid_argument("check_axioms: alpha grid must be ascending");

  AxiomReport report;
  report.checks = {
      {"phi_prime_at_zero_is_one"}, {"phi_prime_in_unit_interval"},
      {"phi_prime_nonincreasing_in_u"}, {"phi_prime_nondecreasing_in_alpha"},
      {"quadratic_gap_bound"}, {"second_derivative_bound"},
      {"curvature_kappa_bound"},
  };
  auto& at_zero = report.checks[0];
  auto& unit_range = report.checks[1];
  auto& mono_u = report.checks[2];
  auto& mono_alpha = report.checks[3];
  auto& gap = report.checks[4];
  auto& second = report.checks[5];
  auto& curvature = report.checks[6];

  auto record = [](AxiomCheck& check, double violation, double u, double a) {
    if (violation > check.worst_violation) {
      check.worst_violation = violation;
      check.worst_u = u;
      check.worst_alpha = a;
    }
  };

  for (double a : alpha_grid) {
    TruncationSpec s = spec;
    s.alpha = a;
    const TruncationConstants c = constants_of(s);

    record(at_zero, std::fabs(phi_prime(s, 0.0) - 1.0), 0.0, a);

    double prev_prime = std::numeric_limits<double>::infinity();
    for (double u : grid) {
      const double p = phi(s, u);
      const double dp = phi_prime(s, u);
      const double ddp = phi_second(s, u);

      record(unit_range, std::max(-dp, dp - 1.0), u, a);
      record(mono_u, dp - prev_prime, u, a);
      prev_prime = dp;
      record(gap, std::fabs(p - u) - c.m_gap * u * u / a, u, a);
      record(second, std::fabs(ddp) - c.l_alpha, u, a);
      // curvature axiom reads |x^2 phi''(x^2)| <= kappa at x = sqrt(u)
      record(curvature, std::fabs(u * phi_second(s, u)) - c.kappa, u, a);
    }
  }

  for (std::size_t j = 0; j + 1 < alpha_grid.size(); ++j) {
    TruncationSpec lo = spec, hi = spec;
    lo.alpha = alpha_grid[j];
    hi.alpha = alpha_grid[j + 1];
    for (double u : grid)
      record(mono_alpha, phi_prime(lo, u) - phi_prime(hi, u), u, hi.alpha);
  }

  for (auto& check : report.checks) check.pass = check.worst_violation <= tolerance;
  return report;
}

}  // namespace truncreg
