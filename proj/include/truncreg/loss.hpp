// Per-sample convex base losses l(z, y) in the prediction z, and their
// composition with a truncation function, phi_alpha(l(z, y)).
//
// Subgradient convention at kinks: return 0 whenever 0 is in the
// subdifferential, otherwise the midpoint of the interval, so SGD behaves
// deterministically.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "truncreg/truncation.hpp"

namespace truncreg {

enum class LossKind { Square, Absolute, Huber, EpsInsensitive, Pinball };

inline const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Square: return "square";
    case LossKind::Absolute: return "absolute";
    case LossKind::Huber: return "huber";
    case LossKind::EpsInsensitive: return "eps-insensitive";
    case LossKind::Pinball: return "pinball";
  }
  return "?";
}

/// A convex per-sample loss. `param` is the Huber transition delta, the
/// eps-insensitive tube half-width, or the pinball quantile tau.
struct BaseLoss {
  LossKind kind = LossKind::Square;
  double param = 0.0;

  static BaseLoss square() { return {LossKind::Square, 0.0}; }
  static BaseLoss absolute() { return {LossKind::Absolute, 0.0}; }
  static BaseLoss huber(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("huber: delta must be > 0");
    return {LossKind::Huber, delta};
  }
  static BaseLoss eps_insensitive(double eps) {
    if (eps < 0.0) throw std::invalid_argument("eps_insensitive: eps must be >= 0");
    return {LossKind::EpsInsensitive, eps};
  }
  static BaseLoss pinball(double tau) {
    if (!(tau > 0.0 && tau < 1.0))
      throw std::invalid_argument("pinball: tau must lie in (0, 1)");
    return {LossKind::Pinball, tau};
  }

  double value(double z, double y) const {
    const double r = z - y;
    switch (kind) {
      case LossKind::Square:
        return r * r;
      case LossKind::Absolute:
        return std::fabs(r);
      case LossKind::Huber: {
        const double a = std::fabs(r);
        return a <= param ? 0.5 * r * r : param * (a - 0.5 * param);
      }
      case LossKind::EpsInsensitive: {
        const double a = std::fabs(r) - param;
        return a > 0.0 ? a : 0.0;
      }
      case LossKind::Pinball:
        return r >= 0.0 ? (1.0 - param) * r : -param * r;
    }
    return 0.0;
  }

  /// An element of the subdifferential in z (see kink convention above).
  double subgrad(double z, double y) const {
    const double r = z - y;
    switch (kind) {
      case LossKind::Square:
        return 2.0 * r;
      case LossKind::Absolute:
        return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
      case LossKind::Huber:
        return r > param ? param : (r < -param ? -param : r);
      case LossKind::EpsInsensitive:
        // 0 is in the subdifferential everywhere on |r| <= eps, including
        // the breakpoints.
        return r > param ? 1.0 : (r < -param ? -1.0 : 0.0);
      case LossKind::Pinball:
        return r > 0.0 ? (1.0 - param) : (r < 0.0 ? -param : 0.0);
    }
    return 0.0;
  }

  /// Lipschitz constant G of z -> l(z, y); +inf for the square loss.
  double lipschitz() const {
    switch (kind) {
      case LossKind::Square:
        return std::numeric_limits<double>::infinity();
      case LossKind::Absolute:
      case LossKind::EpsInsensitive:
        return 1.0;
      case LossKind::Huber:
        return param;
      case LossKind::Pinball:
        return std::max(param, 1.0 - param);
    }
    return 1.0;
  }
};

/// Composition phi_alpha(l(z, y)) with its chain-rule derivative in z.
struct TruncatedLoss {
  BaseLoss base;
  TruncationSpec trunc;

  double value(double z, double y) const { return phi(trunc, base.value(z, y)); }

  /// d/dz phi_alpha(l(z, y)) = phi'(l) * subgrad(z, y); never larger in
  /// magnitude than the base subgradient.
  double dz(double z, double y) const {
    return phi_prime(trunc, base.value(z, y)) * base.subgrad(z, y);
  }
};

}  // namespace truncreg
