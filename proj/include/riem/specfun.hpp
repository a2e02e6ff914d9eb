#pragma once

// Singularity-safe evaluation of the special functions used by the
// contraction-constant and critical-radius machinery: the entire series
// c(z) = sum z^n/(2n)!, s(z) = sum z^n/(2n+1)!, the difference functions
// phi_-, phi_+, the derivative-of-exp bound C_1, and the distance-Hessian
// eigenvalue functions h, psi, psi_max.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace riem {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

namespace detail {

// Series/closed-form crossover on the squared argument z.  Below the
// threshold the closed forms for the *difference* functions lose digits to
// cancellation; above it both routes are accurate to full precision.
inline constexpr double kSeriesCrossover = 1.0;
inline constexpr double kSeriesRelTol = 1e-18;

// c(z) - s(z) = sum_{n>=1} z^n * 2n/(2n+1)!   (the cancellation-free route)
inline double cs_diff_series(double z) {
  double sum = 0.0;
  double term = z / 3.0;  // n = 1: z * 2/3!
  for (int n = 1; n < 200; ++n) {
    sum += term;
    term *= z * (2.0 * n + 2.0) / ((2.0 * n + 2.0) * (2.0 * n + 3.0) * (2.0 * n));
    // term_{n+1}/term_n = z * (2n+2)/( (2n+2)(2n+3) * (2n) ) -- see below
    if (std::abs(term) <= kSeriesRelTol * (std::abs(sum) + 1e-300)) break;
  }
  return sum;
}

inline double c_series(double z) {
  double sum = 1.0, term = 1.0;
  for (int n = 1; n < 200; ++n) {
    term *= z / ((2.0 * n - 1.0) * (2.0 * n));
    sum += term;
    if (std::abs(term) <= kSeriesRelTol * std::abs(sum)) break;
  }
  return sum;
}

inline double s_series(double z) {
  double sum = 1.0, term = 1.0;
  for (int n = 1; n < 200; ++n) {
    term *= z / ((2.0 * n) * (2.0 * n + 1.0));
    sum += term;
    if (std::abs(term) <= kSeriesRelTol * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace detail

/// c(z): equals cos(x) at z = -x^2 and cosh(x) at z = x^2.
inline double stretched_cos(double z) {
  if (std::abs(z) <= detail::kSeriesCrossover) return detail::c_series(z);
  const double x = std::sqrt(std::abs(z));
  return z > 0 ? std::cosh(x) : std::cos(x);
}

/// s(z): equals sin(x)/x at z = -x^2 and sinh(x)/x at z = x^2.
inline double stretched_sin(double z) {
  if (std::abs(z) <= detail::kSeriesCrossover) return detail::s_series(z);
  const double x = std::sqrt(std::abs(z));
  return z > 0 ? std::sinh(x) / x : std::sin(x) / x;
}

/// c(z) - s(z), evaluated without cancellation near z = 0.
inline double cs_diff(double z) {
  if (std::abs(z) <= detail::kSeriesCrossover) return detail::cs_diff_series(z);
  return stretched_cos(z) - stretched_sin(z);
}

/// phi_-(x) = cosh(x) - sinh(x)/x = c(x^2) - s(x^2), x >= 0.
inline double phi_minus(double x) {
  if (!(x >= 0.0)) throw DomainError("phi_minus: requires x >= 0");
  return cs_diff(x * x);
}

/// First positive root of (x^2 - 1) sin x + x cos x, the end of the
/// monotonicity interval of phi_+.  Approximately 0.87*pi.
inline double x0_root() {
  static const double root = [] {
    auto g = [](double x) { return (x * x - 1.0) * std::sin(x) + x * std::cos(x); };
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
      double mid = 0.5 * (lo + hi);
      (g(lo) * g(mid) <= 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return root;
}

/// phi_+(x) = sin(x)/x - cos(x) = s(-x^2) - c(-x^2), 0 <= x < x0.
inline double phi_plus(double x) {
  if (!(x >= 0.0) || x >= x0_root())
    throw DomainError("phi_plus: requires 0 <= x < x0 ~= " + std::to_string(x0_root()));
  return -cs_diff(-x * x);
}

/// First positive solution of phi_+(x) = 1, approximately 0.74*pi.
inline double phi_plus_unit_root() {
  static const double root = [] {
    double lo = 2.0, hi = 2.6;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
      double mid = 0.5 * (lo + hi);
      (phi_plus(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return root;
}

/// C_1(lambda, r): operator-norm bound on (exp_p)_* at radius r under the
/// lower curvature bound lambda.  Always >= 1.
inline double c1(double lambda, double r) {
  if (!(r >= 0.0)) throw DomainError("c1: requires r >= 0");
  if (lambda >= 0.0) return 1.0;
  return stretched_sin(std::abs(lambda) * r * r);  // sinh(y)/y, y = |lambda|^{1/2} r
}

/// h(lambda, r) = c(-lambda r^2) / s(-lambda r^2); h(0,r) = h(lambda,0) = 1.
/// For lambda > 0 requires lambda^{1/2} r < pi.
inline double h(double lambda, double r) {
  if (!(r >= 0.0)) throw DomainError("h: requires r >= 0");
  if (lambda > 0.0 && std::sqrt(lambda) * r >= M_PI)
    throw DomainError("h: requires lambda^{1/2} r < pi");
  const double z = -lambda * r * r;
  return stretched_cos(z) / stretched_sin(z);
}

/// psi(lambda, r) = sign(lambda) (1 - h(lambda, r)) >= 0; the sharp bound on
/// |Hess(d(.,q)^2/2) - I| at distance r under constant curvature lambda.
inline double psi(double lambda, double r) {
  if (!(r >= 0.0)) throw DomainError("psi: requires r >= 0");
  if (lambda == 0.0 || r == 0.0) return 0.0;
  if (lambda > 0.0 && std::sqrt(lambda) * r >= M_PI)
    throw DomainError("psi: requires lambda^{1/2} r < pi");
  const double z = -lambda * r * r;
  // sign(lambda) (1 - c/s) = -sign(lambda) (c - s)/s
  return -(lambda > 0 ? 1.0 : -1.0) * cs_diff(z) / stretched_sin(z);
}

/// psi_max(delta, Delta, r) = max(psi(Delta,r), psi(delta,r)) for
/// curvature bounds delta <= Delta.
inline double psi_max(double delta, double Delta, double r) {
  if (delta > Delta) throw DomainError("psi_max: requires delta <= Delta");
  return std::max(psi(Delta, r), psi(delta, r));
}

}  // namespace riem
