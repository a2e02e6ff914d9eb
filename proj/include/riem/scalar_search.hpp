#pragma once

// Bracketed one-dimensional searches used by the critical-radius solvers.
// All searches are derivative-free with an absolute tolerance on the
// abscissa and a hard iteration cap.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace riem {

inline constexpr double kSearchTol = 1e-10;
inline constexpr int kSearchMaxIter = 200;

/// Root of f on [lo, hi]; requires a sign change (f(lo) f(hi) <= 0).
template <class F>
double bisect(F&& f, double lo, double hi, double tol = kSearchTol) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw std::invalid_argument("bisect: no sign change on bracket");
  for (int i = 0; i < kSearchMaxIter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

/// Abscissa of the maximum of a unimodal f on [lo, hi] via golden section.
template <class F>
double golden_max(F&& f, double lo, double hi, double tol = kSearchTol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < kSearchMaxIter && b - a > tol; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace riem
