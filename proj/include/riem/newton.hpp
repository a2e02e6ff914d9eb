#pragma once

// Zero finding for vector fields on a manifold: the fixed-point map
// exp(Y), the Newton map exp(-(grad X)^{-1} X), finite-difference covariant
// derivatives in an orthonormal frame, convergence-order classification,
// and the contraction-constant formulas for both maps.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <variant>

#include "riem/manifold.hpp"
#include "riem/specfun.hpp"
#include "riem/trace.hpp"

namespace riem {

using Eigen::MatrixXd;

/// Orthonormal basis of T_pM as columns of an ambient matrix, built
/// deterministically by Gram-Schmidt over the projected coordinate basis.
struct FrameBasis {
  Point base;
  MatrixXd E;  // ambient_dim x dim, orthonormal columns

  static FrameBasis at(const Point& p) {
    const int amb = p.M->ambient_dim(), d = p.M->dim();
    MatrixXd E(amb, d);
    int col = 0;
    for (int i = 0; i < amb && col < d; ++i) {
      VectorXd v = p.M->project_tangent(p.x, VectorXd::Unit(amb, i));
      for (int j = 0; j < col; ++j) v -= E.col(j).dot(v) * E.col(j);
      const double n = v.norm();
      if (n < 1e-8) continue;  // coordinate direction (nearly) normal to T_pM
      E.col(col++) = v / n;
    }
    if (col != d) throw std::runtime_error("FrameBasis: could not complete the frame");
    return {p, E};
  }

  VectorXd to_frame(const VectorXd& ambient) const { return E.transpose() * ambient; }
  VectorXd to_ambient(const VectorXd& frame) const { return E * frame; }
};

struct VectorField {
  std::function<Tangent(const Point&)> eval;
  /// Optional analytic covariant derivative as a matrix in the given frame.
  std::function<MatrixXd(const Point&, const FrameBasis&)> cov_deriv;
};

struct DegenerateDerivativeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Point psi_map(const VectorField& Y, const Point& p) { return exp_map(p, Y.eval(p)); }

inline double default_fd_step(double ynorm) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + ynorm);
}

/// Central-difference covariant derivative of Y at p in the frame: column i
/// is P_{q_i -> p} Y(q_i) differenced along the geodesic through e_i, where
/// P is parallel transport back to p.  Exact for affine fields on flat space.
inline MatrixXd cov_deriv_fd(const VectorField& Y, const Point& p, const FrameBasis& frame,
                             double h = 0.0) {
  if (h <= 0.0) h = default_fd_step(Y.eval(p).norm());
  const int d = p.M->dim();
  MatrixXd A(d, d);
  for (int i = 0; i < d; ++i) {
    const VectorXd dir = frame.E.col(i);
    const Point qp{p.M, p.M->exp(p.x, h * dir)};
    const Point qm{p.M, p.M->exp(p.x, -h * dir)};
    const VectorXd yp = p.M->transport(qp.x, p.x, Y.eval(qp).v);
    const VectorXd ym = p.M->transport(qm.x, p.x, Y.eval(qm).v);
    A.col(i) = frame.to_frame((yp - ym) / (2.0 * h));
  }
  return A;
}

inline MatrixXd deriv_matrix(const VectorField& X, const Point& p, const FrameBasis& frame) {
  return X.cov_deriv ? X.cov_deriv(p, frame) : cov_deriv_fd(X, p, frame);
}

/// Newton map exp_p(-(grad X)_p^{-1} X_p); refuses derivative matrices with
/// condition number above 1e8.
inline Point phi_map(const VectorField& X, const Point& p,
                     std::optional<FrameBasis> frame = {}) {
  if (!frame) frame = FrameBasis::at(p);
  const MatrixXd A = deriv_matrix(X, p, *frame);
  Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sig = svd.singularValues();
  if (sig(sig.size() - 1) <= 0.0 || sig(0) / sig(sig.size() - 1) > 1e8)
    throw DegenerateDerivativeError("phi_map: derivative singular or ill-conditioned");
  const VectorXd step = -svd.solve(frame->to_frame(X.eval(p).v));
  return exp_map(p, {p, frame->to_ambient(step)});
}

enum class MapKind { psi, phi };

struct NewtonResult {
  Point zero;
  IterationTrace trace;
};

/// Iterate the chosen map from p0 until ||field|| <= tol.  Errors from the
/// map itself (degenerate derivative, injectivity) propagate; running out
/// of iterations is reported in the trace.
inline NewtonResult iterate(MapKind kind, const VectorField& F, const Point& p0,
                            double tol = 1e-12, int max_iter = 100) {
  NewtonResult out;
  IterationTrace& tr = out.trace;
  Point p = p0;
  tr.iterates.push_back(p);
  for (int n = 0; n < max_iter; ++n) {
    if (F.eval(p).norm() <= tol) {
      tr.converged = true;
      tr.reason = StopReason::tolerance;
      out.zero = p;
      return out;
    }
    const Point next = kind == MapKind::psi ? psi_map(F, p) : phi_map(F, p);
    tr.step_lengths.push_back(p.M->dist(p.x, next.x));
    const size_t m = tr.step_lengths.size();
    if (m >= 2) tr.ratios.push_back(tr.step_lengths[m - 1] / tr.step_lengths[m - 2]);
    p = next;
    tr.iterates.push_back(p);
  }
  tr.reason = StopReason::max_iter;
  out.zero = p;
  return out;
}

struct OrderClassification {
  enum Kind { geometric, quadratic, inconclusive } kind = inconclusive;
  double rate = 0.0;      // mean step ratio when geometric
  double exponent = 0.0;  // fitted slope of log d_{n+1} vs log d_n
  double k4 = 0.0;        // fitted quadratic constant d_{n+1} ~ k4 d_n^2
};

/// Classify convergence from the step lengths: regress log d_{n+1} on
/// log d_n over the last max(4, n/2) usable steps (above 100 * machine
/// epsilon); slope near 2 means quadratic, slope near 1 with near-constant
/// ratios means geometric.
inline OrderClassification classify_order(const IterationTrace& tr) {
  OrderClassification out;
  std::vector<double> d;
  const double floor = 100.0 * std::numeric_limits<double>::epsilon();
  for (double x : tr.step_lengths)
    if (x > floor) d.push_back(x);
  const size_t n = d.size();
  if (n < 3) {
    // one- or two-step convergence: superlinear beyond classification
    if (tr.converged && n <= 1) {
      out.kind = OrderClassification::quadratic;
      out.exponent = 2.0;
    }
    return out;
  }
  const size_t use = std::max<size_t>(4, n / 2);
  const size_t lo = n > use + 1 ? n - use - 1 : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t m = 0;
  for (size_t i = lo; i + 1 < n; ++i, ++m) {
    const double x = std::log(d[i]), y = std::log(d[i + 1]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) return out;
  out.exponent = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - out.exponent * sx) / m;
  if (out.exponent > 1.5) {
    out.kind = OrderClassification::quadratic;
    out.k4 = std::exp(intercept);
    return out;
  }
  double rmin = 1e300, rmax = 0, rsum = 0;
  for (size_t i = lo; i + 1 < n; ++i) {
    const double r = d[i + 1] / d[i];
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    rsum += r;
  }
  if (out.exponent < 1.3 && rmax <= 2.0 * rmin + 1e-12) {
    out.kind = OrderClassification::geometric;
    out.rate = rsum / m;
  }
  return out;
}

/// Contraction constant of exp(Y) on a region with ||Y|| <= eps0,
/// ||grad Y + I|| <= eps1, |K| and lower bound delta.
inline double kappa_psi(double eps0, double eps1, double absK, double delta) {
  return phi_minus(std::sqrt(absK) * eps0) + c1(delta, eps0) * eps1;
}

/// Contraction constant of the Newton map with ||(grad X)^{-1}|| <= 1/k1,
/// ||grad grad X|| <= k2, ||X|| <= eps.
inline double kappa_phi(double eps, double k1, double k2, double absK, double delta) {
  const double e0 = eps / k1;
  return phi_minus(std::sqrt(absK) * e0) + c1(delta, e0) * k2 * eps / (k1 * k1);
}

/// Locally symmetric, nonnegatively curved variants (need sqrt(Delta) eps0
/// at most 3 pi / 4): the phi_- term tightens to phi_+ and C_1 = 1.
inline double kappa_psi_symplus(double eps0, double eps1, double Delta) {
  const double x = std::sqrt(std::max(0.0, Delta)) * eps0;
  if (x > 3 * M_PI / 4) throw DomainError("kappa_psi_symplus: sqrt(Delta) eps0 > 3 pi / 4");
  return phi_plus(x) + eps1;
}

inline double kappa_phi_symplus(double eps, double k1, double k2, double Delta) {
  const double x = std::sqrt(std::max(0.0, Delta)) * eps / k1;
  if (x > 3 * M_PI / 4) throw DomainError("kappa_phi_symplus: sqrt(Delta) eps/k1 > 3 pi / 4");
  return phi_plus(x) + k2 * eps / (k1 * k1);
}

}  // namespace riem
