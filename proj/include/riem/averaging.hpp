#pragma once

// Riemannian averaging: the mean vector field Y_Q, the energy f_Q, the
// fixed-point step exp(Y_Q) and its iteration, with run-time domain guards
// and a-posteriori distance certificates.

#include <algorithm>
#include <vector>

#include "riem/manifold.hpp"
#include "riem/radii.hpp"
#include "riem/trace.hpp"

namespace riem {

/// Finitely supported weighted point set; weights sum to 1.
struct MassDistribution {
  const Manifold* M = nullptr;
  std::vector<VectorXd> points;
  std::vector<double> weights;

  static MassDistribution make(const Manifold& M, std::vector<VectorXd> pts,
                               std::vector<double> w = {}) {
    MassDistribution Q;
    Q.M = &M;
    Q.points = std::move(pts);
    if (Q.points.empty()) throw std::invalid_argument("MassDistribution: empty support");
    if (w.empty()) w.assign(Q.points.size(), 1.0 / double(Q.points.size()));
    if (w.size() != Q.points.size())
      throw std::invalid_argument("MassDistribution: weight/point count mismatch");
    double sum = 0.0;
    for (double wi : w) {
      if (!(wi > 0.0)) throw std::invalid_argument("MassDistribution: weights must be > 0");
      sum += wi;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      for (double& wi : w) wi /= sum;
    Q.weights = std::move(w);
    for (const auto& p : Q.points) M.validate_point(p);
    return Q;
  }

  size_t size() const { return points.size(); }

  double diam() const {
    double d = 0.0;
    for (size_t i = 0; i < size(); ++i)
      for (size_t j = i + 1; j < size(); ++j) d = std::max(d, M->dist(points[i], points[j]));
    return d;
  }

  /// Largest distance from p to the support.
  double radius_about(const VectorXd& p) const {
    double d = 0.0;
    for (const auto& q : points) d = std::max(d, M->dist(p, q));
    return d;
  }
};

namespace detail {

/// Compensated accumulator, fixed summand order for bit reproducibility.
struct KahanSum {
  VectorXd sum, comp;
  explicit KahanSum(int n) : sum(VectorXd::Zero(n)), comp(VectorXd::Zero(n)) {}
  void add(const VectorXd& x) {
    const VectorXd y = x - comp;
    const VectorXd t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

/// Y_Q(p): weighted mean of the log vectors, summed in entry order.
inline Tangent y_field(const MassDistribution& Q, const Point& p) {
  detail::KahanSum acc(Q.M->ambient_dim());
  for (size_t i = 0; i < Q.size(); ++i) {
    try {
      acc.add(Q.weights[i] * Q.M->log(p.x, Q.points[i]));
    } catch (const DomainError& e) {
      throw DomainError("y_field: support point " + std::to_string(i) + ": " + e.what());
    }
  }
  return {p, acc.sum};
}

/// f_Q(p) = (1/2) sum w_i d(p, q_i)^2.
inline double f_energy(const MassDistribution& Q, const Point& p) {
  double acc = 0.0, comp = 0.0;
  for (size_t i = 0; i < Q.size(); ++i) {
    const double d = Q.M->dist(p.x, Q.points[i]);
    const double x = 0.5 * Q.weights[i] * d * d - comp;
    const double t = acc + x;
    comp = (t - acc) - x;
    acc = t;
  }
  return acc;
}

/// One fixed-point step exp_p(Y_Q(p)).
inline Point psi_step(const MassDistribution& Q, const Point& p) {
  return exp_map(p, y_field(Q, p));
}

/// Support point with the smallest energy: the default start of the
/// iteration (it minimizes the relevant diameter bound over the support).
inline Point initial_point(const MassDistribution& Q) {
  size_t best = 0;
  double fbest = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < Q.size(); ++i) {
    const Point pi{Q.M, Q.points[i]};
    const double f = f_energy(Q, pi);
    if (f < fbest) {
      fbest = f;
      best = i;
    }
  }
  return {Q.M, Q.points[best]};
}

/// Certified bound on the distance from p to the unique mean, valid when
/// the support lies in B_rho(p) with 2 rho sqrt(max(0,Delta)) < pi/2.
inline double aposteriori_bound(const MassDistribution& Q, const Point& p, double rho) {
  const double Delta = Q.M->curvature_bounds().Delta;
  if (Q.radius_about(p.x) > rho + 1e-12)
    throw std::invalid_argument("aposteriori_bound: support not inside B_rho(p)");
  const double yn = y_field(Q, p).norm();
  if (Delta <= 0.0) return yn;
  if (2 * rho * std::sqrt(Delta) >= M_PI / 2)
    throw DomainError("aposteriori_bound: 2 rho sqrt(Delta) must be below pi/2");
  return yn / h(Delta, 2 * rho);
}

/// Radius of the ball around p0 the iteration must stay in: the regularity
/// radius, shrunk to rho_4 when the critical-radius solve is available.
/// With assume_tethered the diameter limit relaxes from D_crit to D_max.
inline double guard_radius(const MassDistribution& Q, const Point& p0,
                           bool assume_tethered = false) {
  const RegularityRadii rr = Q.M->regularity();
  double r = std::isinf(rr.r_regcvx) ? kInfRadius : rr.r_regcvx - 1e-8;
  const CurvatureBounds cb = Q.M->curvature_bounds();
  if (cb.Delta <= 0.0 || std::isinf(r)) return r;
  const double r1 = std::min(r, 0.999 * (M_PI / 2) / std::sqrt(cb.Delta));
  const CurveBounds b = CurveBounds::constant(cb.delta, cb.Delta, r1);
  const double D = Q.radius_about(p0.x);
  try {
    if (assume_tethered) {
      const double Dm = d_max(KappaVariant::seq, b);
      if (D >= Dm) return r;
      auto below_one = [&](double rho) { return kappa(KappaVariant::seq, b, rho, D) - 1.0; };
      const double rho4 = below_one(r1) < 0.0 ? r1 : bisect(below_one, D, r1);
      return std::min(r, rho4);
    }
    return std::min(r, solve_radii(KappaVariant::seq, b, D).rho4);
  } catch (const SupercriticalError&) {
    return r;  // no certified ball; fall back to the regularity guard
  }
}

struct MeanResult {
  Point mean;
  IterationTrace trace;
};

/// Fixed-point iteration p <- exp_p(Y_Q(p)) from p0 until ||Y_Q|| <= tol.
/// tol <= 0 selects the default 1e-12 (1 + diam Q).  Non-convergence and
/// leaving the guard ball are reported in the trace, not thrown.
inline MeanResult iterate_mean(const MassDistribution& Q, Point p0, double tol = 0.0,
                               int max_iter = 200, bool assume_tethered = false) {
  if (tol <= 0.0) tol = 1e-12 * (1.0 + Q.diam());
  const double guard = guard_radius(Q, p0, assume_tethered);

  MeanResult out;
  IterationTrace& tr = out.trace;
  Point p = p0;
  tr.iterates.push_back(p);
  for (int n = 0; n < max_iter; ++n) {
    const Tangent y = y_field(Q, p);
    const double len = y.norm();
    if (len <= tol) {
      tr.converged = true;
      tr.reason = StopReason::tolerance;
      out.mean = p;
      return out;
    }
    Point next = exp_map(p, y);
    if (Q.M->dist(p0.x, next.x) > guard) {
      tr.reason = StopReason::domain_exit;
      out.mean = p;  // last iterate still inside the ball
      return out;
    }
    tr.step_lengths.push_back(len);
    if (tr.step_lengths.size() >= 2) {
      const size_t m = tr.step_lengths.size();
      tr.ratios.push_back(tr.step_lengths[m - 1] / tr.step_lengths[m - 2]);
    }
    try {
      tr.certificates.push_back(aposteriori_bound(Q, p, Q.radius_about(p.x)));
    } catch (const DomainError&) {
      tr.certificates.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    p = next;
    tr.iterates.push_back(p);
  }
  tr.reason = StopReason::max_iter;
  out.mean = p;
  return out;
}

inline MeanResult iterate_mean(const MassDistribution& Q, double tol = 0.0, int max_iter = 200,
                               bool assume_tethered = false) {
  return iterate_mean(Q, initial_point(Q), tol, max_iter, assume_tethered);
}

struct ContractionEstimate {
  double analytic = 0.0;  // psi_max(delta, Delta, rho + D)
  double observed = 0.0;  // largest step ratio seen in the trace (0 if none)
};

/// Analytic contraction bound for the ball B_rho(center) against the
/// largest observed step ratio of a trace run inside it.
inline ContractionEstimate contraction_estimate(const MassDistribution& Q, const Point& center,
                                                double rho,
                                                const IterationTrace* trace = nullptr) {
  const double D = Q.radius_about(center.x);
  if (rho < D) throw std::invalid_argument("contraction_estimate: need rho >= D");
  const CurvatureBounds cb = Q.M->curvature_bounds();
  if (cb.Delta > 0.0 && (rho + D) * std::sqrt(cb.Delta) >= M_PI)
    throw DomainError("contraction_estimate: (rho + D) sqrt(Delta) must be below pi");
  ContractionEstimate e;
  e.analytic = psi_max(cb.delta, cb.Delta, rho + D);
  if (trace) e.observed = trace->max_ratio();
  return e;
}

}  // namespace riem
