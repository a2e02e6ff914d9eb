#pragma once

// Independent verification machinery: direct integration of the
// "antidiagonal" Jacobi system f'' = A(t) f, f(0) = -f'(0) = v on [0,1],
// its closed-form series solution for constant coefficients, the bound
// checks tying both to the phi_-/phi_+ calculus, and finite-difference
// probes of the distance Hessian and of grad Y_Q.

#include <Eigen/Dense>
#include <random>

#include "riem/averaging.hpp"
#include "riem/newton.hpp"
#include "riem/specfun.hpp"

namespace riem {

struct JacobiProblem {
  std::function<MatrixXd(double)> A;  // t -> symmetric coefficient matrix
  double r = 1.0;                     // geodesic length (scales A as r^2 A_hat)
  VectorXd v;                         // initial value; f'(0) = -v

  /// Constant sectional curvature lambda: A = -lambda r^2 I.
  static JacobiProblem constant_curvature(double lambda, double r, VectorXd v) {
    const int n = int(v.size());
    const MatrixXd A = -lambda * r * r * MatrixXd::Identity(n, n);
    return {[A](double) { return A; }, r, std::move(v)};
  }
  /// Constant A_hat (curvature operator along the geodesic): A = r^2 A_hat.
  static JacobiProblem constant(const MatrixXd& A_hat, double r, VectorXd v) {
    const MatrixXd A = r * r * A_hat;
    return {[A](double) { return A; }, r, std::move(v)};
  }
};

/// f(1) by classical 4th-order Runge-Kutta on the first-order system.
inline VectorXd integrate_jacobi(const JacobiProblem& prob, int steps = 10000) {
  if (steps < 100) throw std::invalid_argument("integrate_jacobi: steps >= 100 required");
  const double dt = 1.0 / steps;
  VectorXd f = prob.v, g = -prob.v;  // g = f'
  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    const MatrixXd A1 = prob.A(t), A2 = prob.A(t + dt / 2), A3 = prob.A(t + dt);
    const VectorXd k1f = g, k1g = A1 * f;
    const VectorXd k2f = g + (dt / 2) * k1g, k2g = A2 * (f + (dt / 2) * k1f);
    const VectorXd k3f = g + (dt / 2) * k2g, k3g = A2 * (f + (dt / 2) * k2f);
    const VectorXd k4f = g + dt * k3g, k4g = A3 * (f + dt * k3f);
    f += (dt / 6) * (k1f + 2 * k2f + 2 * k3f + k4f);
    g += (dt / 6) * (k1g + 2 * k2g + 2 * k3g + k4g);
  }
  return f;
}

/// Closed form for constant A_hat: f(1) = (c(r^2 A_hat) - s(r^2 A_hat)) v,
/// evaluated via the eigendecomposition with the cancellation-free series.
inline VectorXd jacobi_series(const MatrixXd& A_hat, double r, const VectorXd& v) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (A_hat + A_hat.transpose()));
  VectorXd coef = es.eigenvectors().transpose() * v;
  for (int i = 0; i < coef.size(); ++i) coef(i) *= cs_diff(r * r * es.eigenvalues()(i));
  return es.eigenvectors() * coef;
}

/// Norm bound on c(r^2 A_hat) - s(r^2 A_hat) when spec(A_hat) lies in
/// [-Delta, -delta] (curvatures in [delta, Delta]); three-case bound, the
/// positive-curvature cases need sqrt(Delta) r <= x0.
inline double jacobi_bound(double delta, double Delta, double r) {
  if (delta > Delta) throw std::invalid_argument("jacobi_bound: delta > Delta");
  if (Delta <= 0.0) return phi_minus(std::sqrt(std::abs(delta)) * r);
  const double xp = std::sqrt(Delta) * r;
  if (xp > x0_root()) throw DomainError("jacobi_bound: sqrt(Delta) r beyond x0");
  if (delta >= 0.0) return phi_plus(xp);
  return std::max(phi_minus(std::sqrt(std::abs(delta)) * r), phi_plus(xp));
}

struct JacobiCheckReport {
  int samples = 0;
  int violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // bound - measured
  double max_series_vs_ode = 0.0;  // largest discrepancy between the two routes
  bool pass() const { return violations == 0; }
};

/// Random constant-coefficient problems with prescribed spectrum ranges:
/// asserts the norm bound per sample and cross-checks the series solution
/// against the integrator.
inline JacobiCheckReport check_jacobi_bounds(int samples, std::uint64_t seed = 1,
                                             int steps = 2000) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> G;
  JacobiCheckReport rep;
  for (int k = 0; k < samples; ++k) {
    const int n = 2 + int(U(rng) * 3);
    double delta = -2.0 + 4.0 * U(rng), Delta = -2.0 + 4.0 * U(rng);
    if (delta > Delta) std::swap(delta, Delta);
    const double rcap = Delta > 0 ? 0.98 * x0_root() / std::sqrt(Delta) : 2.0;
    const double r = rcap * (0.1 + 0.9 * U(rng));
    // random orthogonal frame, eigenvalues of A_hat in [-Delta, -delta]
    MatrixXd Mrand(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) Mrand(i, j) = G(rng);
    const MatrixXd Qo = Eigen::HouseholderQR<MatrixXd>(Mrand).householderQ();
    VectorXd eig(n);
    for (int i = 0; i < n; ++i) eig(i) = -Delta + (Delta - delta) * U(rng);
    const MatrixXd A_hat = Qo * eig.asDiagonal() * Qo.transpose();
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = G(rng);

    const VectorXd fs = jacobi_series(A_hat, r, v);
    const VectorXd fi = integrate_jacobi(JacobiProblem::constant(A_hat, r, v), steps);
    rep.max_series_vs_ode = std::max(rep.max_series_vs_ode, (fs - fi).norm());

    const double bound = jacobi_bound(delta, Delta, r) * v.norm();
    const double margin = bound - fs.norm();
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -1e-10) ++rep.violations;
    ++rep.samples;
  }
  return rep;
}

/// Hessian of f(x) = (1/2) d(x,q)^2 at p, in the frame, by second central
/// differences along geodesics (including mixed directions).
inline MatrixXd hessian_probe(const Manifold& M, const VectorXd& p, const VectorXd& q,
                              const FrameBasis& frame, double h = 0.0) {
  if (h <= 0.0) h = 1e-4 * (1.0 + M.dist(p, q));
  auto f = [&](const VectorXd& tangent) {
    const double d = M.dist(M.exp(p, tangent), q);
    return 0.5 * d * d;
  };
  const int n = M.dim();
  const double f0 = f(VectorXd::Zero(M.ambient_dim()));
  MatrixXd H(n, n);
  for (int i = 0; i < n; ++i) {
    const VectorXd ei = frame.E.col(i);
    H(i, i) = (f(h * ei) - 2 * f0 + f(-h * ei)) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      const VectorXd ej = frame.E.col(j);
      H(i, j) = H(j, i) = (f(h * (ei + ej)) - f(h * (ei - ej)) - f(h * (ej - ei)) +
                           f(-h * (ei + ej))) /
                          (4 * h * h);
    }
  }
  return H;
}

/// Finite-difference grad Y_Q in the frame (transport-based central
/// differences, as in cov_deriv_fd).
inline MatrixXd nabla_y_probe(const MassDistribution& Q, const Point& p,
                              const FrameBasis& frame, double h = 0.0) {
  VectorField yq{[&Q](const Point& r) { return y_field(Q, r); }, nullptr};
  return cov_deriv_fd(yq, p, frame, h);
}

struct NablaYReport {
  MatrixXd nabla;          // finite-difference grad Y_Q
  MatrixXd hessian_sum;    // -sum w_i Hess(1/2 d(.,q_i)^2)
  double mismatch = 0.0;   // || nabla - hessian_sum ||
  double opnorm_plus_I = 0.0;
  double psi_bound = 0.0;  // psi_max(delta, Delta, max_i d(p, q_i))
  bool pass = false;
};

/// Cross-check grad Y_Q against the integrated-Hessian identity and the
/// psi_max operator-norm bound.
inline NablaYReport check_nabla_y(const MassDistribution& Q, const Point& p, double h = 0.0,
                                  double tol = 1e-4) {
  const FrameBasis frame = FrameBasis::at(p);
  NablaYReport rep;
  rep.nabla = nabla_y_probe(Q, p, frame, h);
  rep.hessian_sum = MatrixXd::Zero(p.M->dim(), p.M->dim());
  for (size_t i = 0; i < Q.size(); ++i)
    rep.hessian_sum -= Q.weights[i] * hessian_probe(*Q.M, p.x, Q.points[i], frame, h);
  rep.mismatch = (rep.nabla - rep.hessian_sum).norm();
  const MatrixXd S = 0.5 * (rep.nabla + rep.nabla.transpose()) +
                     MatrixXd::Identity(p.M->dim(), p.M->dim());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  rep.opnorm_plus_I = es.eigenvalues().cwiseAbs().maxCoeff();
  const CurvatureBounds cb = Q.M->curvature_bounds();
  rep.psi_bound = psi_max(cb.delta, cb.Delta, Q.radius_about(p.x));
  rep.pass = rep.mismatch <= tol && rep.opnorm_plus_I <= rep.psi_bound + tol;
  return rep;
}

}  // namespace riem
