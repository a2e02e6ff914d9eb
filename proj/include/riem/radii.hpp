#pragma once

// Contraction-constant calculus: the kappa(rho, D) variants, the margin
// s(rho, D) = (1 - kappa) rho, and the critical radii rho_0..rho_4,
// rho_crit, D_crit, D_max that delimit where the averaging iteration is a
// certified contraction.  Everything is solved by bracketed bisection /
// golden section; every target is monotone or concave in the search
// variable, so derivative-free searches are reliable.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "riem/scalar_search.hpp"
#include "riem/specfun.hpp"

namespace riem {

enum class KappaVariant {
  seq,         // psi_max only: rate bound for the averaging sequence
  full_minus,  // phi_- + C1 psi_max: general manifolds
  full_plus,   // phi_+ + C1 psi_max: locally symmetric, nonnegative curvature
};

inline const char* to_string(KappaVariant v) {
  switch (v) {
    case KappaVariant::seq: return "seq";
    case KappaVariant::full_minus: return "full-minus";
    case KappaVariant::full_plus: return "full-plus";
  }
  return "?";
}

/// Curvature bounds of the ball family B_rho: Delta nondecreasing in rho,
/// delta nonincreasing, valid up to radius r1 with r1 sqrt(max(0,Delta(r1)))
/// strictly below pi/2.
struct CurveBounds {
  std::function<double(double)> DeltaTilde;
  std::function<double(double)> deltaTilde;
  double r1 = 0.0;

  static CurveBounds constant(double delta, double Delta, double r1) {
    if (delta > Delta) throw std::invalid_argument("CurveBounds: delta > Delta");
    return {[Delta](double) { return Delta; }, [delta](double) { return delta; }, r1};
  }
  void validate() const {
    if (!(r1 > 0.0)) throw std::invalid_argument("CurveBounds: r1 > 0 required");
    const double x = r1 * std::sqrt(std::max(0.0, DeltaTilde(r1)));
    if (x >= M_PI / 2)
      throw std::invalid_argument("CurveBounds: r1 too large for the upper curvature bound");
  }
};

struct SupercriticalError : std::runtime_error {
  double d_crit;
  SupercriticalError(double D, double dc)
      : std::runtime_error("D = " + std::to_string(D) + " exceeds critical value " +
                           std::to_string(dc)),
        d_crit(dc) {}
};

struct RadiiReport {
  KappaVariant variant;
  double D = 0.0;
  double rho0 = 0.0, rho1 = 0.0, rho2 = 0.0, rho3 = 0.0, rho4 = 0.0;
  double D_crit = 0.0, D_max = 0.0, rho_crit = 0.0;
  bool rho4_clamped = false;
};

inline double kappa(KappaVariant variant, const CurveBounds& b, double rho, double D) {
  if (!(D >= 0.0) || !(rho >= D) || rho > b.r1 + 1e-15)
    throw std::invalid_argument("kappa: need 0 <= D <= rho <= r1");
  const double dT = b.deltaTilde(rho), DT = b.DeltaTilde(rho);
  if (std::isinf(dT)) return std::numeric_limits<double>::infinity();
  const double r = rho + D;
  if (DT > 0.0 && std::sqrt(DT) * r >= M_PI)
    return std::numeric_limits<double>::infinity();
  const double pm = psi_max(dT, DT, r);
  switch (variant) {
    case KappaVariant::seq:
      return pm;
    case KappaVariant::full_minus: {
      const double absK = std::max(std::abs(dT), std::abs(DT));
      return phi_minus(r * std::sqrt(absK)) + c1(dT, r) * pm;
    }
    case KappaVariant::full_plus: {
      if (dT < 0.0)
        throw DomainError("kappa: full-plus variant needs nonnegative curvature");
      const double x = r * std::sqrt(std::max(0.0, DT));
      if (x > 3 * M_PI / 4) return std::numeric_limits<double>::infinity();
      return (x > 0 ? phi_plus(x) : 0.0) + c1(dT, r) * pm;
    }
  }
  throw std::logic_error("kappa: unknown variant");
}

/// Contraction margin s(rho, D) = (1 - kappa) rho.
inline double s(KappaVariant variant, const CurveBounds& b, double rho, double D) {
  const double k = kappa(variant, b, rho, D);
  if (std::isinf(k)) return -std::numeric_limits<double>::infinity();
  return (1.0 - k) * rho;
}

/// rho_0(D) = D / h_+(2 D sqrt(Delta(D))) when the upper bound is positive,
/// else D; the radius whose ball certainly contains the mean.
inline double rho0(double D, const std::function<double(double)>& DeltaTilde) {
  if (!(D >= 0.0)) throw std::invalid_argument("rho0: D >= 0 required");
  if (D == 0.0) return 0.0;
  const double DT = DeltaTilde(D);
  if (DT <= 0.0) return D;
  const double x = 2.0 * D * std::sqrt(DT);
  if (x >= M_PI / 2) throw DomainError("rho0: 2 D sqrt(Delta(D)) must be below pi/2");
  return D / h(1.0, x);
}

/// Largest admissible point-set diameter: first root of kappa(D, D) = 1,
/// clamped at r1.
inline double d_max(KappaVariant variant, const CurveBounds& b) {
  b.validate();
  auto f = [&](double D) { return kappa(variant, b, D, D) - 1.0; };
  if (f(b.r1) < 0.0) return b.r1;
  return bisect(f, 0.0, b.r1);
}

/// Fixed point of D -> max_rho s(rho, D); returns (D_crit, rho_crit) where
/// rho_crit is the argmax at the critical diameter.
inline std::pair<double, double> d_crit(KappaVariant variant, const CurveBounds& b) {
  b.validate();
  auto smax = [&](double D) {
    const double arg = golden_max([&](double r) { return s(variant, b, r, D); }, D, b.r1);
    return s(variant, b, arg, D);
  };
  auto g = [&](double D) { return smax(D) - D; };  // monotone decreasing
  double Dc;
  if (g(b.r1) >= 0.0) {
    Dc = b.r1;
  } else {
    Dc = bisect(g, 0.0, b.r1);
  }
  const double rc = golden_max([&](double r) { return s(variant, b, r, Dc); }, Dc, b.r1);
  return {Dc, rc};
}

/// Full radii report for diameter D: rho_1 < rho_2 (argmax of s)
/// < rho_3 bound the set {s > D}; rho_4 bounds {kappa < 1}; values that run
/// into r1 are clamped there and flagged.
inline RadiiReport solve_radii(KappaVariant variant, const CurveBounds& b, double D) {
  b.validate();
  RadiiReport rep;
  rep.variant = variant;
  rep.D = D;
  rep.D_max = d_max(variant, b);
  std::tie(rep.D_crit, rep.rho_crit) = d_crit(variant, b);
  if (!(D >= 0.0)) throw std::invalid_argument("solve_radii: D >= 0 required");
  if (D >= rep.D_crit && D > 0.0) throw SupercriticalError(D, rep.D_crit);

  rep.rho0 = rho0(D, b.DeltaTilde);
  rep.rho2 = golden_max([&](double r) { return s(variant, b, r, D); }, D, b.r1);

  auto margin = [&](double r) { return s(variant, b, r, D) - D; };
  rep.rho1 = margin(D) >= 0.0 ? D : bisect(margin, D, rep.rho2);
  rep.rho3 = margin(b.r1) > 0.0 ? b.r1 : bisect(margin, rep.rho2, b.r1);

  auto below_one = [&](double r) { return kappa(variant, b, r, D) - 1.0; };
  if (below_one(b.r1) < 0.0) {
    rep.rho4 = b.r1;
    rep.rho4_clamped = true;
  } else {
    rep.rho4 = bisect(below_one, rep.rho2, b.r1);
  }
  return rep;
}

struct RateConstants {
  double kappa_hat = 0.0;   // kappa at the critical configuration
  double c1 = 1.0;          // 1 / (1 - kappa_hat): rho_1(D) <= c1 D
  double c2 = 0.0;          // kappa_hat / x_crit^2
  double x_crit = 0.0;      // sqrt(Delta) (rho_crit + D_crit)
  double quad_coeff = 0.0;  // c2 (1 + c1)^2: epsilon_1 <= quad_coeff * Delta D^2
  double epsilon1_bound = 0.0;
};

/// Rate constants for subcritical D: the contraction factor obeys
/// epsilon_1 <= c2 (1 + c1)^2 Delta D^2.
inline RateConstants rate_constants(KappaVariant variant, const CurveBounds& b, double D) {
  b.validate();
  auto [Dc, rc] = d_crit(variant, b);
  if (D >= Dc && D > 0.0) throw SupercriticalError(D, Dc);
  RateConstants rc_out;
  const double Delta = b.DeltaTilde(rc);
  if (Delta <= 0.0) return rc_out;  // flat or nonpositively curved: bound 0
  rc_out.kappa_hat = kappa(variant, b, rc, Dc);
  rc_out.c1 = 1.0 / (1.0 - rc_out.kappa_hat);
  rc_out.x_crit = std::sqrt(Delta) * (rc + Dc);
  rc_out.c2 = rc_out.kappa_hat / (rc_out.x_crit * rc_out.x_crit);
  rc_out.quad_coeff = rc_out.c2 * (1.0 + rc_out.c1) * (1.0 + rc_out.c1);
  rc_out.epsilon1_bound = rc_out.quad_coeff * Delta * D * D;
  return rc_out;
}

/// Unit-curvature seq-variant report rescaled to the sphere S^n(R); radii
/// are clamped at the sphere's regular-convexity radius pi R / 2.
inline RadiiReport sphere_report(double R, double D = 0.0) {
  if (!(R > 0.0)) throw std::invalid_argument("sphere_report: R > 0 required");
  const double r1 = (M_PI / 2) * (1.0 - 1e-9);
  const CurveBounds b = CurveBounds::constant(0.0, 1.0, r1);
  RadiiReport rep = solve_radii(KappaVariant::seq, b, D / R);
  auto scale = [&](double& v) { v = std::min(v * R, M_PI * R / 2); };
  for (double* v : {&rep.D, &rep.rho0, &rep.rho1, &rep.rho2, &rep.rho3, &rep.rho4, &rep.D_crit,
                    &rep.D_max, &rep.rho_crit})
    scale(*v);
  return rep;
}

/// CP^n report: upper curvature bound 4, i.e. exactly half the unit-sphere
/// values (already inside the pi/4 convexity radius).
inline RadiiReport cpn_report(int n, double D = 0.0) {
  if (n < 1) throw std::invalid_argument("cpn_report: n >= 1 required");
  return sphere_report(0.5, D);
}

}  // namespace riem
