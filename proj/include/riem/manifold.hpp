#pragma once

// Geometry abstraction: exp, log, distance, parallel transport, curvature
// data, and regularity radii, with concrete implementations for Euclidean
// space, round spheres S^n(R), and complex projective space CP^n with the
// Fubini-Study metric (sectional curvature in [1,4], submersion from
// S^{2n+1}(1)).  Points and tangent vectors live in ambient coordinates;
// for all built-in geometries the Riemannian inner product is the ambient
// dot product.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include "riem/specfun.hpp"

namespace riem {

using Eigen::VectorXd;
using Eigen::VectorXcd;

inline constexpr double kInfRadius = std::numeric_limits<double>::infinity();
inline constexpr double kCutGuard = 1e-8;  // refuse log/dist this close to the cut locus

struct CurvatureBounds {
  double delta = 0.0;  // lower sectional bound
  double Delta = 0.0;  // upper sectional bound
  double absK = 0.0;   // max(|delta|, |Delta|)
};

struct RegularityRadii {
  double r_inj = kInfRadius;
  double r_cvx = kInfRadius;
  double r_reg = kInfRadius;
  double r_regcvx = kInfRadius;  // min(r_reg, r_cvx)
};

class Manifold {
 public:
  virtual ~Manifold() = default;
  virtual std::string name() const = 0;
  virtual int dim() const = 0;          // intrinsic dimension
  virtual int ambient_dim() const = 0;  // length of coordinate vectors

  virtual void validate_point(const VectorXd& p) const = 0;
  /// Orthogonal projection of an ambient vector onto T_pM.
  virtual VectorXd project_tangent(const VectorXd& p, const VectorXd& w) const = 0;

  virtual VectorXd exp(const VectorXd& p, const VectorXd& v) const = 0;
  virtual VectorXd log(const VectorXd& p, const VectorXd& q) const = 0;
  virtual double dist(const VectorXd& p, const VectorXd& q) const = 0;
  /// Parallel transport of v in T_pM along the minimal geodesic to q.
  virtual VectorXd transport(const VectorXd& p, const VectorXd& q, const VectorXd& v) const = 0;

  virtual CurvatureBounds curvature_bounds() const = 0;
  virtual RegularityRadii regularity() const = 0;

 protected:
  void check_exp_radius(double step) const {
    if (step >= regularity().r_inj)
      throw DomainError(name() + ": exp step " + std::to_string(step) +
                        " not below injectivity radius");
  }
};

struct Point {
  const Manifold* M = nullptr;
  VectorXd x;
};

struct Tangent {
  Point base;
  VectorXd v;
  double norm() const { return v.norm(); }
};

inline double inner(const Tangent& u, const Tangent& w) {
  if (u.base.M != w.base.M || (u.base.x - w.base.x).norm() > 1e-10)
    throw std::invalid_argument("inner: tangents at different base points");
  return u.v.dot(w.v);
}

inline Point exp_map(const Point& p, const Tangent& t) {
  if (t.base.M != p.M || (t.base.x - p.x).norm() > 1e-10)
    throw std::invalid_argument("exp_map: tangent not based at p");
  return {p.M, p.M->exp(p.x, t.v)};
}

inline Tangent log_map(const Point& p, const Point& q) {
  return {p, p.M->log(p.x, q.x)};
}

inline double dist(const Point& p, const Point& q) { return p.M->dist(p.x, q.x); }

inline Tangent transport(const Point& p, const Point& q, const Tangent& t) {
  return {q, p.M->transport(p.x, q.x, t.v)};
}

// ---------------------------------------------------------------------------

class Euclidean final : public Manifold {
 public:
  explicit Euclidean(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("Euclidean: dim >= 1 required");
  }
  std::string name() const override { return "euclidean:dim=" + std::to_string(n_); }
  int dim() const override { return n_; }
  int ambient_dim() const override { return n_; }

  void validate_point(const VectorXd& p) const override {
    if (p.size() != n_) throw std::invalid_argument("Euclidean: wrong coordinate length");
  }
  VectorXd project_tangent(const VectorXd&, const VectorXd& w) const override { return w; }

  VectorXd exp(const VectorXd& p, const VectorXd& v) const override { return p + v; }
  VectorXd log(const VectorXd& p, const VectorXd& q) const override { return q - p; }
  double dist(const VectorXd& p, const VectorXd& q) const override { return (q - p).norm(); }
  VectorXd transport(const VectorXd&, const VectorXd&, const VectorXd& v) const override {
    return v;
  }

  CurvatureBounds curvature_bounds() const override { return {0.0, 0.0, 0.0}; }
  RegularityRadii regularity() const override { return {}; }

 private:
  int n_;
};

/// Round sphere S^n(R) embedded in R^{n+1}; points stored at radius R so
/// dist = R arccos(<p,q>/R^2) needs no rescaling.
class Sphere final : public Manifold {
 public:
  Sphere(int n, double R) : n_(n), R_(R) {
    if (n < 1 || R <= 0.0) throw std::invalid_argument("Sphere: need dim >= 1, radius > 0");
  }
  std::string name() const override {
    return "sphere:dim=" + std::to_string(n_) + ",radius=" + std::to_string(R_);
  }
  int dim() const override { return n_; }
  int ambient_dim() const override { return n_ + 1; }
  double radius() const { return R_; }

  void validate_point(const VectorXd& p) const override {
    if (p.size() != n_ + 1) throw std::invalid_argument("Sphere: wrong coordinate length");
    if (std::abs(p.norm() - R_) > 1e-10 * R_)
      throw std::invalid_argument("Sphere: point not on the sphere of radius " +
                                  std::to_string(R_));
  }
  VectorXd project_tangent(const VectorXd& p, const VectorXd& w) const override {
    return w - (p.dot(w) / (R_ * R_)) * p;
  }

  VectorXd exp(const VectorXd& p, const VectorXd& v) const override {
    const double nv = v.norm();
    check_exp_radius(nv);
    if (nv == 0.0) return p;
    const double t = nv / R_;
    return std::cos(t) * p + (R_ * std::sin(t) / nv) * v;
  }

  double dist(const VectorXd& p, const VectorXd& q) const override {
    // atan2 form: well-conditioned at both ends, unlike acos near +-1
    const double c = p.dot(q) / (R_ * R_);
    const double s = project_tangent(p, q).norm() / R_;  // = sin of the angle
    const double d = R_ * std::atan2(s, c);
    if (d >= M_PI * R_ - kCutGuard)
      throw DomainError("Sphere: points within guard band of the cut locus (antipodal)");
    return d;
  }

  VectorXd log(const VectorXd& p, const VectorXd& q) const override {
    const double d = dist(p, q);
    if (d == 0.0) return VectorXd::Zero(n_ + 1);
    VectorXd u = project_tangent(p, q);
    const double nu = u.norm();
    if (nu == 0.0) return VectorXd::Zero(n_ + 1);  // q == p after projection
    return (d / nu) * u;
  }

  VectorXd transport(const VectorXd& p, const VectorXd& q, const VectorXd& v) const override {
    const double d = dist(p, q);
    if (d == 0.0) return v;
    const VectorXd w = log(p, q);
    const VectorXd u = w / d;  // unit initial direction
    const double a = u.dot(v);
    const double t = d / R_;
    // the component along the geodesic rotates with it; the rest is fixed
    return v - a * u + a * (std::cos(t) * u - (std::sin(t) / R_) * p);
  }

  CurvatureBounds curvature_bounds() const override {
    const double k = 1.0 / (R_ * R_);
    return {k, k, k};
  }
  RegularityRadii regularity() const override {
    const double r = M_PI * R_;
    return {r, r / 2, r / 2, r / 2};
  }

 private:
  int n_;
  double R_;
};

/// CP^n with the Fubini-Study metric, represented by unit vectors in
/// C^{n+1} (stored as 2(n+1) interleaved re/im pairs), canonical up to a
/// global phase.  Metric normalized so sectional curvature lies in [1,4]
/// (CP^1 is a round sphere of radius 1/2, constant curvature 4).
class ComplexProjective final : public Manifold {
 public:
  explicit ComplexProjective(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("ComplexProjective: n >= 1 required");
  }
  std::string name() const override { return "cpn:n=" + std::to_string(n_); }
  int dim() const override { return 2 * n_; }
  int ambient_dim() const override { return 2 * (n_ + 1); }

  static Eigen::Map<const VectorXcd> as_complex(const VectorXd& x) {
    return {reinterpret_cast<const std::complex<double>*>(x.data()), x.size() / 2};
  }
  static VectorXd as_real(const VectorXcd& z) {
    return Eigen::Map<const VectorXd>(reinterpret_cast<const double*>(z.data()), 2 * z.size());
  }

  void validate_point(const VectorXd& p) const override {
    if (p.size() != 2 * (n_ + 1))
      throw std::invalid_argument("ComplexProjective: wrong coordinate length");
    if (std::abs(p.norm() - 1.0) > 1e-10)
      throw std::invalid_argument("ComplexProjective: representative not unit length");
  }

  /// Horizontal projection: remove the complex span of z.
  VectorXd project_tangent(const VectorXd& p, const VectorXd& w) const override {
    const VectorXcd z = as_complex(p);
    const VectorXcd wc = as_complex(w);
    return as_real(wc - z.dot(wc) * z);  // z.dot = conjugate-linear in z
  }

  VectorXd exp(const VectorXd& p, const VectorXd& v) const override {
    const double nv = v.norm();
    check_exp_radius(nv);
    if (nv == 0.0) return p;
    const VectorXcd z = as_complex(p);
    const VectorXcd u = as_complex(v) / nv;
    return as_real(std::cos(nv) * z + std::sin(nv) * u);
  }

  double dist(const VectorXd& p, const VectorXd& q) const override {
    const VectorXcd z = as_complex(p), w = as_complex(q);
    const double c = std::abs(z.dot(w));
    const double s = (w - z.dot(w) * z).norm();  // sin of the angle, phase-free
    const double d = std::atan2(s, c);
    if (d >= M_PI / 2 - kCutGuard)
      throw DomainError("ComplexProjective: points within guard band of the cut locus");
    return d;
  }

  VectorXd log(const VectorXd& p, const VectorXd& q) const override {
    const double d = dist(p, q);
    if (d == 0.0) return VectorXd::Zero(ambient_dim());
    const VectorXcd z = as_complex(p);
    VectorXcd w = as_complex(q);
    const std::complex<double> ip = z.dot(w);
    w *= std::conj(ip) / std::abs(ip);  // align phase: <z,w> real positive
    VectorXcd u = w - z.dot(w) * z;
    const double nu = u.norm();
    if (nu == 0.0) return VectorXd::Zero(ambient_dim());
    return as_real((d / nu) * u);
  }

  VectorXd transport(const VectorXd& p, const VectorXd& q, const VectorXd& v) const override {
    const double d = dist(p, q);
    if (d == 0.0) return v;
    const VectorXcd z = as_complex(p);
    const VectorXd w = log(p, q);
    const VectorXcd u = as_complex(w) / d;  // unit horizontal direction
    const VectorXcd vc = as_complex(v);
    // complex coefficient of vc along u; the u-complex-line rotates with the
    // geodesic (the metric is Kaehler, so transport commutes with i), the
    // complex-orthogonal rest is constant in these coordinates
    const std::complex<double> a = u.dot(vc);
    const VectorXcd u_end = -std::sin(d) * z + std::cos(d) * u;
    // re-phase so the result is horizontal at the stored representative of q
    // (log works with the phase-aligned representative internally)
    const std::complex<double> ip = z.dot(as_complex(q));
    return as_real((ip / std::abs(ip)) * (vc - a * u + a * u_end));
  }

  CurvatureBounds curvature_bounds() const override {
    return n_ == 1 ? CurvatureBounds{4.0, 4.0, 4.0} : CurvatureBounds{1.0, 4.0, 4.0};
  }
  RegularityRadii regularity() const override {
    return {M_PI / 2, M_PI / 4, M_PI / 4, M_PI / 4};
  }

 private:
  int n_;
};

/// Parse "euclidean:dim=5", "sphere:dim=2,radius=1", "cpn:n=3",
/// "shape2d:k=6" (the last maps to CP^{k-2}).
inline std::shared_ptr<const Manifold> parse_manifold(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  auto get = [&](const std::string& key, double fallback = std::nan("")) -> double {
    if (colon == std::string::npos) {
      if (std::isnan(fallback)) throw std::invalid_argument("manifold spec: missing " + key);
      return fallback;
    }
    std::string params = spec.substr(colon + 1);
    const auto pos = params.find(key + "=");
    if (pos == std::string::npos) {
      if (std::isnan(fallback)) throw std::invalid_argument("manifold spec: missing " + key);
      return fallback;
    }
    return std::stod(params.substr(pos + key.size() + 1));
  };
  if (kind == "euclidean") return std::make_shared<Euclidean>(int(get("dim")));
  if (kind == "sphere") return std::make_shared<Sphere>(int(get("dim")), get("radius", 1.0));
  if (kind == "cpn") return std::make_shared<ComplexProjective>(int(get("n")));
  if (kind == "shape2d") {
    const int k = int(get("k"));
    if (k < 3) throw std::invalid_argument("shape2d: k >= 3 required");
    return std::make_shared<ComplexProjective>(k - 2);
  }
  throw std::invalid_argument("unknown manifold spec: " + spec);
}

}  // namespace riem
