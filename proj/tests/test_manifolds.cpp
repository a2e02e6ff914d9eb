#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "riem/manifold.hpp"
#include "riem/shape.hpp"

using namespace riem;
using std::complex;

namespace {

std::mt19937_64 rng(20260826);

VectorXd random_unit(int n) {
  std::normal_distribution<double> g;
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v / v.norm();
}

Point random_point(const Manifold& M) {
  if (M.name().rfind("euclidean", 0) == 0) {
    std::normal_distribution<double> g;
    VectorXd p(M.ambient_dim());
    for (int i = 0; i < p.size(); ++i) p(i) = g(rng);
    return {&M, p};
  }
  VectorXd p = random_unit(M.ambient_dim());
  if (auto* s = dynamic_cast<const Sphere*>(&M)) p *= s->radius();
  return {&M, p};
}

Tangent random_tangent(const Point& p, double len) {
  VectorXd w = p.M->project_tangent(p.x, random_unit(p.M->ambient_dim()));
  return {p, (len / w.norm()) * w};
}

}  // namespace

TEST_CASE("euclidean basics") {
  Euclidean E(3);
  Point p{&E, VectorXd::Ones(3)};
  Tangent v{p, (VectorXd(3) << 1, -2, 0.5).finished()};
  Point q = exp_map(p, v);
  CHECK((q.x - (p.x + v.v)).norm() == 0.0);
  CHECK((log_map(p, q).v - v.v).norm() == 0.0);
  CHECK(dist(p, q) == doctest::Approx(v.norm()).epsilon(1e-15));
  CHECK((transport(p, q, v).v - v.v).norm() == 0.0);
  CHECK(E.curvature_bounds().Delta == 0.0);
  CHECK(std::isinf(E.regularity().r_inj));
}

TEST_CASE("sphere exp quarter circle and distance formula") {
  Sphere S(2, 1.0);
  Point p{&S, (VectorXd(3) << 1, 0, 0).finished()};
  Tangent v{p, (VectorXd(3) << 0, M_PI / 2, 0).finished()};
  Point q = exp_map(p, v);
  CHECK((q.x - (VectorXd(3) << 0, 1, 0).finished()).norm() < 1e-15);

  // independent formula check: ||log_p(q)|| = arccos<p,q> on unit sphere
  for (int i = 0; i < 50; ++i) {
    Point a = random_point(S), b = random_point(S);
    double c = a.x.dot(b.x);
    if (c < -0.999) continue;  // stay clear of the cut locus
    CHECK(log_map(a, b).norm() == doctest::Approx(std::acos(c)).epsilon(1e-12));
    CHECK(dist(a, b) == doctest::Approx(std::acos(c)).epsilon(1e-12));
  }
}

TEST_CASE("sphere radii, curvature, validation") {
  Sphere S2(2, 2.0);
  auto cb = S2.curvature_bounds();
  CHECK(cb.delta == doctest::Approx(0.25));
  CHECK(cb.Delta == doctest::Approx(0.25));
  auto rr = S2.regularity();
  CHECK(rr.r_inj == doctest::Approx(2 * M_PI));
  CHECK(rr.r_cvx == doctest::Approx(M_PI));
  CHECK(rr.r_regcvx == doctest::Approx(M_PI));

  CHECK_THROWS(S2.validate_point((VectorXd(3) << 1, 0, 0).finished()));
  S2.validate_point((VectorXd(3) << 2, 0, 0).finished());

  // antipodal rejection
  Sphere S(2, 1.0);
  Point p{&S, (VectorXd(3) << 1, 0, 0).finished()};
  Point m{&S, (VectorXd(3) << -1, 0, 0).finished()};
  CHECK_THROWS_AS(dist(p, m), DomainError);
  // exp beyond injectivity radius
  Tangent big{p, (VectorXd(3) << 0, 3.2, 0).finished()};
  CHECK_THROWS_AS(exp_map(p, big), DomainError);
}

TEST_CASE("sphere transport is an isometry and geodesics are auto-parallel") {
  Sphere S(2, 1.0);
  for (int i = 0; i < 30; ++i) {
    Point p = random_point(S);
    Tangent v = random_tangent(p, 0.8);
    Point q = exp_map(p, v);
    // velocity transports to the endpoint velocity
    Tangent vq = transport(p, q, v);
    VectorXd expected = v.norm() * S.log(q.x, p.x) / (-dist(p, q));
    CHECK((vq.v - expected).norm() < 1e-10);
    // isometry + round trip
    Tangent w = random_tangent(p, 1.3);
    Tangent wq = transport(p, q, w);
    CHECK(wq.norm() == doctest::Approx(w.norm()).epsilon(1e-12));
    CHECK((S.transport(q.x, p.x, wq.v) - w.v).norm() < 1e-10);
    CHECK(std::abs(q.x.dot(wq.v)) < 1e-10);  // stays tangent
  }
  Point p = random_point(S);
  Tangent w = random_tangent(p, 0.5);
  CHECK((transport(p, p, w).v - w.v).norm() == 0.0);
}

TEST_CASE("exp/log round trip, dist consistency, triangle inequality") {
  Euclidean E(4);
  Sphere S3(3, 1.0);
  Sphere SR(2, 2.5);
  ComplexProjective CP2(2);
  for (const Manifold* M : std::initializer_list<const Manifold*>{&E, &S3, &SR, &CP2}) {
    const double rmax = std::min(2.0, 0.9 * M->regularity().r_inj);
    for (int i = 0; i < 40; ++i) {
      Point p = random_point(*M);
      Tangent v = random_tangent(p, 1e-3 + (rmax - 1e-3) * (i / 40.0));
      Point q = exp_map(p, v);
      CHECK((log_map(p, q).v - v.v).norm() <= 1e-9 * (1 + v.norm()));
      CHECK(dist(p, q) == doctest::Approx(v.norm()).epsilon(1e-9));
    }
    // triangle inequality inside a convex ball
    const double rc = std::min(1.0, 0.45 * M->regularity().r_cvx);
    for (int i = 0; i < 30; ++i) {
      Point c = random_point(*M);
      Point a = exp_map(c, random_tangent(c, rc * 0.9));
      Point b = exp_map(c, random_tangent(c, rc * 0.7));
      Point d = exp_map(c, random_tangent(c, rc * 0.5));
      CHECK(dist(a, b) + dist(b, d) - dist(a, d) >= -1e-9);
    }
  }
}

TEST_CASE("gauss lemma: derivative of half squared distance") {
  Sphere S(2, 1.0);
  ComplexProjective CP2(2);
  for (const Manifold* M : std::initializer_list<const Manifold*>{&S, &CP2}) {
    for (int i = 0; i < 10; ++i) {
      Point p = random_point(*M);
      Point q = exp_map(p, random_tangent(p, 0.5));
      Tangent u = random_tangent(q, 1.0);
      const double h = 1e-5;
      auto f = [&](double t) {
        Point qt = exp_map(q, {q, t * u.v});
        double d = dist(p, qt);
        return 0.5 * d * d;
      };
      const double deriv = (f(h) - f(-h)) / (2 * h);
      CHECK(deriv == doctest::Approx(-log_map(q, p).v.dot(u.v)).epsilon(1e-5));
    }
  }
}

TEST_CASE("cpn structure: curvature, horizontality, phase invariance") {
  ComplexProjective CP3(3);
  auto cb = CP3.curvature_bounds();
  CHECK(cb.delta == 1.0);
  CHECK(cb.Delta == 4.0);
  CHECK(CP3.regularity().r_cvx == doctest::Approx(M_PI / 4));

  ComplexProjective CP1(1);
  CHECK(CP1.curvature_bounds().delta == 4.0);

  for (int i = 0; i < 20; ++i) {
    Point p = random_point(CP3);
    Point q = exp_map(p, random_tangent(p, 0.6));
    // log is horizontal: <z, v>_C = 0
    VectorXcd z = ComplexProjective::as_complex(p.x);
    VectorXcd v = ComplexProjective::as_complex(log_map(p, q).v);
    CHECK(std::abs(z.dot(v)) < 1e-10);
    // distance invariant under a global phase on either representative
    complex<double> ph = std::polar(1.0, 0.7 + i);
    VectorXcd zq = ComplexProjective::as_complex(q.x) * ph;
    Point q2{&CP3, ComplexProjective::as_real(zq)};
    CHECK(dist(p, q2) == doctest::Approx(dist(p, q)).epsilon(1e-12));
    CHECK((log_map(p, q2).v - log_map(p, q).v).norm() < 1e-10);
    // transport: isometry, round trip, horizontality at target
    Tangent w = random_tangent(p, 1.1);
    Tangent wq = transport(p, q, w);
    CHECK(wq.norm() == doctest::Approx(w.norm()).epsilon(1e-12));
    VectorXcd zq0 = ComplexProjective::as_complex(q.x);
    CHECK(std::abs(zq0.dot(ComplexProjective::as_complex(wq.v))) < 1e-10);
    CHECK((CP3.transport(q.x, p.x, wq.v) - w.v).norm() < 1e-9);
  }
}

namespace {
// Hopf identification CP^1 -> S^2(1/2)
VectorXd hopf(const VectorXd& coords) {
  VectorXcd z = ComplexProjective::as_complex(coords);
  complex<double> c = std::conj(z(0)) * z(1);
  return 0.5 * (VectorXd(3) << 2 * c.real(), 2 * c.imag(),
                std::norm(z(0)) - std::norm(z(1))).finished();
}
}  // namespace

TEST_CASE("cp1 is a round sphere of radius 1/2") {
  ComplexProjective CP1(1);
  Sphere S(2, 0.5);
  for (int i = 0; i < 30; ++i) {
    Point p = random_point(CP1);
    Point q = exp_map(p, random_tangent(p, 0.1 + 0.04 * i));
    Point ps{&S, hopf(p.x)}, qs{&S, hopf(q.x)};
    S.validate_point(ps.x);
    CHECK(dist(p, q) == doctest::Approx(dist(ps, qs)).epsilon(1e-10));
  }
}

TEST_CASE("parse_manifold") {
  CHECK(parse_manifold("sphere:dim=2,radius=1")->name() == "sphere:dim=2,radius=1.000000");
  CHECK(parse_manifold("euclidean:dim=5")->dim() == 5);
  CHECK(parse_manifold("cpn:n=3")->dim() == 6);
  CHECK(parse_manifold("shape2d:k=6")->name() == "cpn:n=4");
  CHECK(parse_manifold("sphere:dim=3")->ambient_dim() == 4);  // default radius 1
  CHECK_THROWS(parse_manifold("torus:dim=2"));
  CHECK_THROWS(parse_manifold("shape2d:k=2"));
}

TEST_CASE("shape embedding: quotient invariances") {
  std::vector<complex<double>> tri{{0, 0}, {1, 0}, {0.3, 0.9}};
  std::shared_ptr<const Manifold> M1, M2;
  Point a = shape_embed(tri, M1);

  auto moved = tri;
  complex<double> rot = std::polar(3.0, 1.234);  // scale 3, rotate
  for (auto& z : moved) z = rot * z + complex<double>(5.0, -2.0);
  Point b = shape_embed(moved, M2);
  b.M = M1.get();
  CHECK(dist(a, b) < 1e-10);

  std::vector<complex<double>> degenerate{{1, 1}, {1, 1}, {1, 1}};
  std::shared_ptr<const Manifold> M3;
  CHECK_THROWS(shape_embed(degenerate, M3));
  CHECK_THROWS(shape_embed({{0, 0}, {1, 0}}, M3));
}

TEST_CASE("helmert basis is orthonormal and centered") {
  for (int k : {3, 5, 8}) {
    Eigen::MatrixXd H = helmert_submatrix(k);
    CHECK((H * H.transpose() - Eigen::MatrixXd::Identity(k - 1, k - 1)).norm() < 1e-12);
    CHECK((H * VectorXd::Ones(k)).norm() < 1e-12);
  }
}

TEST_CASE("shape distance matches brute-force procrustes alignment") {
  std::vector<complex<double>> t1{{0, 0}, {1, 0}, {0.2, 0.8}};
  std::vector<complex<double>> t2{{0, 0.1}, {1.1, -0.2}, {0.6, 1.1}};
  std::shared_ptr<const Manifold> M1, M2;
  Point a = shape_embed(t1, M1);
  Point b = shape_embed(t2, M2);
  b.M = M1.get();

  // oracle: center + normalize raw configurations, maximize Re(e^{i t}<z1,z2>)
  // over a rotation grid with local refinement; scale is killed by normalizing
  auto preshape = [](std::vector<complex<double>> z) {
    complex<double> mean = 0;
    for (auto& v : z) mean += v;
    mean /= double(z.size());
    double n2 = 0;
    for (auto& v : z) {
      v -= mean;
      n2 += std::norm(v);
    }
    for (auto& v : z) v /= std::sqrt(n2);
    return z;
  };
  auto z1 = preshape(t1), z2 = preshape(t2);
  complex<double> ip = 0;
  for (size_t i = 0; i < z1.size(); ++i) ip += std::conj(z1[i]) * z2[i];
  double best = -1;
  for (int i = 0; i < 400000; ++i) {
    double t = 2 * M_PI * i / 400000.0;
    best = std::max(best, (std::polar(1.0, t) * ip).real());
  }
  CHECK(dist(a, b) == doctest::Approx(std::acos(best)).epsilon(1e-8));
}

TEST_CASE("shape representative round trip") {
  std::vector<complex<double>> t{{0.1, 0.2}, {1, 0}, {0.3, 0.9}, {-0.5, 0.4}};
  std::shared_ptr<const Manifold> M, M2;
  Point a = shape_embed(t, M);
  auto rep = shape_representative(a.x);
  CHECK(rep.size() == t.size());
  // unit size, zero centroid
  complex<double> mean = 0;
  double n2 = 0;
  for (auto& z : rep) mean += z;
  for (auto& z : rep) n2 += std::norm(z);
  CHECK(std::abs(mean) < 1e-12);
  CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
  Point back = shape_embed(rep, M2);
  back.M = M.get();
  CHECK(dist(a, back) < 1e-10);
}
