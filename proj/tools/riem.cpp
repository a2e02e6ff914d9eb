// riem: command-line front end.
//
// Subcommands: mean, radii, newton, verify, specfun, shape2d.
// Exit codes: 0 success, 1 usage error, 2 non-convergence, 3 domain exit,
// 4 verification failure.

#include <CLI11.hpp>

#include <riem/io.hpp>
#include <riem/oracles.hpp>
#include <riem/radii.hpp>

#include <iostream>

using namespace riem;

namespace {

constexpr int kOk = 0, kUsage = 1, kNoConverge = 2, kDomain = 3, kVerifyFail = 4;

std::vector<double> parse_csv(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

KappaVariant parse_variant(const std::string& s) {
  if (s == "seq") return KappaVariant::seq;
  if (s == "full-minus") return KappaVariant::full_minus;
  if (s == "full-plus") return KappaVariant::full_plus;
  throw CLI::ValidationError("--variant", "expected seq|full-minus|full-plus");
}

json radii_to_json(const RadiiReport& rep) {
  json j;
  j["variant"] = to_string(rep.variant);
  j["D"] = rep.D;
  j["rho0"] = rep.rho0;
  j["rho1"] = rep.rho1;
  j["rho2"] = rep.rho2;
  j["rho3"] = rep.rho3;
  j["rho4"] = rep.rho4;
  j["rho4_clamped"] = rep.rho4_clamped;
  j["D_crit"] = rep.D_crit;
  j["D_max"] = rep.D_max;
  j["rho_crit"] = rep.rho_crit;
  return j;
}

json trace_summary(const IterationTrace& tr) {
  json j;
  j["iterations"] = tr.step_lengths.size();
  j["converged"] = tr.converged;
  j["reason"] = to_string(tr.reason);
  j["max_ratio"] = tr.max_ratio();
  if (!tr.step_lengths.empty()) j["last_step_length"] = tr.step_lengths.back();
  if (!tr.certificates.empty()) j["last_certificate"] = tr.certificates.back();
  return j;
}

void maybe_write_trace(const IterationTrace& tr, const std::string& path) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_trace_jsonl(tr, os);
}

int exit_code_for(const IterationTrace& tr) {
  if (tr.converged) return kOk;
  return tr.reason == StopReason::domain_exit ? kDomain : kNoConverge;
}

void emit(const json& j) { dump17(j, std::cout); std::cout << '\n'; }

// ---------------------------------------------------------------- mean

int run_mean(const std::string& input, const std::string& p0_spec, double tol, int max_iter,
             const std::string& trace_path, bool assume_tethered) {
  DistributionFile df = load_distribution(input);
  Point p0 = p0_spec.empty() ? initial_point(df.Q)
             : p0_spec.find(',') == std::string::npos &&
                     p0_spec.find_first_not_of("0123456789") == std::string::npos
                 ? Point{df.Q.M, df.Q.points.at(std::stoul(p0_spec))}
                 : Point{df.Q.M, vec_from_json(json(parse_csv(p0_spec)))};
  MeanResult res = iterate_mean(df.Q, p0, tol, max_iter, assume_tethered);
  maybe_write_trace(res.trace, trace_path);

  json j;
  j["config"] = {{"subcommand", "mean"}, {"input", input}, {"tol", tol},
                 {"max_iter", max_iter}, {"assume_tethered", assume_tethered},
                 {"manifold", df.manifold_spec}};
  j["mean"] = vec_to_json(res.mean.x);
  j["residual"] = y_field(df.Q, res.mean).norm();
  j["trace"] = trace_summary(res.trace);
  emit(j);
  return exit_code_for(res.trace);
}

// ---------------------------------------------------------------- radii

int run_radii(const std::string& variant_s, double Delta, double delta, double r1, double D,
              const std::string& manifold, const std::string& format) {
  const KappaVariant variant = parse_variant(variant_s);
  RadiiReport rep;
  json cfg = {{"subcommand", "radii"}, {"variant", variant_s}, {"D", D}, {"format", format}};
  if (!manifold.empty()) {
    auto M = parse_manifold(manifold);
    cfg["manifold"] = manifold;
    if (auto* sp = dynamic_cast<const Sphere*>(M.get()))
      rep = sphere_report(sp->radius(), D);
    else if (dynamic_cast<const ComplexProjective*>(M.get()))
      rep = cpn_report(1, D);
    else
      throw CLI::ValidationError("--manifold", "radii reports need sphere:* or cpn:*");
  } else {
    cfg["Delta"] = Delta;
    cfg["delta"] = delta;
    cfg["r1"] = r1;
    rep = solve_radii(variant, CurveBounds::constant(delta, Delta, r1), D);
  }

  json j = radii_to_json(rep);
  j["config"] = cfg;
  try {
    const auto rc = manifold.empty()
                        ? rate_constants(variant, CurveBounds::constant(delta, Delta, r1), D)
                        : RateConstants{};
    if (manifold.empty()) {
      j["rate"] = {{"kappa_hat", rc.kappa_hat}, {"c1", rc.c1}, {"c2", rc.c2},
                   {"x_crit", rc.x_crit}, {"quad_coeff", rc.quad_coeff},
                   {"epsilon1_bound", rc.epsilon1_bound}};
    }
  } catch (const SupercriticalError&) {
  }

  if (format == "table") {
    std::cout << "variant   " << to_string(rep.variant) << "\n";
    auto row = [](const char* k, double v) {
      std::cout << std::left << std::setw(10) << k << fmt17(v) << "\n";
    };
    row("D", rep.D);
    row("rho0", rep.rho0);
    row("rho1", rep.rho1);
    row("rho2", rep.rho2);
    row("rho3", rep.rho3);
    row("rho4", rep.rho4);
    row("rho_crit", rep.rho_crit);
    row("D_crit", rep.D_crit);
    row("D_max", rep.D_max);
  } else {
    emit(j);
  }
  return kOk;
}

// ---------------------------------------------------------------- newton

int run_newton(const std::string& field_s, const std::string& map_s, const std::string& p0_s,
               double tol, int max_iter, const std::string& trace_path) {
  const MapKind kind = map_s == "phi" ? MapKind::phi : MapKind::psi;
  if (map_s != "phi" && map_s != "psi")
    throw CLI::ValidationError("--map", "expected psi|phi");

  // the helpers below own whatever the field closes over
  std::shared_ptr<const Manifold> hold;
  std::shared_ptr<DistributionFile> df;
  VectorField F;
  Point p0;

  if (field_s == "radial") {
    const std::vector<double> c = parse_csv(p0_s.empty() ? "1" : p0_s);
    auto E = std::make_shared<Euclidean>(int(c.size()));
    hold = E;
    p0 = {hold.get(), vec_from_json(json(c))};
    F.eval = [](const Point& p) { return Tangent{p, -p.x}; };
  } else if (field_s.rfind("mean:", 0) == 0) {
    df = std::make_shared<DistributionFile>(load_distribution(field_s.substr(5)));
    p0 = p0_s.empty() ? initial_point(df->Q) : Point{df->Q.M, vec_from_json(json(parse_csv(p0_s)))};
    F.eval = [df](const Point& p) { return y_field(df->Q, p); };
  } else if (field_s.rfind("poly1d:", 0) == 0) {
    const std::vector<double> coeffs = parse_csv(field_s.substr(7));
    auto E = std::make_shared<Euclidean>(1);
    hold = E;
    p0 = {hold.get(), vec_from_json(json(parse_csv(p0_s.empty() ? "1" : p0_s)))};
    F.eval = [coeffs](const Point& p) {
      double acc = 0.0;
      for (size_t i = coeffs.size(); i-- > 0;) acc = acc * p.x(0) + coeffs[i];
      return Tangent{p, VectorXd::Constant(1, acc)};
    };
  } else {
    throw CLI::ValidationError("--field", "expected radial|mean:<file>|poly1d:<coeffs>");
  }

  NewtonResult res = iterate(kind, F, p0, tol, max_iter);
  maybe_write_trace(res.trace, trace_path);
  const OrderClassification oc = classify_order(res.trace);

  json j;
  j["config"] = {{"subcommand", "newton"}, {"field", field_s}, {"map", map_s},
                 {"tol", tol}, {"max_iter", max_iter}};
  j["zero"] = vec_to_json(res.zero.x);
  j["residual"] = F.eval(res.zero).norm();
  j["trace"] = trace_summary(res.trace);
  j["order"] = {{"kind", oc.kind == OrderClassification::quadratic    ? "quadratic"
                         : oc.kind == OrderClassification::geometric ? "geometric"
                                                                     : "inconclusive"},
                {"rate", oc.rate}, {"exponent", oc.exponent}, {"k4", oc.k4}};
  emit(j);
  return exit_code_for(res.trace);
}

// ---------------------------------------------------------------- verify

int run_verify_jacobi(double lambda, double r, int samples, std::uint64_t seed) {
  VectorXd v = VectorXd::Zero(3);
  v(1) = 1.0;
  const VectorXd f = integrate_jacobi(JacobiProblem::constant_curvature(lambda, r, v));
  const double measured = f.norm();
  const double x = std::sqrt(std::abs(lambda)) * r;
  const double expected = lambda > 0 ? phi_plus(x) : lambda < 0 ? phi_minus(x) : 0.0;
  const bool eq_ok = std::abs(measured - expected) <= 1e-8;
  const JacobiCheckReport rep = check_jacobi_bounds(samples, seed);

  json j;
  j["config"] = {{"subcommand", "verify jacobi"}, {"lambda", lambda}, {"r", r},
                 {"samples", samples}, {"seed", seed}};
  j["measured"] = measured;
  j["bound"] = expected;
  j["equality_ok"] = eq_ok;
  j["random_samples"] = rep.samples;
  j["violations"] = rep.violations;
  j["worst_margin"] = rep.worst_margin;
  j["pass"] = eq_ok && rep.pass();
  emit(j);
  return j["pass"].get<bool>() ? kOk : kVerifyFail;
}

int run_verify_hessian(const std::string& manifold, double r) {
  auto M = parse_manifold(manifold);
  // base point: last coordinate axis for embedded manifolds, origin otherwise
  VectorXd p = VectorXd::Zero(M->ambient_dim());
  if (dynamic_cast<const Euclidean*>(M.get()) == nullptr) {
    p(M->ambient_dim() - 1) = 1.0;
    if (auto* sp = dynamic_cast<const Sphere*>(M.get())) p *= sp->radius();
  }
  M->validate_point(p);
  const FrameBasis frame = FrameBasis::at(Point{M.get(), p});
  const VectorXd q = M->exp(p, r * frame.E.col(0));
  const MatrixXd H = hessian_probe(*M, p, q, frame);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (H + H.transpose()));

  // radial eigenvalue is 1; the tangential ones sit in [h(Delta,d), h(delta,d)]
  const CurvatureBounds cb = M->curvature_bounds();
  const double d = M->dist(p, q);
  const double lo = h(cb.Delta, d), hi = h(cb.delta, d);
  const double tol = 1e-4;
  int radial = 0;
  for (int i = 1; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i) - 1.0) < std::abs(es.eigenvalues()(radial) - 1.0))
      radial = i;
  bool pass = std::abs(es.eigenvalues()(radial) - 1.0) <= tol;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (i == radial) continue;
    const double e = es.eigenvalues()(i);
    if (e < lo - tol || e > hi + tol) pass = false;
  }

  json j;
  j["config"] = {{"subcommand", "verify hessian"}, {"manifold", manifold}, {"r", r}};
  j["eigenvalues"] = json::array();
  for (int i = 0; i < es.eigenvalues().size(); ++i) j["eigenvalues"].push_back(es.eigenvalues()(i));
  j["bound_low"] = lo;
  j["bound_high"] = hi;
  j["pass"] = pass;
  emit(j);
  return pass ? kOk : kVerifyFail;
}

int run_verify_nabla_y(const std::string& input) {
  DistributionFile df = load_distribution(input);
  const Point p = initial_point(df.Q);
  const NablaYReport rep = check_nabla_y(df.Q, p);

  json j;
  j["config"] = {{"subcommand", "verify nabla-y"}, {"input", input},
                 {"manifold", df.manifold_spec}};
  j["mismatch"] = rep.mismatch;
  j["opnorm_plus_I"] = rep.opnorm_plus_I;
  j["psi_bound"] = rep.psi_bound;
  j["pass"] = rep.pass;
  emit(j);
  return rep.pass ? kOk : kVerifyFail;
}

// ---------------------------------------------------------------- specfun

int run_specfun(const std::string& fn, double x, double z, double lambda, double r,
                double delta, double Delta) {
  double value;
  if (fn == "c") value = stretched_cos(z);
  else if (fn == "s") value = stretched_sin(z);
  else if (fn == "cs-diff") value = cs_diff(z);
  else if (fn == "phi-minus") value = phi_minus(x);
  else if (fn == "phi-plus") value = phi_plus(x);
  else if (fn == "c1") value = c1(lambda, r);
  else if (fn == "h") value = h(lambda, r);
  else if (fn == "psi") value = psi(lambda, r);
  else if (fn == "psi-max") value = psi_max(delta, Delta, r);
  else throw CLI::ValidationError("--fn", "unknown function " + fn);

  json j;
  j["config"] = {{"subcommand", "specfun"}, {"fn", fn}, {"x", x}, {"z", z},
                 {"lambda", lambda}, {"r", r}, {"delta", delta}, {"Delta", Delta}};
  j["value"] = value;
  emit(j);
  return kOk;
}

// ---------------------------------------------------------------- shape2d

int run_shape2d_mean(const std::string& input, double tol, int max_iter,
                     const std::string& trace_path, bool assume_tethered) {
  DistributionFile df = load_distribution(input);
  MeanResult res = iterate_mean(df.Q, tol, max_iter, assume_tethered);
  maybe_write_trace(res.trace, trace_path);

  json j;
  j["config"] = {{"subcommand", "shape2d mean"}, {"input", input}, {"tol", tol},
                 {"max_iter", max_iter}, {"assume_tethered", assume_tethered},
                 {"manifold", df.manifold_spec}};
  j["mean"] = vec_to_json(res.mean.x);
  json conf = json::array();
  for (const auto& lm : shape_representative(res.mean.x))
    conf.push_back({lm.real(), lm.imag()});
  j["representative"] = conf;
  j["residual"] = y_field(df.Q, res.mean).norm();
  j["trace"] = trace_summary(res.trace);
  emit(j);
  return exit_code_for(res.trace);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian averaging, Newton maps and radius calculus"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "seed for randomized verification sampling");

  // mean
  auto* mean = app.add_subcommand("mean", "weighted Riemannian mean of a point set");
  std::string in_path, p0_spec, trace_path;
  double tol = 0.0;
  int max_iter = 200;
  bool tethered = false, locally_symmetric = false;
  mean->add_option("--input", in_path)->required();
  mean->add_option("--p0", p0_spec, "support index or comma-separated coordinates");
  mean->add_option("--tol", tol);
  mean->add_option("--max-iter", max_iter);
  mean->add_option("--trace", trace_path, "write JSONL iteration trace");
  mean->add_flag("--assume-tethered", tethered);

  // radii
  auto* radii = app.add_subcommand("radii", "contraction radii and critical constants");
  std::string variant = "seq", manifold, format = "json";
  double Delta = 0.0, delta = 0.0, r1 = 0.0, D = 0.0;
  radii->add_option("--variant", variant);
  radii->add_option("--Delta", Delta);
  radii->add_option("--delta", delta);
  radii->add_option("--r1", r1);
  radii->add_option("--D", D);
  radii->add_option("--manifold", manifold);
  radii->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));

  // newton
  auto* newton = app.add_subcommand("newton", "fixed-point / Newton iteration demos");
  std::string field, map = "psi", np0;
  double ntol = 1e-12;
  int nmax = 100;
  std::string ntrace;
  newton->add_option("--field", field)->required();
  newton->add_option("--map", map);
  newton->add_option("--p0", np0);
  newton->add_option("--tol", ntol);
  newton->add_option("--max-iter", nmax);
  newton->add_option("--trace", ntrace);

  // verify
  auto* verify = app.add_subcommand("verify", "numerical checks against closed forms");
  verify->require_subcommand(1);
  auto* vjac = verify->add_subcommand("jacobi");
  double vlambda = 1.0, vr = 1.0;
  int vsamples = 200;
  vjac->add_option("--lambda", vlambda);
  vjac->add_option("--r", vr);
  vjac->add_option("--samples", vsamples);
  auto* vhess = verify->add_subcommand("hessian");
  std::string vmanifold = "sphere:dim=2";
  double vhr = 0.7;
  vhess->add_option("--manifold", vmanifold);
  vhess->add_option("--r", vhr);
  auto* vny = verify->add_subcommand("nabla-y");
  std::string vny_input;
  vny->add_option("--input", vny_input)->required();

  // specfun
  auto* specfun = app.add_subcommand("specfun", "spot-evaluate the scalar calculus");
  std::string fn;
  double sx = 0.0, sz = 0.0, slambda = 0.0, sr = 0.0, sdelta = 0.0, sDelta = 0.0;
  specfun->add_option("--fn", fn)->required();
  specfun->add_option("--x", sx);
  specfun->add_option("--z", sz);
  specfun->add_option("--lambda", slambda);
  specfun->add_option("--r", sr);
  specfun->add_option("--delta", sdelta);
  specfun->add_option("--Delta", sDelta);

  // shape2d
  auto* shape = app.add_subcommand("shape2d", "planar shape-space utilities");
  shape->require_subcommand(1);
  auto* smean = shape->add_subcommand("mean");
  std::string sh_input, sh_trace;
  double sh_tol = 0.0;
  int sh_max = 200;
  bool sh_teth = false;
  smean->add_option("--input", sh_input)->required();
  smean->add_option("--tol", sh_tol);
  smean->add_option("--max-iter", sh_max);
  smean->add_option("--trace", sh_trace);
  smean->add_flag("--assume-tethered", sh_teth);

  // accepted everywhere for config completeness; only radii variants read it
  app.add_flag("--locally-symmetric", locally_symmetric);

  for (auto* sub : {mean, radii, newton, verify, vjac, vhess, vny, specfun, shape, smean})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kOk : kUsage;
  }

  try {
    if (*mean) return run_mean(in_path, p0_spec, tol, max_iter, trace_path, tethered);
    if (*radii) return run_radii(variant, Delta, delta, r1, D, manifold, format);
    if (*newton) return run_newton(field, map, np0, ntol, nmax, ntrace);
    if (*vjac) return run_verify_jacobi(vlambda, vr, vsamples, seed);
    if (*vhess) return run_verify_hessian(vmanifold, vhr);
    if (*vny) return run_verify_nabla_y(vny_input);
    if (*specfun) return run_specfun(fn, sx, sz, slambda, sr, sdelta, sDelta);
    if (*smean) return run_shape2d_mean(sh_input, sh_tol, sh_max, sh_trace, sh_teth);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const SupercriticalError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
