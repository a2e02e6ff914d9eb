#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <riem/io.hpp>

#include <cstdio>
#include <filesystem>
#include <random>

using namespace riem;

#ifndef RIEM_CLI_PATH
#define RIEM_CLI_PATH "riem"
#endif

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(RIEM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

const char* kSpherePoints = R"({"manifold":"sphere:dim=2,radius=1",
  "points":[[0.19866933079506122,0,0.98006657784124163],
            [0,0.19866933079506122,0.98006657784124163],
            [-0.19866933079506122,0,0.98006657784124163]],
  "weights":[0.5,0.25,0.25]})";

}  // namespace

TEST_CASE("double formatting is a lossless round trip") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(U(rng), int(U(rng) * 600));
    CHECK(std::stod(fmt17(x)) == x);
  }
  CHECK(std::stod(fmt17(M_PI)) == M_PI);
}

TEST_CASE("dump17 emits valid JSON with full-precision numbers") {
  json j;
  j["a"] = 0.1;
  j["b"] = {1.0 / 3.0, 2};
  const json back = json::parse(dump17(j));
  CHECK(back["a"].get<double>() == 0.1);
  CHECK(back["b"][0].get<double>() == 1.0 / 3.0);
}

TEST_CASE("distribution files round trip") {
  DistributionFile df = parse_distribution(json::parse(kSpherePoints));
  CHECK(df.Q.size() == 3);
  CHECK(df.Q.weights[0] == 0.5);

  const json out = distribution_to_json(df.manifold_spec, df.Q);
  DistributionFile df2 = parse_distribution(json::parse(dump17(out)));
  for (size_t i = 0; i < df.Q.size(); ++i) {
    CHECK(df2.Q.points[i] == df.Q.points[i]);
    CHECK(df2.Q.weights[i] == df.Q.weights[i]);
  }
}

TEST_CASE("missing weights become uniform") {
  DistributionFile df = parse_distribution(
      json::parse(R"({"manifold":"euclidean:dim=1","points":[[0],[1],[2]]})"));
  for (double w : df.Q.weights) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("shape2d inputs are embedded as unit projective points") {
  DistributionFile df = parse_distribution(json::parse(
      R"({"manifold":"shape2d:k=4","points":[[[0,0],[1,0],[1,1],[0,1]]]})"));
  CHECK(df.Q.M->dim() == 4);  // CP^2
  CHECK(df.Q.points[0].norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("trace JSONL reproduces the run exactly") {
  DistributionFile df = parse_distribution(json::parse(kSpherePoints));
  MeanResult res = iterate_mean(df.Q);
  REQUIRE(res.trace.converged);

  std::stringstream ss;
  write_trace_jsonl(res.trace, ss);
  const auto rows = read_trace_jsonl(ss);
  REQUIRE(rows.size() == res.trace.iterates.size());
  double max_ratio = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].n == long(i));
    CHECK(rows[i].point == res.trace.iterates[i].x);
    if (i < res.trace.step_lengths.size())
      CHECK(rows[i].step_length == res.trace.step_lengths[i]);
    if (!std::isnan(rows[i].ratio)) max_ratio = std::max(max_ratio, rows[i].ratio);
  }
  CHECK(max_ratio == res.trace.max_ratio());
}

TEST_CASE("cli: radii reports the critical constants") {
  auto r = run_cli("radii --variant seq --Delta 1 --delta 0 --r1 1.5");
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["D_crit"].get<double>() == doctest::Approx(0.3952).epsilon(2e-4));
  CHECK(j["rho_crit"].get<double>() == doctest::Approx(0.6816).epsilon(2e-4));
  CHECK(j["rate"]["c1"].get<double>() == doctest::Approx(1.7246).epsilon(1e-4));
  CHECK(j["config"]["variant"] == "seq");

  // identical bytes on a second run
  CHECK(run_cli("radii --variant seq --Delta 1 --delta 0 --r1 1.5").out == r.out);
}

TEST_CASE("cli: euclidean mean converges at iteration 1") {
  const std::string path = write_temp(
      "riem_eu.json", R"({"manifold":"euclidean:dim=2","points":[[0,0],[1,0],[0,1]]})");
  auto r = run_cli("mean --input " + path);
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["trace"]["iterations"].get<int>() == 1);
  CHECK(j["mean"][0].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("cli: sphere mean with trace file") {
  const std::string path = write_temp("riem_sph.json", kSpherePoints);
  const std::string tr = (std::filesystem::temp_directory_path() / "riem_tr.jsonl").string();
  auto r = run_cli("mean --input " + path + " --trace " + tr);
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["residual"].get<double>() <= 1e-11);

  std::ifstream in(tr);
  const auto rows = read_trace_jsonl(in);
  CHECK(rows.size() == j["trace"]["iterations"].get<size_t>() + 1);
}

TEST_CASE("cli: verify subcommands pass and report values") {
  auto r = run_cli("verify jacobi --lambda 1 --r 1 --samples 50 --seed 7");
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["measured"].get<double>() == doctest::Approx(0.301169).epsilon(1e-5));
  CHECK(j["violations"].get<int>() == 0);

  CHECK(run_cli("verify hessian --manifold sphere:dim=2 --r 0.7").exit_code == 0);

  const std::string path = write_temp("riem_sph2.json", kSpherePoints);
  CHECK(run_cli("verify nabla-y --input " + path).exit_code == 0);
}

TEST_CASE("cli: newton classifies the classical quadratic run") {
  auto r = run_cli("newton --field poly1d:-2,0,1 --map phi --p0 1.5");
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["zero"][0].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(j["order"]["kind"] == "quadratic");
}

TEST_CASE("cli: specfun spot evaluation") {
  auto r = run_cli("specfun --fn psi --lambda 1 --r 0.5");
  CHECK(r.exit_code == 0);
  CHECK(json::parse(r.out)["value"].get<double>() ==
        doctest::Approx(psi(1.0, 0.5)).epsilon(1e-15));
}

TEST_CASE("cli: shape2d mean reports a canonical representative") {
  const std::string path = write_temp("riem_shape.json", R"({"manifold":"shape2d:k=4",
    "points":[[[0,0],[1,0],[1,1],[0,1]],
              [[0.02,-0.01],[1.03,0.02],[0.98,1.01],[-0.01,0.97]],
              [[-0.02,0.03],[0.99,-0.02],[1.02,0.98],[0.01,1.03]]]})");
  auto r = run_cli("shape2d mean --input " + path);
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["representative"].size() == 4);
  // centroid 0 and unit size
  std::complex<double> centroid = 0.0;
  double sz = 0.0;
  for (const auto& lm : j["representative"]) {
    const std::complex<double> z(lm[0].get<double>(), lm[1].get<double>());
    centroid += z;
    sz += std::norm(z);
  }
  CHECK(std::abs(centroid) <= 1e-10);
  CHECK(std::sqrt(sz) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cli: exit codes") {
  CHECK(run_cli("bogus").exit_code == 1);
  CHECK(run_cli("radii --variant nope --Delta 1 --delta 0 --r1 1.5").exit_code == 1);
  // supercritical D -> domain exit
  CHECK(run_cli("radii --variant seq --Delta 1 --delta 0 --r1 1.5 --D 0.5").exit_code == 3);
  // iteration starved of steps -> non-convergence
  CHECK(run_cli("newton --field poly1d:-2,0,1 --map phi --p0 1.5 --max-iter 1 --tol 1e-15")
            .exit_code == 2);
}
