#pragma once

// JSON plumbing: mass-distribution files, JSONL iteration traces, and a
// tiny writer that prints every double with 17 significant digits so a
// round trip is lossless.

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "riem/averaging.hpp"
#include "riem/shape.hpp"
#include "riem/trace.hpp"

namespace riem {

using json = nlohmann::json;

inline std::string fmt17(double x) {
  if (std::isnan(x)) return "null";
  if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Re-serialize a json value, printing numbers via fmt17.
inline void dump17(const json& j, std::ostream& os) {
  switch (j.type()) {
    case json::value_t::number_float: os << fmt17(j.get<double>()); break;
    case json::value_t::array: {
      os << '[';
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) os << ',';
        dump17(j[i], os);
      }
      os << ']';
      break;
    }
    case json::value_t::object: {
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        os << json(it.key()).dump() << ':';
        dump17(it.value(), os);
      }
      os << '}';
      break;
    }
    default: os << j.dump(); break;
  }
}

inline std::string dump17(const json& j) {
  std::ostringstream os;
  dump17(j, os);
  return os.str();
}

inline json vec_to_json(const VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline VectorXd vec_from_json(const json& a) {
  VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(int(i)) = a[i].get<double>();
  return v;
}

/// A parsed distribution file; keeps the manifold alive.
struct DistributionFile {
  std::shared_ptr<const Manifold> manifold;
  std::string manifold_spec;
  MassDistribution Q;
};

/// Parse {"manifold": "...", "points": [...], "weights": [...]}.  For
/// shape2d inputs each point is a list of [re, im] landmark pairs and is
/// pushed through shape_embed.
inline DistributionFile parse_distribution(const json& j) {
  DistributionFile out;
  out.manifold_spec = j.at("manifold").get<std::string>();
  out.manifold = parse_manifold(out.manifold_spec);
  const bool is_shape = out.manifold_spec.rfind("shape2d", 0) == 0;

  std::vector<VectorXd> pts;
  for (const auto& pj : j.at("points")) {
    if (is_shape) {
      std::vector<std::complex<double>> lm;
      for (const auto& pair : pj)
        lm.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
      std::shared_ptr<const Manifold> m;
      pts.push_back(shape_embed(lm, m).x);
    } else {
      pts.push_back(vec_from_json(pj));
    }
  }
  std::vector<double> w;
  if (j.contains("weights"))
    for (const auto& wj : j.at("weights")) w.push_back(wj.get<double>());
  out.Q = MassDistribution::make(*out.manifold, std::move(pts), std::move(w));
  return out;
}

inline DistributionFile load_distribution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_distribution(json::parse(in));
}

inline json distribution_to_json(const std::string& manifold_spec, const MassDistribution& Q) {
  json j;
  j["manifold"] = manifold_spec;
  j["points"] = json::array();
  for (const auto& p : Q.points) j["points"].push_back(vec_to_json(p));
  j["weights"] = Q.weights;
  return j;
}

/// One JSONL line per iterate: {n, point, step_length, ratio, certificate}.
/// Entries missing for a given n (last point has no step; first steps no
/// ratio) are null.
inline void write_trace_jsonl(const IterationTrace& tr, std::ostream& os) {
  auto at = [](const std::vector<double>& v, size_t i) {
    return i < v.size() ? json(v[i]) : json(nullptr);
  };
  for (size_t n = 0; n < tr.iterates.size(); ++n) {
    json line;
    line["n"] = n;
    line["point"] = vec_to_json(tr.iterates[n].x);
    line["step_length"] = at(tr.step_lengths, n);
    line["ratio"] = n >= 1 ? at(tr.ratios, n - 1) : json(nullptr);
    line["certificate"] = at(tr.certificates, n);
    dump17(line, os);
    os << '\n';
  }
}

struct TraceRow {
  long n = 0;
  VectorXd point;
  double step_length = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double certificate = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<TraceRow> read_trace_jsonl(std::istream& is) {
  std::vector<TraceRow> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    TraceRow r;
    r.n = j.at("n").get<long>();
    r.point = vec_from_json(j.at("point"));
    auto num = [&](const char* k) {
      return j.at(k).is_null() ? std::numeric_limits<double>::quiet_NaN()
                               : j.at(k).get<double>();
    };
    r.step_length = num("step_length");
    r.ratio = num("ratio");
    r.certificate = num("certificate");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace riem
