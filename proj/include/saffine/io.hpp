#pragma once

// JSON forms of specs, polygons and certificates, plus re-verification of
// certificates read back from JSON.

#include "json.hpp"

#include <cmath>
#include <string>

#include "saffine/expansion.hpp"
#include "saffine/hull.hpp"
#include "saffine/membership.hpp"
#include "saffine/uniqueness.hpp"

namespace saffine {

using Json = nlohmann::ordered_json;

inline Json vec_json(const Vec2& v) { return Json::array({v.x, v.y}); }

inline Vec2 vec_from(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline Json to_json(const SystemSpec& spec) {
  Json j;
  j["case"] = std::string(to_string(spec.kind()));
  Json p;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PositiveReal> || std::is_same_v<T, MixedReal>) {
          p["lambda"] = c.lambda;
          p["mu"] = c.mu;
        } else if constexpr (std::is_same_v<T, Jordan>) {
          p["nu"] = c.nu;
        } else {
          p["re"] = c.a;
          p["im"] = c.b;
        }
      },
      spec.params());
  j["params"] = p;
  j["translation"] = vec_json(spec.translation());
  return j;
}

inline SystemSpec spec_from_json(const Json& j) {
  const std::string c = j.at("case").get<std::string>();
  const Json& p = j.at("params");
  if (c == "positive") return SystemSpec::positive_real(p.at("lambda"), p.at("mu"));
  if (c == "mixed") return SystemSpec::mixed_real(p.at("lambda"), p.at("mu"));
  if (c == "jordan") return SystemSpec::jordan(p.at("nu"));
  if (c == "complex") return SystemSpec::complex(p.at("re").get<double>(), p.at("im").get<double>());
  throw Error(ErrorKind::Parse, "unknown case '" + c + "'");
}

inline Json to_json(const ConvexPolygon& poly) {
  Json v = Json::array();
  for (const auto& p : poly.vertices) v.push_back(vec_json(p));
  return {{"vertices", v}, {"closed", poly.closed}, {"slack", poly.slack}};
}

inline Json to_json(const AddressedHull& h) {
  Json j = to_json(h.polygon);
  Json a = Json::array();
  for (const auto& e : h.addresses) a.push_back({{"preperiod", e.preperiod.str()}, {"period", e.period.str()}});
  j["addresses"] = a;
  return j;
}

inline Json to_json(const ConditionReport& r) {
  return {{"root_residual", r.root_residual}, {"coefficient_sum", r.coefficient_sum},
          {"sigma_min", r.sigma_min},         {"condition_estimate", r.condition_estimate},
          {"roots_ok", r.roots_ok},           {"sum_ok", r.sum_ok},
          {"submatrix_ok", r.submatrix_ok}};
}

inline Json to_json(const InteriorCertificate& c) {
  return {{"type", "interior"},
          {"spec", to_json(c.spec)},
          {"poly", {{"coeffs", c.poly.coeffs}}},
          {"delta", c.delta},
          {"submatrix_columns", c.submatrix_columns},
          {"margins", to_json(c.margins)},
          {"rate", c.rate},
          {"constant", c.constant}};
}

inline Json to_json(const ExpansionRun& r, const InteriorCertificate& cert) {
  return {{"type", "expansion"},
          {"spec", to_json(cert.spec)},
          {"poly", {{"coeffs", cert.poly.coeffs}}},
          {"target", vec_json(r.target)},
          {"initial_residuals", r.initial_residuals},
          {"digits", r.digits.str()},
          {"max_residual", r.max_residual},
          {"final_error", r.error_estimate}};
}

inline Json to_json(const MembershipVerdict& v, const SystemSpec& spec, const Vec2& point, int max_depth) {
  Json j{{"type", "membership"},
         {"spec", to_json(spec)},
         {"point", vec_json(point)},
         {"max_depth", max_depth},
         {"verdict", to_string(v.kind)},
         {"depth", v.depth},
         {"nodes", v.nodes}};
  if (v.out()) j["min_separation"] = v.min_separation;
  if (v.in()) {
    j["address_prefix"] = v.address_prefix.str();
    j["residual_error"] = v.residual_error;
    j["witness"] = v.witness == InWitness::Expansion ? "expansion" : "limit-point";
  }
  return j;
}

inline Json to_json(const UniquenessCertificate& c) {
  Json j{{"type", "uniqueness"},
         {"spec", to_json(c.spec)},
         {"u", c.u.str()},
         {"v", c.v.str()},
         {"w", c.w.str()},
         {"margins", c.margins},
         {"entropy", c.entropy},
         {"template", c.template_name}};
  j["dim_lower_bound"] = c.dim_lower_bound ? Json(*c.dim_lower_bound) : Json(nullptr);
  return j;
}

inline UniquenessCertificate uniqueness_from_json(const Json& j) {
  UniquenessCertificate c{spec_from_json(j.at("spec")), Word::parse(j.at("u").get<std::string>()),
                          Word::parse(j.at("v").get<std::string>()), Word::parse(j.at("w").get<std::string>()),
                          j.at("margins").get<std::array<double, 4>>(), j.at("entropy").get<double>(), std::nullopt,
                          j.value("template", std::string{})};
  if (j.contains("dim_lower_bound") && !j["dim_lower_bound"].is_null()) c.dim_lower_bound = j["dim_lower_bound"].get<double>();
  return c;
}

inline Json to_json(const RationalClassification& r) {
  return {{"type", "classification"}, {"rho", r.rho},   {"p", r.p},
          {"q", r.q},                 {"q_prime", r.q_prime}, {"beta", r.beta},
          {"class", to_string(r.cls)}, {"boundary", r.boundary}};
}

inline Json to_json(const MixedEqualClassification& m) {
  Json j = to_json(m.classification);
  j["type"] = "mixed-equal-classification";
  j["lambda"] = m.classification.rho;
  j["geometry"] = to_string(m.geometry);
  j["geometry_boundary"] = m.geometry_boundary;
  return j;
}

// ---------------------------------------------------------------------------
// Re-verification from JSON

struct VerifyResult {
  bool ok = false;
  std::string message;
};

namespace detail {

inline ToolPolynomial poly_from_json(const Json& j) { return ToolPolynomial{j.at("coeffs").get<std::vector<double>>()}; }

inline VerifyResult verify_interior(const Json& j) {
  const SystemSpec spec = spec_from_json(j.at("spec"));
  const ToolPolynomial poly = poly_from_json(j.at("poly"));
  const ConditionReport r = check_tool_conditions(spec, poly);
  if (!r.passed()) return {false, "tool conditions fail for the stored polynomial"};
  // delta must be backed by the stored columns
  const auto cols = j.at("submatrix_columns").get<std::vector<int>>();
  const Eigen::MatrixXd sub = select_columns(build_B_matrix(spec, poly), cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double delta = j.at("delta").get<double>();
  if (!(delta > 0.0) || delta > smin / std::sqrt(static_cast<double>(cols.size())) * (1.0 + 1e-12))
    return {false, "delta exceeds sigma_min / sqrt(N) for the stored columns"};
  return {true, "interior certificate verified"};
}

/// Vertices must be the projections of their addresses, and no edge may be crossed
/// by the attractor: h_A(n) = sum_i |<(M^T)^i n, u>| is at most the edge offset.
inline VerifyResult verify_hull(const Json& j) {
  const SystemSpec spec = spec_from_json(j.at("spec"));
  const double slack = j.at("slack").get<double>();
  const Json& vs = j.at("vertices");
  const Json& as = j.at("addresses");
  if (vs.size() != as.size() || vs.size() < 2) return {false, "vertex and address lists differ"};
  std::vector<Vec2> v;
  double scale = 1.0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    v.push_back(vec_from(vs[i]));
    scale = std::max(scale, v.back().norm());
    const EventualAddress a(Word::parse(as[i].at("preperiod").get<std::string>()),
                            Word::parse(as[i].at("period").get<std::string>()));
    if (distance(project(spec, a), v.back()) > slack + 1e-9 * scale)
      return {false, "vertex " + std::to_string(i) + " is not the projection of its address"};
  }
  const Mat2 mt = spec.linear().transpose();
  const Vec2 u = spec.translation();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 e = v[(i + 1) % v.size()] - v[i];
    if (e.norm() == 0.0) continue;
    const Vec2 n{e.y / e.norm(), -e.x / e.norm()};
    double h = 0.0;
    Vec2 d = n;
    for (int k = 0; k < 1000000 && d.norm() * u.norm() > 1e-17 * scale; ++k) {
      h += std::abs(dot(d, u));
      d = mt * d;
    }
    if (h > dot(n, v[i]) + slack + 1e-9 * scale)
      return {false, "edge " + std::to_string(i) + " is crossed by the attractor"};
  }
  return {true, "hull verified"};
}

inline VerifyResult verify_expansion(const Json& j) {
  const SystemSpec spec = spec_from_json(j.at("spec"));
  const ToolPolynomial poly = poly_from_json(j.at("poly"));
  const Word digits = Word::parse(j.at("digits").get<std::string>());
  const Vec2 target = vec_from(j.at("target"));
  // replay the recurrence from the stored initial residuals
  std::vector<double> window = j.at("initial_residuals").get<std::vector<double>>();
  if (static_cast<int>(window.size()) != poly.degree()) return {false, "wrong number of initial residuals"};
  for (double u : window)
    if (std::abs(u) > 1.0 + kResidualSlack) return {false, "initial residual outside [-1, 1]"};
  for (Digit a : digits) {
    double s = 0.0;
    for (int k = 0; k < poly.degree(); ++k) s += poly.coeffs[static_cast<std::size_t>(k)] * window[static_cast<std::size_t>(k)];
    const double u = value(a) - s;
    if (std::abs(u) > 1.0 + kResidualSlack) return {false, "residual leaves [-1, 1]"};
    window.erase(window.begin());
    window.push_back(u);
  }
  const double err = distance(project_prefix(spec, digits).point, target);
  const double claimed = j.at("final_error").get<double>();
  if (err > claimed + 1e-12 * (1.0 + target.norm())) return {false, "reprojection error exceeds the stored value"};
  return {true, "expansion run verified"};
}

inline VerifyResult verify_membership(const Json& j) {
  const SystemSpec spec = spec_from_json(j.at("spec"));
  const Vec2 point = vec_from(j.at("point"));
  const std::string verdict = j.at("verdict").get<std::string>();
  if (verdict == "in") {
    const Word w = Word::parse(j.at("address_prefix").get<std::string>());
    const AffineMap f = affine_of_word(spec, w);
    const Vec2 anchor = j.at("witness") == "limit-point" ? f(project(spec, EventualAddress{})) : f(Vec2{});
    const double err = distance(anchor, point);
    if (err > j.at("residual_error").get<double>() + 1e-12) return {false, "address prefix does not reach the point"};
    return {true, "membership (in) verified"};
  }
  if (verdict == "out") {
    const MembershipVerdict v = decide_point(spec, point, std::max(1, j.at("depth").get<int>()));
    if (!v.out()) return {false, "pruning does not close at the stored depth"};
    return {true, "membership (out) verified"};
  }
  return {true, "unknown verdict carries no claim"};
}

inline VerifyResult verify_uniqueness(const Json& j) {
  std::string why;
  if (!verify_certificate(uniqueness_from_json(j), &why)) return {false, why};
  return {true, "uniqueness certificate verified"};
}

inline VerifyResult verify_classification(const Json& j) {
  RationalClassification r;
  if (j.at("type") == "mixed-equal-classification") {
    const MixedEqualClassification m = classify_mixed_equal(j.at("lambda").get<double>());
    if (to_string(m.geometry) != j.at("geometry").get<std::string>()) return {false, "geometry differs"};
    r = m.classification;
  } else if (j.at("q").get<int>() > 0) {
    r = classify_rational(j.at("rho"), j.at("p"), j.at("q"));
  } else {
    r = classify_beta(j.at("beta"));
  }
  if (to_string(r.cls) != j.at("class").get<std::string>()) return {false, "class differs"};
  return {true, "classification verified"};
}

}  // namespace detail

/// Dispatches on the "type" field.
inline VerifyResult verify_json(const Json& j) {
  const std::string type = j.value("type", std::string{});
  if (type == "interior") return detail::verify_interior(j);
  if (type == "expansion") return detail::verify_expansion(j);
  if (type == "hull") return detail::verify_hull(j);
  if (type == "membership") return detail::verify_membership(j);
  if (type == "uniqueness") return detail::verify_uniqueness(j);
  if (type == "classification" || type == "mixed-equal-classification") return detail::verify_classification(j);
  return {false, "unknown certificate type '" + type + "'"};
}

}  // namespace saffine
