#pragma once

// JSON wire formats: scalars as strings "a/b" (Laurent elements as arrays of
// [exponent, "a/b"] pairs), points as {"center": ..., "tau": ...} with
// "-inf" for rigid points, polynomials as coefficient arrays.  Configs are
// validated key-by-key; unknown keys are rejected.

#include <berk/affinoid.hpp>
#include <berk/entire.hpp>
#include <berk/field.hpp>
#include <berk/maps.hpp>
#include <berk/montel.hpp>
#include <berk/residue_maps.hpp>
#include <berk/tree.hpp>

#include <json.hpp>

#include <set>
#include <string>
#include <vector>

namespace berk {

using Json = nlohmann::json;

inline void check_keys(const Json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
  require(obj.is_object(), where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    require(allowed.count(it.key()) > 0, where + ": unknown key '" + it.key() + "'");
}

// --- descriptors -----------------------------------------------------------

inline Json descriptor_to_json(const FieldDescriptor& d) {
  Json j;
  switch (d.kind) {
    case FieldKind::PAdic: j["kind"] = "p-adic"; break;
    case FieldKind::LaurentQ: j["kind"] = "laurent-q"; break;
    case FieldKind::LaurentFp: j["kind"] = "laurent-fp"; break;
  }
  if (d.kind != FieldKind::LaurentQ) j["p"] = d.p;
  return j;
}

inline FieldDescriptor descriptor_from_json(const Json& j) {
  check_keys(j, {"kind", "p"}, "field");
  require(j.contains("kind") && j["kind"].is_string(), "field: missing kind");
  const std::string kind = j["kind"];
  if (kind == "laurent-q") return FieldDescriptor::laurent_q();
  require(j.contains("p") && j["p"].is_number_unsigned(), "field: missing prime p");
  if (kind == "p-adic") return FieldDescriptor::padic(j["p"].get<unsigned>());
  if (kind == "laurent-fp") return FieldDescriptor::laurent_fp(j["p"].get<unsigned>());
  throw precondition_error("field: unknown kind '" + kind + "'");
}

// --- scalars ----------------------------------------------------------------

inline Json scalar_to_json(const FieldElement& x) {
  if (x.field().kind == FieldKind::PAdic) return rat_str(x.rational_payload());
  Json arr = Json::array();
  for (const auto& t : x.laurent_payload()) arr.push_back({t.exp, rat_str(t.coeff)});
  return arr;
}

inline FieldElement scalar_from_json(const FieldDescriptor& d, const Json& j) {
  if (j.is_string()) return FieldElement::from_rational(d, rat_parse(j.get<std::string>()));
  if (j.is_number_integer()) return FieldElement::from_int(d, j.get<long>());
  require(j.is_array(), "scalar: expected a string, integer or [exp, coeff] array");
  std::vector<LaurentTerm> terms;
  for (const auto& e : j) {
    require(e.is_array() && e.size() == 2, "scalar: laurent terms are [exponent, coefficient]");
    terms.push_back({e[0].get<long>(), rat_parse(e[1].is_string()
                                                     ? e[1].get<std::string>()
                                                     : std::to_string(e[1].get<long>()))});
  }
  return FieldElement::laurent(d, terms);
}

// --- points -----------------------------------------------------------------

inline Json point_to_json(const BerkovichPoint& x) {
  if (x.is_infinity()) return Json{{"infinity", true}};
  Json j;
  j["center"] = scalar_to_json(x.center());
  j["tau"] = x.tau().str();
  return j;
}

inline BerkovichPoint point_from_json(const FieldDescriptor& d, const Json& j) {
  check_keys(j, {"center", "tau", "infinity"}, "point");
  if (j.contains("infinity")) {
    require(j["infinity"].is_boolean() && j["infinity"].get<bool>(), "point: infinity flag");
    return BerkovichPoint::infinity(d);
  }
  require(j.contains("center") && j.contains("tau"), "point: need center and tau");
  const LogValue tau = LogValue::parse(j["tau"].get<std::string>());
  return BerkovichPoint::make(scalar_from_json(d, j["center"]), tau);
}

// --- maps -------------------------------------------------------------------

inline Json polynomial_to_json(const PolynomialMap& f) {
  Json coeffs = Json::array();
  for (const auto& c : f.coeffs) coeffs.push_back(scalar_to_json(c));
  return Json{{"coeffs", coeffs}};
}

inline PolynomialMap polynomial_from_json(const FieldDescriptor& d, const Json& j) {
  check_keys(j, {"coeffs"}, "polynomial");
  require(j.contains("coeffs") && j["coeffs"].is_array(), "polynomial: missing coeffs");
  std::vector<FieldElement> coeffs;
  for (const auto& c : j["coeffs"]) coeffs.push_back(scalar_from_json(d, c));
  return PolynomialMap::make(d, std::move(coeffs));
}

inline RationalMap rational_from_json(const FieldDescriptor& d, const Json& j) {
  check_keys(j, {"num", "den", "coeffs"}, "map");
  if (j.contains("coeffs")) return RationalMap::of(polynomial_from_json(d, j));
  require(j.contains("num") && j.contains("den"), "map: need num and den arrays");
  auto read = [&](const Json& arr) {
    require(arr.is_array(), "map: num/den must be coefficient arrays");
    std::vector<FieldElement> coeffs;
    for (const auto& c : arr) coeffs.push_back(scalar_from_json(d, c));
    return PolynomialMap::make(d, std::move(coeffs));
  };
  return RationalMap::make(read(j["num"]), read(j["den"]));
}

inline Json affinoid_to_json(const Affinoid& y) {
  Json b = Json::array();
  for (const auto& p : y.boundary()) b.push_back(point_to_json(p));
  return Json{{"boundary", b}};
}

inline Affinoid affinoid_from_json(const FieldDescriptor& d, const Json& j) {
  check_keys(j, {"boundary"}, "affinoid");
  require(j.contains("boundary") && j["boundary"].is_array(), "affinoid: missing boundary");
  std::vector<BerkovichPoint> pts;
  for (const auto& p : j["boundary"]) pts.push_back(point_from_json(d, p));
  return Affinoid::from_boundary(std::move(pts));
}

// --- series -----------------------------------------------------------------

inline TruncatedEntireSeries series_from_json(const Json& j) {
  check_keys(j, {"family", "params", "N"}, "series");
  require(j.contains("family") && j["family"].is_string(), "series: missing family");
  require(j.contains("N") && j["N"].is_number_integer(), "series: missing truncation order N");
  const std::string fam = j["family"];
  const long N = j["N"].get<long>();
  const Json params = j.contains("params") ? j["params"] : Json::object();
  if (fam == "geometric") {
    check_keys(params, {"vlambda"}, "series.params");
    require(params.contains("vlambda"), "series: geometric needs vlambda");
    return TruncatedEntireSeries::geometric(rat_parse(params["vlambda"].get<std::string>()), N);
  }
  if (fam == "baker") {
    check_keys(params, {"vlambda", "l5", "l6"}, "series.params");
    require(params.contains("vlambda") && params.contains("l5") && params.contains("l6"),
            "series: baker needs vlambda, l5, l6");
    return TruncatedEntireSeries::baker(rat_parse(params["vlambda"].get<std::string>()),
                                        Int(params["l5"].get<long>()),
                                        Int(params["l6"].get<long>()), N);
  }
  if (fam == "explicit") {
    check_keys(params, {"valuations", "tail"}, "series.params");
    require(params.contains("valuations") && params["valuations"].is_array(),
            "series: explicit needs valuations [[n, v], ...]");
    std::vector<LogValue> vals(static_cast<std::size_t>(N) + 1, LogValue::pos_inf());
    for (const auto& e : params["valuations"]) {
      require(e.is_array() && e.size() == 2, "series: valuations entries are [n, v]");
      const long n = e[0].get<long>();
      require(0 <= n && n <= N, "series: valuation index outside [0, N]");
      vals[static_cast<std::size_t>(n)] = LogValue::parse(e[1].get<std::string>());
    }
    std::optional<std::pair<Rat, Rat>> tail;
    if (params.contains("tail")) {
      check_keys(params["tail"], {"alpha", "beta"}, "series.params.tail");
      tail = std::make_pair(rat_parse(params["tail"]["alpha"].get<std::string>()),
                            rat_parse(params["tail"]["beta"].get<std::string>()));
    }
    return TruncatedEntireSeries::explicit_series(std::move(vals), tail);
  }
  throw precondition_error("series: unknown family '" + fam + "'");
}

inline Json piecewise_to_json(const PiecewiseAffineMap& pl) {
  Json j;
  j["breakpoints"] = Json::array();
  j["values"] = Json::array();
  j["slopes"] = Json::array();
  j["vertices"] = Json::array();
  for (const auto& b : pl.breakpoints()) j["breakpoints"].push_back(rat_str(b));
  for (const auto& v : pl.values()) j["values"].push_back(rat_str(v));
  for (const auto& s : pl.slopes()) j["slopes"].push_back(s.str());
  for (const auto& v : pl.vertices()) j["vertices"].push_back(rat_str(v));
  j["convex"] = pl.convex();
  return j;
}

// CSV rows (tau, phi) at breakpoints and midpoints, for plotting.
inline std::string piecewise_to_csv(const PiecewiseAffineMap& pl) {
  std::string out = "tau,phi\n";
  const auto& bp = pl.breakpoints();
  for (std::size_t i = 0; i < bp.size(); ++i) {
    out += rat_str(bp[i]) + "," + rat_str(pl.eval(bp[i])) + "\n";
    if (i + 1 < bp.size()) {
      const Rat mid = (bp[i] + bp[i + 1]) / 2;
      out += rat_str(mid) + "," + rat_str(pl.eval(mid)) + "\n";
    }
  }
  return out;
}

// --- map families -----------------------------------------------------------

inline MapFamily family_from_json(const FieldDescriptor& d, const Json& j) {
  check_keys(j, {"kind", "r", "s", "a", "u"}, "family");
  require(j.contains("kind") && j["kind"].is_string(), "family: missing kind");
  const std::string kind = j["kind"];
  if (kind == "shifted-monomial") {
    require(j.contains("r") && j.contains("s") && j.contains("a"),
            "family: shifted-monomial needs r, s, a");
    return MapFamily::shifted_monomial(d, j["r"].get<long>(), j["s"].get<long>(),
                                       scalar_from_json(d, j["a"]));
  }
  if (kind == "power") return MapFamily::power(d);
  if (kind == "frobenius-perturbed") return MapFamily::frobenius_perturbed(d);
  if (kind == "scaled-power") {
    require(j.contains("u"), "family: scaled-power needs u");
    return MapFamily::scaled_power(d, scalar_from_json(d, j["u"]));
  }
  throw precondition_error("family: unknown kind '" + kind + "'");
}

// --- residue maps ------------------------------------------------------------

inline Json gf_map_to_json(const RRMap<GFOps>& r) {
  Json num = Json::array(), den = Json::array();
  for (auto c : r.num) num.push_back(static_cast<int>(c));
  for (auto c : r.den) den.push_back(static_cast<int>(c));
  return Json{{"num", num}, {"den", den}, {"degree", rrmap_degree(r)}};
}

}  // namespace berk
