// Config-driven front end: reads a JSON experiment description, dispatches to
// the library and writes a deterministic JSON (or, for polygon samples, CSV)
// report.  Exit codes: 0 success, 1 invalid configuration or violated
// precondition, 2 internal invariant failure.

#include <berk/json_io.hpp>
#include <berk/rng.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace berk;

namespace {

constexpr const char* kSchemaVersion = "1";

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_given = false;
  long parallel = 1;
};

Json load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw precondition_error(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"schema_version", "field", "command", "params", "out", "format", "seed"},
             "config");
  require(j.contains("command") && j["command"].is_string(), "config: missing command");
  return j;
}

Json window_param(const Json& params, const char* key = "window") {
  require(params.contains(key) && params[key].is_array() && params[key].size() == 2,
          std::string("params: ") + key + " must be [lo, hi]");
  return params[key];
}

Rat rat_param(const Json& j) {
  if (j.is_string()) return rat_parse(j.get<std::string>());
  require(j.is_number_integer(), "expected a rational string or integer");
  return Rat(j.get<long>());
}

FieldDescriptor field_param(const Json& config) {
  require(config.contains("field"), "config: this command needs a field descriptor");
  return descriptor_from_json(config["field"]);
}

// --- per-command runners ----------------------------------------------------

Json run_phi(const Json& params, std::string* csv_out) {
  check_keys(params, {"series", "window"}, "params");
  auto series = series_from_json(params.at("series"));
  const Json w = window_param(params);
  auto pl = valuation_polygon(series, rat_param(w[0]), rat_param(w[1]));
  if (csv_out) *csv_out = piecewise_to_csv(pl);
  return piecewise_to_json(pl);
}

Json run_julia_ray(const Json& params) {
  check_keys(params, {"series", "window", "from_tau"}, "params");
  auto series = series_from_json(params.at("series"));
  const Json w = window_param(params);
  const Rat lo = rat_param(w[0]), hi = rat_param(w[1]);
  Json out;
  out["breakpoints"] = Json::array();
  for (const auto& [tau, img] : julia_breakpoints(series, lo, hi))
    out["breakpoints"].push_back({rat_str(tau), rat_str(img)});
  if (params.contains("from_tau")) {
    auto found = find_julia_ray_point(series, rat_param(params["from_tau"]), hi);
    out["ray_point"] = {{"tau_star", rat_str(found.tau_star)}, {"m", found.iterations}};
  }
  return out;
}

Json run_iterate(const Json& params) {
  check_keys(params, {"series", "window", "tau0", "steps"}, "params");
  auto series = series_from_json(params.at("series"));
  const Json w = window_param(params);
  auto pl = valuation_polygon(series, rat_param(w[0]), rat_param(w[1]));
  auto orbit = iterate_ray(pl, rat_param(params.at("tau0")), params.at("steps").get<long>());
  Json values = Json::array();
  for (const auto& v : orbit.values) values.push_back(rat_str(v));
  return Json{{"orbit", values}, {"exited_window", orbit.exited_window}};
}

Json run_annuli(const Json& params) {
  check_keys(params, {"series", "n_lo", "n_hi"}, "params");
  auto series = series_from_json(params.at("series"));
  const long n_lo = params.at("n_lo").get<long>(), n_hi = params.at("n_hi").get<long>();
  Json rows = Json::array();
  for (const auto& st : annuli_orbit(series, n_lo, n_hi)) {
    rows.push_back({{"n", st.n},
                    {"lo", rat_str(st.lo)},
                    {"hi", rat_str(st.hi)},
                    {"slope", st.slope.str()},
                    {"image_lo", rat_str(st.image_lo)},
                    {"image_hi", rat_str(st.image_hi)},
                    {"maps_onto_next", st.maps_onto_next},
                    {"endpoint_identity", st.endpoint_identity}});
  }
  return Json{{"annuli", rows}};
}

Json run_enumerate(const Json& params) {
  check_keys(params, {"q", "S", "d_max"}, "params");
  require(params.contains("q") && params.contains("S") && params.contains("d_max"),
          "params: enumerate needs q, S, d_max");
  GFOps gf(params["q"].get<unsigned>());
  std::vector<ProjPoint<GFOps::Elem>> S;
  for (const auto& s : params["S"]) {
    if (s.is_string() && (s == "inf" || s == "infinity"))
      S.push_back(ProjPoint<GFOps::Elem>::infinity());
    else
      S.push_back(ProjPoint<GFOps::Elem>::finite(
          gf.from_int(s.is_string() ? std::stol(s.get<std::string>()) : s.get<long>())));
  }
  auto maps = enumerate_restricted_maps(gf, S, params["d_max"].get<long>());
  Json arr = Json::array();
  long max_degree = 0;
  for (const auto& r : maps) {
    arr.push_back(gf_map_to_json(r));
    max_degree = std::max(max_degree, rrmap_degree(r));
  }
  return Json{{"maps", arr},
              {"count", maps.size()},
              {"max_degree", max_degree},
              {"bound_satisfied", max_degree <= static_cast<long>(S.size()) - 2}};
}

Json run_probe(const FieldDescriptor& d, const Json& params, std::string* csv_out) {
  check_keys(params, {"probe", "family", "map", "point", "witnesses", "n_max", "zeta", "samples"},
             "params");
  const std::string kind = params.value("probe", "pointwise");
  const long n_max = params.value("n_max", 12L);
  if (kind == "pointwise") {
    auto fam = family_from_json(d, params.at("family"));
    auto x = point_from_json(d, params.at("point"));
    std::vector<FieldElement> witnesses;
    if (params.contains("witnesses"))
      for (const auto& w : params["witnesses"]) witnesses.push_back(scalar_from_json(d, w));
    auto rep = pointwise_limit_probe(fam, x, n_max, witnesses);
    Json tracks = Json::array();
    for (const auto& tr : rep.tracks) {
      Json values = Json::array();
      for (const auto& v : tr.values) values.push_back(v.str());
      tracks.push_back({{"witness", scalar_to_json(tr.witness)},
                        {"values", values},
                        {"stabilized", tr.stabilized},
                        {"limit", tr.limit.str()}});
    }
    if (csv_out) {  // per-n rows, one column per witness
      std::string csv = "n";
      for (std::size_t w = 0; w < rep.tracks.size(); ++w) csv += ",w" + std::to_string(w);
      csv += "\n";
      for (long n = 1; n <= n_max; ++n) {
        csv += std::to_string(n);
        for (const auto& tr : rep.tracks)
          csv += "," + tr.values[static_cast<std::size_t>(n - 1)].str();
        csv += "\n";
      }
      *csv_out = csv;
    }
    Json out{{"point", point_to_json(x)}, {"tracks", tracks}};
    if (rep.inferred_ball) out["inferred_ball"] = point_to_json(*rep.inferred_ball);
    return out;
  }
  if (kind == "degree-explosion") {
    auto fam = family_from_json(d, params.at("family"));
    auto x = point_from_json(d, params.at("point"));
    auto rep = degree_explosion_probe(fam, x, n_max);
    Json rows = Json::array();
    std::string csv = "n,degree,log_diam\n";
    for (const auto& r : rep.rows) {
      rows.push_back({{"n", r.n}, {"degree", r.degree}, {"log_diam", r.image_log_diam.str()}});
      csv += std::to_string(r.n) + "," + std::to_string(r.degree) + "," +
             r.image_log_diam.str() + "\n";
    }
    if (csv_out) *csv_out = csv;
    return Json{{"point", point_to_json(x)},
                {"rows", rows},
                {"collapse_verified", rep.collapse_verified},
                {"note", rep.note}};
  }
  if (kind == "good-reduction") {
    require(csv_out == nullptr, "csv output is not defined for the good-reduction probe");
    auto R = rational_from_json(d, params.at("map"));
    require(params.contains("zeta"), "params: good-reduction probe needs zeta");
    std::vector<FieldElement> samples;
    if (params.contains("samples"))
      for (const auto& s : params["samples"]) samples.push_back(scalar_from_json(d, s));
    auto rep = good_reduction_limit_probe(R, rat_param(params["zeta"]), n_max, samples);
    Json rows = Json::array();
    for (const auto& row : rep.samples)
      rows.push_back({{"sample", scalar_to_json(row.sample)},
                      {"verified_up_to", row.verified_up_to},
                      {"ok", row.ok},
                      {"note", row.note}});
    const char* verdict = rep.verdict == GoodReductionCase::TowardsGauss ? "towards-gauss"
                          : rep.verdict == GoodReductionCase::TowardsConstant
                              ? "towards-constant"
                              : "periodic-ball";
    Json orbit = Json::array();
    for (const auto& r : rep.residue_orbit) orbit.push_back(rat_str(r));
    return Json{{"case", verdict},
                {"budget_limited", rep.budget_limited},
                {"preperiod", rep.preperiod},
                {"period", rep.period},
                {"residue_orbit", orbit},
                {"samples", rows}};
  }
  throw precondition_error("params: unknown probe kind '" + kind + "'");
}

Json run_cantor(const FieldDescriptor& d, const Json& params) {
  check_keys(params, {"c", "depth", "samples"}, "params");
  require(params.contains("c") && params.contains("depth"), "params: cantor needs c and depth");
  const FieldElement c = scalar_from_json(d, params["c"]);
  const long depth = params["depth"].get<long>();
  auto rep = cantor_coding(c, depth);
  Json levels = Json::array();
  for (const auto& lvl : rep.levels) {
    Json balls = Json::array();
    for (const auto& cb : lvl) {
      Json address = Json::array();
      for (int a : cb.address) address.push_back(a);
      balls.push_back(
          {{"ball", point_to_json(cb.ball)}, {"degree", cb.degree}, {"address", address}});
    }
    levels.push_back(balls);
  }
  Json out{{"start", point_to_json(rep.start)},
           {"levels", levels},
           {"separation_level", rep.separation_level},
           {"disjoint_ok", rep.disjoint_ok},
           {"images_ok", rep.images_ok},
           {"counts_ok", rep.counts_ok}};
  if (params.contains("samples")) {
    Json rows = Json::array();
    for (const auto& s : params["samples"]) {
      auto z = scalar_from_json(d, s);
      auto check = check_itinerary(rep, c, z, depth);
      Json symbols = Json::array();
      for (int sym : check.symbols) symbols.push_back(sym);
      rows.push_back({{"point", scalar_to_json(z)},
                      {"itinerary", symbols},
                      {"shift_ok", check.shift_ok},
                      {"address_ok", check.address_ok}});
    }
    out["itineraries"] = rows;
  }
  return out;
}

Json fast_arc_to_json(const FastArcReport& rep) {
  Json vertices = Json::array();
  for (const auto& v : rep.vertices) vertices.push_back(point_to_json(v));
  Json degrees = Json::array();
  for (long dg : rep.segment_degrees) degrees.push_back(dg);
  Json valences = Json::array();
  for (long v : rep.valences) valences.push_back(v);
  return Json{{"vertices", vertices},
              {"segment_degrees", degrees},
              {"valences", valences},
              {"C", rat_str(rep.C)},
              {"start_degree", rep.start_degree},
              {"boundary_degree", rep.boundary_degree}};
}

Json run_fast_arc(const FieldDescriptor& d, const Json& params) {
  check_keys(params, {"map", "affinoid", "start"}, "params");
  auto f = polynomial_from_json(d, params.at("map"));
  auto y = affinoid_from_json(d, params.at("affinoid"));
  auto x0 = point_from_json(d, params.at("start"));
  return fast_arc_to_json(fast_arc(f, y, x0));
}

std::vector<BerkovichPoint> sampled_interior(const Affinoid& y, long count, SplitMix64& rng) {
  std::vector<BerkovichPoint> out;
  const long tau_hi = static_cast<long>(rat_num(y.outer.tau().finite()));
  long guard = 0;
  while (static_cast<long>(out.size()) < count) {
    require(++guard < 100000, "sampling: could not find interior points");
    auto x = BerkovichPoint::make(
        FieldElement::from_int(y.outer.field(), rng.range(-50, 50)),
        LogValue(Rat(rng.range(tau_hi - 8, tau_hi - 1))));
    if (y.interior_contains(x)) out.push_back(x);
  }
  return out;
}

Json run_degree_check(const FieldDescriptor& d, const Json& params, SplitMix64& rng,
                      long parallel) {
  check_keys(params, {"mode", "map", "affinoid", "samples", "sample_count", "target", "domain"},
             "params");
  const std::string mode = params.value("mode", "bound");
  auto f = polynomial_from_json(d, params.at("map"));
  if (mode == "sum") {
    require(params.contains("target") && params.contains("domain"),
            "params: degree-check sum mode needs target and domain");
    auto rep = degree_sum_check(f, point_from_json(d, params["target"]),
                                point_from_json(d, params["domain"]));
    Json fibers = Json::array();
    for (const auto& fc : rep.fibers)
      fibers.push_back({{"ball", point_to_json(fc.ball)}, {"degree", fc.degree}});
    return Json{{"fibers", fibers}, {"total", rep.total}, {"expected", rep.expected}};
  }
  require(mode == "bound", "params: degree-check mode must be 'bound' or 'sum'");
  auto y = affinoid_from_json(d, params.at("affinoid"));
  std::vector<BerkovichPoint> samples;
  if (params.contains("samples")) {
    for (const auto& p : params["samples"]) samples.push_back(point_from_json(d, p));
  } else {
    samples = sampled_interior(y, params.value("sample_count", 10L), rng);
  }

  // independent sub-experiments; sharded when --parallel asks for it, with a
  // deterministic in-order assembly
  std::vector<DegreeBoundReport> parts;
  if (parallel > 1 && samples.size() > 1) {
    const std::size_t shard = (samples.size() + parallel - 1) / parallel;
    std::vector<std::future<DegreeBoundReport>> futures;
    for (std::size_t base = 0; base < samples.size(); base += shard) {
      std::vector<BerkovichPoint> chunk(
          samples.begin() + base,
          samples.begin() + std::min(samples.size(), base + shard));
      futures.push_back(std::async(std::launch::async, [f, y, chunk] {
        return degree_bound_check(f, y, chunk);
      }));
    }
    for (auto& fu : futures) parts.push_back(fu.get());
  } else {
    parts.push_back(degree_bound_check(f, y, samples));
  }

  Json entries = Json::array();
  bool all = true;
  long maxb = 0;
  for (const auto& rep : parts) {
    all = all && rep.all_bounded;
    maxb = std::max(maxb, rep.max_boundary_degree);
    for (const auto& e : rep.entries)
      entries.push_back({{"sample", point_to_json(e.sample)},
                         {"degree", e.degree},
                         {"bound", rat_str(e.bound)},
                         {"arc", fast_arc_to_json(e.arc)}});
  }
  return Json{{"entries", entries}, {"max_boundary_degree", maxb}, {"all_bounded", all}};
}

Json run_classify(const FieldDescriptor& d, const Json& params) {
  check_keys(params, {"map", "z0", "series"}, "params");
  FixedPointReport rep{FixedPointClass::Indifferent, true, LogValue(0)};
  if (params.contains("series")) {
    rep = classify_fixed_point(series_from_json(params["series"]));
  } else {
    require(params.contains("map") && params.contains("z0"),
            "params: classify needs map and z0 (or series)");
    rep = classify_fixed_point(polynomial_from_json(d, params["map"]),
                               scalar_from_json(d, params["z0"]));
  }
  const char* cls = rep.cls == FixedPointClass::Attracting ? "attracting"
                    : rep.cls == FixedPointClass::Indifferent ? "indifferent"
                                                              : "repelling";
  return Json{{"class", cls},
              {"normal", rep.normal},
              {"multiplier_valuation", rep.multiplier_valuation.str()}};
}

// Light structural validation of an emitted report; every report written by
// the CLI must pass it (the round-trip property).
void validate_report(const Json& rep) {
  check_keys(rep, {"schema_version", "command", "result"}, "report");
  require(rep.value("schema_version", "") == kSchemaVersion, "report: bad schema_version");
  require(rep.contains("command") && rep["command"].is_string(), "report: missing command");
  require(rep.contains("result") && rep["result"].is_object(), "report: missing result");
  const std::string cmd = rep["command"];
  const Json& r = rep["result"];
  auto need = [&](const char* key) {
    require(r.contains(key), "report: result of '" + cmd + "' lacks '" + key + "'");
  };
  if (cmd == "phi") need("breakpoints"), need("slopes"), need("convex");
  if (cmd == "julia-ray") need("breakpoints");
  if (cmd == "iterate") need("orbit");
  if (cmd == "annuli") need("annuli");
  if (cmd == "enumerate") need("count"), need("bound_satisfied"), need("maps");
  if (cmd == "cantor") need("levels"), need("separation_level");
  if (cmd == "fast-arc") need("vertices"), need("C"), need("boundary_degree");
  if (cmd == "degree-check") {
    require(r.contains("entries") || r.contains("fibers"), "report: degree-check result");
  }
  if (cmd == "classify") need("class"), need("normal");
}

int run(const Options& opt) {
  const Json config = load_config(opt.config_path);
  const std::string command = config["command"];
  const Json params = config.contains("params") ? config["params"] : Json::object();

  std::string format = opt.format.empty() ? config.value("format", "json") : opt.format;
  require(format == "json" || format == "csv", "format must be json or csv");
  require(format == "json" || command == "phi" || command == "probe",
          "csv output is reserved for PL samples and probe rows");
  std::string out_path = !opt.out_path.empty() ? opt.out_path : config.value("out", "");
  require(!out_path.empty(), "no output path: pass --out or set \"out\" in the config");

  std::uint64_t seed = opt.seed_given ? opt.seed : config.value("seed", 0ULL);
  SplitMix64 rng(seed);

  std::string csv;
  Json result;
  if (command == "phi") {
    result = run_phi(params, format == "csv" ? &csv : nullptr);
  } else if (command == "julia-ray") {
    result = run_julia_ray(params);
  } else if (command == "iterate") {
    result = run_iterate(params);
  } else if (command == "annuli") {
    result = run_annuli(params);
  } else if (command == "enumerate") {
    result = run_enumerate(params);
  } else if (command == "probe") {
    result = run_probe(field_param(config), params, format == "csv" ? &csv : nullptr);
  } else if (command == "cantor") {
    result = run_cantor(field_param(config), params);
  } else if (command == "fast-arc") {
    result = run_fast_arc(field_param(config), params);
  } else if (command == "degree-check") {
    result = run_degree_check(field_param(config), params, rng, opt.parallel);
  } else if (command == "classify") {
    result = run_classify(field_param(config), params);
  } else {
    throw precondition_error("unknown command '" + command + "'");
  }

  std::ofstream out(out_path);
  require(out.good(), "cannot open output file: " + out_path);
  if (format == "csv") {
    out << csv;
  } else {
    Json report{{"schema_version", kSchemaVersion}, {"command", command}, {"result", result}};
    validate_report(report);
    out << report.dump(2) << "\n";
  }
  return 0;
}

void print_error(const char* code, const std::string& message, const std::string& context) {
  Json err{{"code", code}, {"message", message}, {"context", context}};
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact non-archimedean dynamics on the Berkovich line"};
  Options opt;
  app.add_option("--config", opt.config_path, "experiment configuration (JSON)")->required();
  app.add_option("--out", opt.out_path, "output path (overrides the config)");
  app.add_option("--format", opt.format, "json|csv (csv only for phi samples)");
  auto* seed_opt = app.add_option("--seed", opt.seed, "seed for randomized suites");
  app.add_option("--parallel", opt.parallel, "shard independent sub-experiments")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  opt.seed_given = seed_opt->count() > 0;

  try {
    return run(opt);
  } catch (const precondition_error& e) {
    print_error("precondition", e.what(), opt.config_path);
    return 1;
  } catch (const invariant_error& e) {
    print_error("invariant", e.what(), opt.config_path);
    return 2;
  } catch (const std::exception& e) {
    print_error("error", e.what(), opt.config_path);
    return 1;
  }
}
