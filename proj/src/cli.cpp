#include "ardyn/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>

#include "ardyn/heights.hpp"
#include "ardyn/lattes.hpp"
#include "json.hpp"

namespace ardyn::cli {

using Json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("cannot read " + what + " '" + text + "' as a number");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) throw UsageError("trailing characters in " + what + " '" + text + "' at position " + std::to_string(used));
  return v;
}

QuadNumber parse_coord(const std::string& text, int d, const std::string& what) {
  try {
    return parse_quad(text, d);
  } catch (const ParseError& e) {
    throw UsageError(what + " '" + text + "': " + e.what());
  }
}

ProjPoint parse_point(const std::string& text, int d) {
  if (text == "inf") return ProjPoint::infinity(d);
  std::vector<std::string> parts = split(text, ',');
  if (parts.size() > 2) throw UsageError("point '" + text + "' must be X or X,Y");
  QuadNumber x = parse_coord(parts[0], d, "point");
  QuadNumber y = parts.size() == 2 ? parse_coord(parts[1], d, "point") : QuadNumber(BigRational(1), d);
  if (x.is_zero() && y.is_zero()) throw UsageError("point '" + text + "' is (0 : 0)");
  return ProjPoint(x, y);
}

std::optional<Complex> parse_complex(const std::string& text) {
  if (text == "inf") return std::nullopt;
  std::vector<std::string> parts = split(text, ',');
  if (parts.size() > 2) throw UsageError("complex point '" + text + "' must be RE or RE,IM");
  double re = parse_double(parts[0], "real part");
  double im = parts.size() == 2 ? parse_double(parts[1], "imaginary part") : 0.0;
  return Complex(re, im);
}

Window parse_window(const std::string& text, Window fallback) {
  if (text.empty()) return fallback;
  std::vector<std::string> parts = split(text, ',');
  if (parts.size() != 4) throw UsageError("window '" + text + "' must be x0,x1,y0,y1");
  Window w{parse_double(parts[0], "window"), parse_double(parts[1], "window"), parse_double(parts[2], "window"),
           parse_double(parts[3], "window")};
  if (!(w.x1 > w.x0) || !(w.y1 > w.y0)) throw UsageError("window '" + text + "' is empty");
  return w;
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }
Json node_json(const std::optional<Complex>& z) { return z ? complex_json(*z) : Json("inf"); }

Json window_json(const Window& w) { return Json::array({w.x0, w.x1, w.y0, w.y1}); }

Json poly_json(const Poly& p) {
  Json a = Json::array();
  for (const QuadNumber& c : p.coeffs()) a.push_back(c.str());
  return a;
}

Json map_json(const RationalMap& f) {
  Json j;
  j["text"] = f.str();
  j["degree"] = f.degree();
  j["field"] = f.field();
  j["num"] = poly_json(f.num());
  j["den"] = poly_json(f.den());
  return j;
}

struct NamedMap {
  std::string label;
  RationalMap map;
  std::optional<CatalogEntry> entry;
};

std::vector<NamedMap> load_maps(const RunConfig& cfg) {
  std::vector<NamedMap> out;
  for (const std::string& name : cfg.catalog) {
    try {
      CatalogEntry e = catalog_entry(name);
      out.push_back({name, e.map, e});
    } catch (const UnknownMapError& e) {
      throw UsageError(e.what());
    }
  }
  for (const std::string& path : cfg.map_files) out.push_back({path, read_map_file(path), std::nullopt});
  return out;
}

NamedMap one_map(const RunConfig& cfg) {
  std::vector<NamedMap> maps = load_maps(cfg);
  if (maps.size() != 1) throw UsageError(cfg.subcommand + " needs exactly one map (--catalog NAME or --map FILE)");
  return maps.front();
}

std::optional<std::string> catalog_match(const RationalMap& f) {
  for (const CatalogEntry& e : catalog_entries())
    if (e.map.field() == f.field() || e.map.field() == 0 || f.field() == 0)
      if (e.map.degree() == f.degree() && equals(e.map, f)) return e.name;
  return std::nullopt;
}

Json name_or_null(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

EllipticCurveCM curve_for(const RunConfig& cfg, const std::optional<CatalogEntry>& entry) {
  std::string name = !cfg.curve.empty() ? cfg.curve : entry && !entry->curve.empty() ? entry->curve : "E1";
  try {
    return EllipticCurveCM::by_name(name);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

std::vector<std::string> points_or(const RunConfig& cfg, const std::string& fallback) {
  return cfg.points.empty() ? std::vector<std::string>{fallback} : cfg.points;
}

int pick(int value, int fallback) { return value > 0 ? value : fallback; }

Json header(const RunConfig& cfg) {
  Json j;
  j["schema"] = 1;
  j["command"] = cfg.subcommand;
  return j;
}

// commands -----------------------------------------------------------------

Json cmd_height(const RunConfig& cfg) {
  NamedMap m = one_map(cfg);
  if (cfg.points.empty()) throw UsageError("height needs at least one --point");
  CanonicalHeightOptions opts;
  opts.target_error = cfg.tol;
  opts.iteration_budget = pick(cfg.iters, opts.iteration_budget);
  Json j = header(cfg);
  j["map"] = m.label;
  j["bound"] = height_difference_bound(m.map).constant();
  Json rows = Json::array();
  for (const std::string& text : cfg.points) {
    ProjPoint p = parse_point(text, m.map.field());
    ProjPoint r = p.reduced();
    HeightValue h = canonical_height(m.map, p, opts);
    Json row;
    row["point"] = text;
    row["reduced"] = r.str();
    row["norms"] = Json::array({r.x().norm().get_str(), r.y().norm().get_str()});
    row["naive"] = naive_height(p).value;
    row["image"] = m.map(p).str();
    row["value"] = h.value;
    row["error_bound"] = h.error_bound;
    row["iterations"] = h.iterations_used;
    if (p.x().is_rational() && p.y().is_rational()) {
      // integral representative without reduction, summed place by place
      BigInt den = lcm(denominator(p.x()), denominator(p.y()));
      ProjPoint integral(QuadNumber(BigRational(p.x().re_part() * den)), QuadNumber(BigRational(p.y().re_part() * den)));
      Json places = Json::array();
      for (const PlaceTerm& t : naive_height_by_places(integral).terms)
        places.push_back({{"place", t.place.prime ? t.place.prime->get_str() : std::string("inf")}, {"value", t.value}});
      row["places"] = places;
    }
    rows.push_back(row);
  }
  j["points"] = rows;
  return j;
}

Json cmd_nt_height(const RunConfig& cfg) {
  if (!cfg.catalog.empty() || !cfg.map_files.empty()) throw UsageError("nt-height takes --curve, not a map");
  EllipticCurveCM curve = curve_for(cfg, std::nullopt);
  if (cfg.points.empty()) throw UsageError("nt-height needs at least one --point (x-coordinate)");
  CanonicalHeightOptions opts;
  opts.target_error = cfg.tol;
  opts.iteration_budget = pick(cfg.iters, opts.iteration_budget);
  Json j = header(cfg);
  j["curve"] = curve.name();
  j["doubling_map"] = lattes_double(curve).str();
  Json rows = Json::array();
  for (const std::string& text : cfg.points) {
    HeightValue h = neron_tate(curve, parse_point(text, curve.field()), opts);
    rows.push_back({{"x", text}, {"value", h.value}, {"error_bound", h.error_bound}, {"iterations", h.iterations_used}});
  }
  j["points"] = rows;
  return j;
}

Json cmd_commute(const RunConfig& cfg) {
  std::vector<NamedMap> maps = load_maps(cfg);
  if (maps.size() != 2) throw UsageError("commute needs exactly two maps");
  const RationalMap& f = maps[0].map;
  const RationalMap& g = maps[1].map;
  common_field(f.field(), g.field());
  RationalMap fg = compose(f, g);
  Json j = header(cfg);
  j["maps"] = Json::array({maps[0].label, maps[1].label});
  j["commute"] = commute_check(f, g);
  j["composition"] = fg.str();
  j["composition_equals"] = name_or_null(catalog_match(fg));
  return j;
}

Json cmd_compose(const RunConfig& cfg) {
  std::vector<NamedMap> maps = load_maps(cfg);
  if (maps.size() < 2) throw UsageError("compose needs at least two maps");
  RationalMap acc = maps.back().map;
  for (std::size_t k = maps.size() - 1; k-- > 0;) acc = compose(maps[k].map, acc);
  Json j = header(cfg);
  Json labels = Json::array();
  for (const NamedMap& m : maps) labels.push_back(m.label);
  j["maps"] = labels;
  j["result"] = map_json(acc);
  j["equals"] = name_or_null(catalog_match(acc));
  return j;
}

Json profile_json(const RamificationProfile& p) { return Json::array({p.counts[0], p.counts[1], p.counts[2], p.counts[3]}); }

Json cmd_ramify(const RunConfig& cfg) {
  NamedMap m = one_map(cfg);
  EllipticCurveCM curve = curve_for(cfg, m.entry);
  Json j = header(cfg);
  j["map"] = m.label;
  j["curve"] = curve.name();
  Json rows = Json::array();
  for (const ProjPoint& t : two_torsion_targets(curve)) {
    ProjPoint image = m.map(t);
    std::vector<int> mult = preimage_multiplicities(m.map, image);
    rows.push_back({{"torsion_x", t.str()}, {"target", image.str()}, {"distinct", distinct_preimages(m.map, image)}, {"multiplicities", mult}});
  }
  j["targets"] = rows;
  RamificationProfile p = ramification_profile(m.map, curve);
  j["profile"] = profile_json(p);
  auto s = p.sorted();
  j["sorted"] = Json::array({s[0], s[1], s[2], s[3]});
  return j;
}

Json cmd_table_check(const RunConfig& cfg) {
  Multiplier mult;
  if (!cfg.lambda.empty()) {
    std::vector<std::string> parts = split(cfg.lambda, ',');
    if (parts.size() != 3) throw UsageError("lambda '" + cfg.lambda + "' must be a,b,d");
    int d = static_cast<int>(parse_double(parts[2], "field tag"));
    if (d != 1 && d != 3) throw UsageError("field tag must be 1 or 3");
    mult.lambda = QuadNumber(parse_coord(parts[0], 0, "lambda").re_part(), parse_coord(parts[1], 0, "lambda").re_part(), d);
    mult.d = d;
  } else {
    NamedMap m = one_map(cfg);
    if (!m.entry || !m.entry->lambda) throw UsageError("table-check needs --lambda or a catalog map labelled by a multiplier");
    mult.lambda = *m.entry->lambda;
    mult.d = curve_for(cfg, m.entry).field();
  }
  RamificationProfile predicted = predict_profile(mult);
  std::optional<CatalogEntry> entry = catalog_for(mult);
  if (!entry) throw std::runtime_error("no catalog map for lambda = " + mult.lambda.str());
  RamificationProfile computed = ramification_profile(entry->map, EllipticCurveCM::by_name(entry->curve));
  Json j = header(cfg);
  j["lambda"] = mult.lambda.str();
  j["row"] = table_row(mult);
  j["map"] = entry->name;
  j["computed"] = profile_json(computed);
  j["predicted"] = profile_json(predicted);
  auto s = computed.sorted();
  j["multiset"] = Json::array({s[0], s[1], s[2], s[3]});
  j["match"] = computed.same_multiset(predicted);
  return j;
}

StartMetric metric_for(const std::string& method) {
  if (method.empty() || method == "sup") return {};
  if (method == "euclidean") return {StartMetric::Kind::euclidean, 1.0};
  throw UsageError("green --method must be sup or euclidean");
}

Json cmd_green(const RunConfig& cfg) {
  NamedMap m = one_map(cfg);
  Lift lift = Lift::from_map(m.map);
  const int n = pick(cfg.iters, 30);
  StartMetric metric = metric_for(cfg.method);
  Json j = header(cfg);
  j["map"] = m.label;
  j["iterations"] = n;
  Json rows = Json::array();
  for (const std::string& text : cfg.points) {
    std::optional<Complex> z = parse_complex(text);
    double g = z ? green(lift, *z, n, metric) : green_homogeneous(lift, 1.0, 0.0, n, metric);
    rows.push_back({{"z", node_json(z)}, {"g", g}});
  }
  j["points"] = rows;
  if (!cfg.window.empty() || cfg.res > 0 || !cfg.out.empty()) {
    Window w = parse_window(cfg.window, Window{});
    const int res = pick(cfg.res, 128);
    GreenField f = green_field(lift, w, res, res, n, metric);
    Json field;
    field["window"] = window_json(w);
    field["resolution"] = res;
    field["min"] = *std::min_element(f.values.begin(), f.values.end());
    field["max"] = *std::max_element(f.values.begin(), f.values.end());
    double sum = 0;
    for (double v : f.values) sum += v;
    field["mean"] = sum / static_cast<double>(f.values.size());
    if (!cfg.out.empty()) {
      write_csv(f, cfg.out);
      field["csv"] = cfg.out;
    }
    j["field"] = field;
  }
  return j;
}

Json grid_summary(const DensityGrid& g) {
  Json s;
  s["window"] = window_json(g.window);
  s["resolution"] = g.nx;
  s["total"] = g.total();
  s["window_fraction"] = g.window_fraction;
  auto top = std::max_element(g.mass.begin(), g.mass.end());
  auto k = static_cast<int>(top - g.mass.begin());
  s["max_cell"] = {{"center", complex_json(g.window.center(k % g.nx, k / g.nx, g.nx, g.ny))}, {"mass", *top}};
  return s;
}

Json cmd_measure(const RunConfig& cfg) {
  NamedMap m = one_map(cfg);
  const std::string method = cfg.method.empty() ? "green" : cfg.method;
  Window w = parse_window(cfg.window, Window{});
  Json j = header(cfg);
  j["map"] = m.label;
  j["method"] = method;
  DensityGrid grid;
  if (method == "green") {
    const int n = pick(cfg.iters, 30);
    const int res = pick(cfg.res, 256);
    grid = measure_from_green(green_field(Lift::from_map(m.map), w, res, res, n));
    j["iterations"] = n;
  } else if (method == "preimage") {
    if (cfg.points.size() > 1) throw UsageError("measure --method preimage takes one seed --point");
    std::optional<Complex> seed_point = parse_complex(points_or(cfg, "2,0").front());
    const int depth = cfg.depth >= 0 ? cfg.depth : 10;
    ComplexSampleSet s = preimage_sample(m.map, seed_point, depth, cfg.seed);
    grid = histogram(s, w, pick(cfg.res, 64), pick(cfg.res, 64));
    j["seed_point"] = node_json(seed_point);
    j["depth"] = depth;
    j["seed"] = cfg.seed;
    j["samples"] = s.size();
    j["infinity_count"] = s.infinity_count;
  } else {
    throw UsageError("measure --method must be green or preimage");
  }
  j["grid"] = grid_summary(grid);
  if (!cfg.out.empty()) {
    write_csv(grid, cfg.out);
    write_sidecar(grid, cfg.out, m.label + " " + method);
    j["csv"] = cfg.out;
  }
  return j;
}

Json cmd_density_compare(const RunConfig& cfg) {
  NamedMap m = one_map(cfg);
  EllipticCurveCM curve = curve_for(cfg, m.entry);
  if (cfg.points.size() > 1) throw UsageError("density-compare takes one seed --point");
  std::optional<Complex> seed_point = parse_complex(points_or(cfg, "2,0").front());
  const int depth = cfg.depth >= 0 ? cfg.depth : 9;
  const int res = pick(cfg.res, 64);
  Window w = parse_window(cfg.window, Window{-3, 3, -3, 3});
  ComplexSampleSet s = preimage_sample(m.map, seed_point, depth, cfg.seed);
  DensityGrid empirical = histogram(s, w, res, res);
  DensityGrid density = lattes_density(curve, w, res, res);
  Json j = header(cfg);
  j["map"] = m.label;
  j["curve"] = curve.name();
  j["depth"] = depth;
  j["seed"] = cfg.seed;
  j["samples"] = s.size();
  j["window"] = window_json(w);
  j["resolution"] = res;
  j["l1"] = compare_l1(empirical, density);
  j["correlation"] = correlation(empirical, density, singular_cells(curve, w, res, res));
  j["window_fraction"] = {{"samples", empirical.window_fraction}, {"density", density.window_fraction}};
  if (!cfg.out.empty()) {
    write_csv(empirical, cfg.out);
    write_sidecar(empirical, cfg.out, m.label + " preimages");
    write_csv(density, cfg.out + ".density.csv");
    write_sidecar(density, cfg.out + ".density.csv", curve.name() + " density");
    j["csv"] = Json::array({cfg.out, cfg.out + ".density.csv"});
  }
  return j;
}

Json cmd_periodic(const RunConfig& cfg) {
  NamedMap m = one_map(cfg);
  Json j = header(cfg);
  j["map"] = m.label;
  j["period"] = cfg.period;
  Json rows = Json::array();
  int repelling = 0;
  for (const PeriodicPoint& p : periodic_points(m.map, cfg.period)) {
    rows.push_back({{"z", node_json(p.z)},
                    {"multiplier", complex_json(p.multiplier)},
                    {"abs_multiplier", std::abs(p.multiplier)},
                    {"repelling", p.repelling()}});
    repelling += p.repelling();
  }
  j["count"] = rows.size();
  j["repelling"] = repelling;
  j["points"] = rows;
  return j;
}

Json cmd_julia(const RunConfig& cfg) {
  NamedMap m = one_map(cfg);
  if (cfg.out.empty()) throw UsageError("julia needs --out PATH (.pgm or .ppm)");
  RasterMode mode = RasterMode::measure;
  if (cfg.method == "green") mode = RasterMode::green;
  else if (!cfg.method.empty() && cfg.method != "measure") throw UsageError("julia --method must be measure or green");
  const bool color = cfg.out.size() >= 4 && cfg.out.substr(cfg.out.size() - 4) == ".ppm";
  Window w = parse_window(cfg.window, Window{});
  const int res = pick(cfg.res, 256);
  const int n = pick(cfg.iters, 30);
  Image img = julia_raster(m.map, w, res, res, n, mode, color);
  img.comments.insert(img.comments.begin() + 1, "label " + m.label);
  img.comments.push_back("seed " + std::to_string(cfg.seed));
  img.write(cfg.out);
  Json j = header(cfg);
  j["map"] = m.label;
  j["out"] = cfg.out;
  j["format"] = color ? "ppm" : "pgm";
  j["width"] = img.width;
  j["height"] = img.height;
  j["iterations"] = n;
  j["mode"] = mode == RasterMode::measure ? "measure" : "green";
  return j;
}

Poly conj_poly(const Poly& p) {
  std::vector<QuadNumber> c;
  for (const QuadNumber& x : p.coeffs()) c.push_back(x.conj());
  return Poly(c, p.field());
}

Json cmd_catalog(const RunConfig& cfg) {
  Json j = header(cfg);
  std::vector<NamedMap> maps = load_maps(cfg);
  if (maps.empty()) {
    Json rows = Json::array();
    for (const CatalogEntry& e : catalog_entries())
      rows.push_back({{"name", e.name},
                      {"degree", e.map.degree()},
                      {"curve", e.curve},
                      {"lambda", e.lambda ? Json(e.lambda->str()) : Json(nullptr)},
                      {"text", e.map.str()}});
    j["maps"] = rows;
    return j;
  }
  Json rows = Json::array();
  for (const NamedMap& m : maps) {
    Json row = map_json(m.map);
    row["name"] = m.label;
    if (m.entry) {
      row["curve"] = m.entry->curve;
      row["lambda"] = m.entry->lambda ? Json(m.entry->lambda->str()) : Json(nullptr);
    }
    PolyFraction der = map_derivative(m.map);
    row["derivative"] = {{"num", der.num.str()}, {"den", der.den.str()}};
    RationalMap conj = RationalMap::normalize(conj_poly(m.map.num()), conj_poly(m.map.den()));
    row["conjugate"] = conj.str();
    row["conjugate_equals"] = name_or_null(catalog_match(conj));
    rows.push_back(row);
  }
  j["maps"] = rows;
  return j;
}

using Handler = Json (*)(const RunConfig&);

const std::map<std::string, std::pair<Handler, const char*>>& handlers() {
  // second: key of the row array used for --format csv
  static const std::map<std::string, std::pair<Handler, const char*>> h = {
      {"height", {cmd_height, "points"}},
      {"nt-height", {cmd_nt_height, "points"}},
      {"commute", {cmd_commute, nullptr}},
      {"compose", {cmd_compose, nullptr}},
      {"ramify", {cmd_ramify, "targets"}},
      {"table-check", {cmd_table_check, nullptr}},
      {"green", {cmd_green, "points"}},
      {"measure", {cmd_measure, nullptr}},
      {"density-compare", {cmd_density_compare, nullptr}},
      {"periodic", {cmd_periodic, "points"}},
      {"julia", {cmd_julia, nullptr}},
      {"catalog", {cmd_catalog, "maps"}},
  };
  return h;
}

std::string csv_cell(const Json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void write_table(const Json& rows, std::ostream& out) {
  std::vector<std::string> cols;
  for (const Json& r : rows)
    for (auto it = r.begin(); it != r.end(); ++it)
      if (std::find(cols.begin(), cols.end(), it.key()) == cols.end()) cols.push_back(it.key());
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << "\n";
  for (const Json& r : rows) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << (r.contains(cols[c]) ? csv_cell(r[cols[c]]) : "");
    out << "\n";
  }
}

}  // namespace

const std::vector<Subcommand>& dispatch_table() {
  static const std::vector<Subcommand> table = {
      {"height", "canonical and naive heights of points under a map",
       {"canonical_height", "naive_height", "naive_height_by_places", "eval", "integral_gcd", "norm"}},
      {"nt-height", "Neron-Tate height of points on E1 or E2 from their x-coordinate", {"neron_tate", "lattes_double"}},
      {"commute", "check that two maps commute and identify the composite", {"commute_check", "equals"}},
      {"compose", "compose maps left to right as f1 o f2 o ...", {"compose", "normalize", "poly_gcd", "field_ops"}},
      {"ramify", "preimage counts over the images of the 2-torsion points",
       {"ramification_profile", "two_torsion_targets", "distinct_preimages"}},
      {"table-check", "compare the computed ramification profile with the table", {"predict_profile"}},
      {"green", "Green's function at points and on a grid", {"green", "green_field"}},
      {"measure", "canonical measure from the Green's function or from preimages", {"measure_from_green", "preimage_sample"}},
      {"density-compare", "preimage histogram against the closed-form Lattes density", {"lattes_density", "compare_l1"}},
      {"periodic", "periodic points and multipliers", {"periodic_points", "poly_roots"}},
      {"julia", "raster of the measure or Green's function", {"julia_raster"}},
      {"catalog", "list catalog maps or describe some", {"catalog", "conj", "derivative"}},
  };
  return table;
}

RationalMap read_map_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open map file " + path);
  Json j;
  try {
    j = Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("map file " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("num") || !j.contains("den"))
    throw UsageError("map file " + path + " needs keys \"num\" and \"den\"");
  int d = 0;
  if (j.contains("field")) {
    const Json& f = j["field"];
    if (!f.is_object() || !f.contains("d") || !f["d"].is_number_integer()) throw UsageError("map file " + path + ": field must be {\"d\": 0|1|3}");
    d = f["d"].get<int>();
    if (d != 0 && d != 1 && d != 3) throw UsageError("map file " + path + ": field tag must be 0, 1 or 3");
  }
  auto read = [&](const char* key) {
    const Json& a = j[key];
    if (!a.is_array() || a.empty()) throw UsageError("map file " + path + ": \"" + key + "\" must be a nonempty array");
    std::vector<QuadNumber> c;
    for (std::size_t k = 0; k < a.size(); ++k) {
      std::string what = path + ": " + key + "[" + std::to_string(k) + "]";
      if (a[k].is_number_integer()) c.push_back(QuadNumber(BigRational(a[k].get<long>()), d));
      else if (a[k].is_string()) c.push_back(parse_coord(a[k].get<std::string>(), d, what));
      else throw UsageError(what + " must be a string or an integer");
    }
    return Poly(c, d);
  };
  Poly num = read("num"), den = read("den");
  try {
    return RationalMap::normalize(num, den);
  } catch (const ArithmeticError& e) {
    throw UsageError("map file " + path + ": " + e.what());
  }
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto it = handlers().find(cfg.subcommand);
  if (it == handlers().end()) {
    err << "error: unknown subcommand '" << cfg.subcommand << "'\n";
    return 2;
  }
  try {
    if (cfg.format != "json" && cfg.format != "csv") throw UsageError("--format must be json or csv");
    if (cfg.format == "csv" && !it->second.second) throw UsageError(cfg.subcommand + " has no tabular output; use --format json");
    Json j = it->second.first(cfg);
    if (cfg.format == "csv") write_table(j[it->second.second], out);
    else out << j.dump(2) << "\n";
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Canonical heights, metrics and measures of rational maps on P^1", "ardyn"};
  app.require_subcommand(1);
  RunConfig cfg;
  for (const Subcommand& s : dispatch_table()) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--catalog", cfg.catalog, "catalog map name(s)")->expected(1, 16);
    sub->add_option("--map", cfg.map_files, "map file(s) in JSON")->expected(1, 16);
    sub->add_option("--point", cfg.points, "point X,Y (exact) or RE,IM (complex); repeatable")->allow_extra_args(false);
    sub->add_option("--depth", cfg.depth, "preimage depth")->check(CLI::NonNegativeNumber);
    sub->add_option("--iters", cfg.iters, "iterations or iteration budget")->check(CLI::PositiveNumber);
    sub->add_option("--tol", cfg.tol, "target error")->check(CLI::PositiveNumber);
    sub->add_option("--window", cfg.window, "x0,x1,y0,y1");
    sub->add_option("--res", cfg.res, "grid resolution")->check(CLI::Range(2, 8192));
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", cfg.out, "output file");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--curve", cfg.curve, "E1 or E2");
    sub->add_option("--lambda", cfg.lambda, "multiplier a,b,d meaning a + b sqrt(-d)");
    sub->add_option("--period", cfg.period, "period n")->check(CLI::PositiveNumber);
    sub->add_option("--method", cfg.method, "measure: green|preimage; julia: measure|green; green: sup|euclidean");
    sub->callback([&cfg, name = s.name] { cfg.subcommand = name; });
  }
  std::vector<std::string> argv_store{"ardyn"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    std::vector<CLI::App*> subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return execute(cfg, out, err);
}

}  // namespace ardyn::cli
