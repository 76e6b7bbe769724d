#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "diffspace/error.hpp"
#include "diffspace/expr_parser.hpp"
#include "diffspace/fixtures.hpp"
#include "diffspace/suites.hpp"

namespace diffspace::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// Problems in the configuration itself (exit status 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sci(double v) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---- config --------------------------------------------------------------

struct Settings {
  std::uint64_t seed = 0;
  int quad_order = 12;
  std::optional<double> tolerance;
  int workers = 1;
  fs::path out_dir = "out";
};

class Config {
 public:
  Config(json root, const RunOptions& opts) : root_(std::move(root)) {
    settings_.seed = root_.value("seed", std::uint64_t{0});
    settings_.quad_order = root_.value("quad_order", 12);
    settings_.workers = root_.value("workers", 1);
    settings_.out_dir = root_.value("out", std::string("out"));
    if (opts.seed) settings_.seed = *opts.seed;
    if (opts.quad_order) settings_.quad_order = *opts.quad_order;
    if (opts.tolerance) settings_.tolerance = *opts.tolerance;
    if (opts.workers) settings_.workers = *opts.workers;
    if (opts.out_dir) settings_.out_dir = *opts.out_dir;
    if (settings_.quad_order < 1) throw ConfigError("quad_order must be positive");
    if (settings_.workers < 1) throw ConfigError("workers must be positive");
    if (settings_.tolerance && !(*settings_.tolerance >= 0.0)) throw ConfigError("tolerance must be nonnegative");
    load_spaces();
  }

  const Settings& settings() const { return settings_; }
  const json& section(const std::string& name) const {
    static const json empty = json::object();
    const auto it = root_.find(name);
    return it == root_.end() ? empty : *it;
  }

  SpacePtr space(const std::string& id, const std::string& context) const {
    const auto it = spaces_.find(id);
    if (it == spaces_.end()) throw ConfigError(context + ": unknown space '" + id + "'");
    return it->second;
  }

  OrbitSpaceModel cone() const {
    if (!cone_) cone_ = fixtures::z2_cone();
    return *cone_;
  }

 private:
  void load_spaces();

  json root_;
  Settings settings_;
  std::map<std::string, SpacePtr> spaces_;
  mutable std::optional<OrbitSpaceModel> cone_;
};

template <typename T>
T get(const json& j, const std::string& key, const std::string& context) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(context + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(context + "." + key + ": wrong type");
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& context) {
  if (!j.contains(key)) return fallback;
  return get<T>(j, key, context);
}

SmoothMap parse_maps(const std::vector<std::string>& exprs, int dim, const std::string& context,
                     const std::vector<std::string>& aliases = {}) {
  try {
    return parse_map(exprs, dim, aliases);
  } catch (const ParseError& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

SmoothMap parse_scalar(const std::string& expr, int dim, const std::string& context) {
  return parse_maps({expr}, dim, context);
}

Constraint::Kind constraint_kind(const std::string& k, const std::string& context) {
  if (k == "eq") return Constraint::Kind::kEqualZero;
  if (k == "gt") return Constraint::Kind::kPositive;
  if (k == "ge") return Constraint::Kind::kNonNegative;
  throw ConfigError(context + ": constraint kind must be eq, gt or ge, not '" + k + "'");
}

Membership parse_membership(const json& clauses, int dim, const std::string& context) {
  Membership m;
  if (!clauses.is_array()) throw ConfigError(context + ": clauses must be a list of lists");
  for (std::size_t c = 0; c < clauses.size(); ++c) {
    const std::string cc = context + "[" + std::to_string(c) + "]";
    if (!clauses[c].is_array()) throw ConfigError(cc + ": clause must be a list");
    std::vector<Constraint> clause;
    for (std::size_t k = 0; k < clauses[c].size(); ++k) {
      const std::string ck = cc + "[" + std::to_string(k) + "]";
      const json& item = clauses[c][k];
      clause.push_back({constraint_kind(get<std::string>(item, "kind", ck), ck),
                        parse_scalar(get<std::string>(item, "expr", ck), dim, ck + ".expr")});
    }
    m.clauses.push_back(std::move(clause));
  }
  return m;
}

void Config::load_spaces() {
  spaces_ = {{"bump-variety", fixtures::bump_variety()},
             {"circle", fixtures::circle()},
             {"disk-with-axis", fixtures::disk_with_axis()},
             {"interval", fixtures::unit_interval()},
             {"line", fixtures::line()},
             {"plane", fixtures::plane()},
             {"R3", euclidean_space(3, 1.0)}};
  const json& defs = section("spaces");
  if (!defs.is_object()) throw ConfigError("spaces: must be an object keyed by space id");
  for (const auto& [id, def] : defs.items()) {
    const std::string ctx = "spaces." + id;
    if (spaces_.count(id) || id == "cone") throw ConfigError(ctx + ": id collides with a bundled space");
    const int dim = get<int>(def, "dim", ctx);
    if (dim < 1) throw ConfigError(ctx + ".dim: must be positive");
    Membership m = parse_membership(def.value("clauses", json::array()), dim, ctx + ".clauses");
    m.tolerance = get_or<double>(def, "tolerance", 1e-8, ctx);
    SamplerSpec spec;
    const json& sampler = def.value("sampler", json::object());
    const json& params = sampler.value("parametrizations", json::array());
    for (std::size_t i = 0; i < params.size(); ++i) {
      const std::string pc = ctx + ".sampler.parametrizations[" + std::to_string(i) + "]";
      const auto range = get<std::vector<std::pair<double, double>>>(params[i], "range", pc);
      spec.parametrizations.push_back(
          parse_maps(get<std::vector<std::string>>(params[i], "map", pc), static_cast<int>(range.size()), pc + ".map"));
      spec.ranges.push_back(range);
    }
    spec.fixed_points = get_or<std::vector<Point>>(sampler, "fixed_points", {}, ctx + ".sampler");
    if (spec.parametrizations.empty() && spec.fixed_points.empty())
      throw ConfigError(ctx + ".sampler: needs parametrizations or fixed points");
    std::vector<SmoothMap> gens;
    if (def.contains("generators")) {
      for (const auto& g : get<std::vector<std::string>>(def, "generators", ctx))
        gens.push_back(parse_scalar(g, dim, ctx + ".generators"));
    } else {
      for (int i = 0; i < dim; ++i) gens.push_back(SmoothMap::coordinate(dim, i));
    }
    try {
      spaces_[id] = make_space(id, dim, std::move(m), make_sampler(std::move(spec)), std::move(gens));
    } catch (const Error& e) {
      throw ConfigError(ctx + ": " + e.what());
    }
  }
}

json load_json(const std::optional<std::string>& path) {
  if (!path) return json::object();
  std::ifstream in(*path);
  if (!in) throw ConfigError("cannot open config file '" + *path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ConfigError(*path + ": top level must be an object");
    return j;
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(*path + ": JSON syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(col));
  }
}

// ---- report plumbing -------------------------------------------------------

struct Section {
  std::string name;
  bool passed = true;
  json record = json::object();
  std::string text;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

void write_report(const fs::path& dir, const std::string& stem, const std::string& command, const Settings& s,
                  const std::vector<Section>& sections, std::ostream& console) {
  json record{{"command", command}, {"seed", s.seed}, {"quad_order", s.quad_order}};
  bool passed = true;
  std::string text = "diffspace " + command + " (seed " + std::to_string(s.seed) + ", quadrature order " +
                     std::to_string(s.quad_order) + ")\n";
  json secs = json::object();
  for (const auto& sec : sections) {
    passed = passed && sec.passed;
    secs[sec.name] = sec.record;
    secs[sec.name]["status"] = sec.passed ? "pass" : "fail";
    text += "\n" + sec.text;
  }
  record["sections"] = secs;
  record["status"] = passed ? "pass" : "fail";
  text += "\nstatus: " + std::string(passed ? "PASS" : "FAIL") + "\n";
  write_file(dir / (stem + ".json"), record.dump(2) + "\n");
  write_file(dir / (stem + ".txt"), text);
  console << text;
}

std::string pad(std::string s, std::size_t w) {
  s.append(s.size() < w ? w - s.size() : 1, ' ');
  return s;
}

// ---- verify ----------------------------------------------------------------

struct NamedForm {
  std::string id;
  GeneratorForm form;
};

struct NamedCube {
  std::string id;
  SingularCube cube;
};

Section run_verify(const Config& cfg, const fs::path& dir) {
  const json& v = cfg.section("verify");
  const Settings& s = cfg.settings();
  SuiteOptions o;
  o.seed = s.seed;
  o.quad_order = s.quad_order;
  o.tolerance = s.tolerance;
  o.workers = s.workers;
  const json& counts = v.value("counts", json::object());
  o.d_squared_forms = get_or<int>(counts, "d_squared_forms", o.d_squared_forms, "verify.counts");
  o.stokes_forms = get_or<int>(counts, "stokes_forms", o.stokes_forms, "verify.counts");
  o.chain_rule_draws = get_or<int>(counts, "chain_rule_draws", o.chain_rule_draws, "verify.counts");
  o.homotopy_forms = get_or<int>(counts, "homotopy_forms", o.homotopy_forms, "verify.counts");
  o.poincare_forms = get_or<int>(counts, "poincare_forms", o.poincare_forms, "verify.counts");
  o.poincare_cubes = get_or<int>(counts, "poincare_cubes", o.poincare_cubes, "verify.counts");
  const std::vector<std::string> ids = get_or<std::vector<std::string>>(v, "suites", verify_suite_ids(), "verify");
  for (const auto& id : ids) {
    try {
      default_tolerance(id);
    } catch (const ValidationError&) {
      throw ConfigError("verify.suites: unknown suite '" + id + "'");
    }
  }
  o.tolerances = get_or<std::map<std::string, double>>(v, "tolerances", {}, "verify");
  for (const auto& [id, tol] : o.tolerances) {
    if (std::find(ids.begin(), ids.end(), id) == ids.end() && id != "pairings")
      throw ConfigError("verify.tolerances: unknown suite '" + id + "'");
    if (!(tol >= 0.0)) throw ConfigError("verify.tolerances." + id + ": must be nonnegative");
  }

  // Config-supplied forms and cubes.
  std::vector<NamedForm> forms;
  std::vector<NamedCube> cubes;
  const json& fdefs = v.value("forms", json::array());
  for (std::size_t i = 0; i < fdefs.size(); ++i) {
    const std::string ctx = "verify.forms[" + std::to_string(i) + "]";
    const std::string id = get<std::string>(fdefs[i], "id", ctx);
    const SpacePtr sp = cfg.space(get<std::string>(fdefs[i], "space", ctx), ctx);
    std::vector<FormTerm> terms;
    int degree = -1;
    const json& tdefs = get<json>(fdefs[i], "terms", ctx);
    for (std::size_t k = 0; k < tdefs.size(); ++k) {
      const std::string tc = ctx + ".terms[" + std::to_string(k) + "]";
      const auto entries = get<std::vector<std::string>>(tdefs[k], "entries", tc);
      if (entries.empty()) throw ConfigError(tc + ".entries: empty tuple");
      if (degree >= 0 && degree != static_cast<int>(entries.size()) - 1)
        throw ConfigError(tc + ": all terms of a form need the same tuple length");
      degree = static_cast<int>(entries.size()) - 1;
      FormTerm t{get_or<double>(tdefs[k], "coefficient", 1.0, tc), {}};
      for (std::size_t e = 0; e < entries.size(); ++e)
        t.entries.push_back(parse_scalar(entries[e], sp->ambient_dim(), tc + ".entries[" + std::to_string(e) + "]"));
      terms.push_back(std::move(t));
    }
    if (degree < 0) throw ConfigError(ctx + ".terms: a form needs at least one term");
    forms.push_back({id, GeneratorForm(sp, degree, std::move(terms))});
  }
  const json& cdefs = v.value("cubes", json::array());
  for (std::size_t i = 0; i < cdefs.size(); ++i) {
    const std::string ctx = "verify.cubes[" + std::to_string(i) + "]";
    const std::string id = get<std::string>(cdefs[i], "id", ctx);
    const SpacePtr sp = cfg.space(get<std::string>(cdefs[i], "space", ctx), ctx);
    const auto box = get<std::vector<std::pair<double, double>>>(cdefs[i], "box", ctx);
    const auto map = get<std::vector<std::string>>(cdefs[i], "map", ctx);
    try {
      cubes.push_back({id, make_cube(Box(box), parse_maps(map, static_cast<int>(box.size()), ctx + ".map"), sp)});
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(ctx + ": " + e.what());
    }
  }
  std::sort(forms.begin(), forms.end(), [](const NamedForm& a, const NamedForm& b) { return a.id < b.id; });
  std::sort(cubes.begin(), cubes.end(), [](const NamedCube& a, const NamedCube& b) { return a.id < b.id; });

  const std::vector<SuiteResult> results = run_suites(ids, o);

  Section sec;
  sec.name = "verify";
  std::string csv = "suite,cases,max_residual,tolerance,status\n";
  sec.text = "identity suites\n  " + pad("suite", 20) + pad("cases", 8) + pad("max residual", 14) +
             pad("tolerance", 12) + "status\n";
  json suites = json::array();
  for (const auto& r : results) {
    sec.passed = sec.passed && r.passed;
    csv += r.id + "," + std::to_string(r.cases) + "," + num(r.max_residual) + "," + num(r.tolerance) + "," +
           (r.passed ? "pass" : "fail") + "\n";
    sec.text += "  " + pad(r.id, 20) + pad(std::to_string(r.cases), 8) + pad(sci(r.max_residual), 14) +
                pad(sci(r.tolerance), 12) + (r.passed ? "pass" : "FAIL") + "\n";
    suites.push_back({{"id", r.id},
                      {"cases", r.cases},
                      {"max_residual", r.max_residual},
                      {"tolerance", r.tolerance},
                      {"passed", r.passed},
                      {"note", r.note}});
  }
  write_file(dir / "verify.csv", csv);
  sec.record["suites"] = suites;

  if (!forms.empty() && !cubes.empty()) {
    double tol = 1e-8;
    if (const auto t = o.tolerances.find("pairings"); t != o.tolerances.end()) tol = t->second;
    if (s.tolerance) tol = *s.tolerance;
    const QuadratureRule rule{s.quad_order, 1};
    std::string pcsv = "form,cube,kind,value,order,panels,residual,class\n";
    json rows = json::array();
    sec.text += "\nconfig pairings (stokes tolerance " + sci(tol) + ")\n";
    for (const auto& f : forms)
      for (const auto& c : cubes) {
        if (c.cube.space != f.form.space()) continue;
        std::string kind, cls;
        PairingResult pr;
        double residual = std::numeric_limits<double>::quiet_NaN();
        if (c.cube.dim() == f.form.degree()) {
          kind = "pairing";
          pr = pair_adaptive(f.form, c.cube, rule);
          cls = pr.converged ? "converged" : "unconverged";
          if (!pr.converged) sec.passed = false;
        } else if (c.cube.dim() == f.form.degree() + 1) {
          kind = "stokes";
          pr = pair_adaptive(exterior_derivative(f.form), c.cube, rule);
          residual = stokes_residual(f.form, c.cube, rule);
          cls = residual <= tol ? "pass" : "fail";
          if (residual > tol) sec.passed = false;
        } else {
          continue;
        }
        pcsv += f.id + "," + c.id + "," + kind + "," + num(pr.value) + "," + std::to_string(pr.order) + "," +
                std::to_string(pr.panels) + "," + (std::isnan(residual) ? "" : num(residual)) + "," + cls + "\n";
        sec.text += "  " + pad(f.id, 12) + pad(c.id, 12) + pad(kind, 9) + pad(sci(pr.value), 12) +
                    pad("order " + std::to_string(pr.order), 10) + pad(sci(residual), 12) + cls + "\n";
        rows.push_back({{"form", f.id},
                        {"cube", c.id},
                        {"kind", kind},
                        {"value", pr.value},
                        {"order", pr.order},
                        {"panels", pr.panels},
                        {"residual", number_or_null(residual)},
                        {"class", cls}});
      }
    write_file(dir / "pairings.csv", pcsv);
    sec.record["pairings"] = rows;
  }
  return sec;
}

// ---- orbit-demo -------------------------------------------------------------

Rational parse_rational(const json& j, const std::string& context) {
  try {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) {
      const std::string s = j.get<std::string>();
      const auto slash = s.find('/');
      if (slash == std::string::npos) return Rational(std::stoll(s));
      const long long d = std::stoll(s.substr(slash + 1));
      if (d == 0) throw ConfigError(context + ": zero denominator");
      return Rational(std::stoll(s.substr(0, slash)), d);
    }
  } catch (const std::logic_error&) {
  }
  throw ConfigError(context + ": matrix entries must be integers or \"p/q\" strings");
}

struct ActionDef {
  SpacePtr upstairs;
  FiniteGroupAction group;
  HilbertMap hilbert;
};

ActionDef parse_action(const Config& cfg, const json& def) {
  if (def.is_string()) {
    if (def.get<std::string>() != "z2") throw ConfigError("orbit_demo.action: unknown action '" + def.get<std::string>() + "'");
    return {fixtures::plane(), fixtures::z2_action(), fixtures::z2_hilbert()};
  }
  const std::string ctx = "orbit_demo.action";
  const SpacePtr up = cfg.space(get<std::string>(def, "upstairs", ctx), ctx);
  const int n = up->ambient_dim();
  std::vector<RationalMatrix> gens;
  const json& gdefs = get<json>(def, "generators", ctx);
  for (std::size_t g = 0; g < gdefs.size(); ++g) {
    const std::string gc = ctx + ".generators[" + std::to_string(g) + "]";
    if (!gdefs[g].is_array() || static_cast<int>(gdefs[g].size()) != n)
      throw ConfigError(gc + ": expected " + std::to_string(n) + " rows");
    std::vector<Rational> entries;
    for (const auto& row : gdefs[g]) {
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        throw ConfigError(gc + ": expected " + std::to_string(n) + " columns");
      for (const auto& e : row) entries.push_back(parse_rational(e, gc));
    }
    gens.emplace_back(n, std::move(entries));
  }
  HilbertMap h;
  const auto comps = get<std::vector<std::string>>(def, "hilbert", ctx);
  h.components = parse_maps(comps, n, ctx + ".hilbert");
  const int k = h.components.output_dim();
  for (const auto& r : get_or<std::vector<std::string>>(def, "relations", {}, ctx))
    h.relations.push_back(parse_scalar(r, k, ctx + ".relations"));
  for (const auto& r : get_or<std::vector<std::string>>(def, "inequalities", {}, ctx))
    h.inequalities.push_back(parse_scalar(r, k, ctx + ".inequalities"));
  try {
    return {up, FiniteGroupAction::generated_by(std::move(gens)), std::move(h)};
  } catch (const Error& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
}

Section run_orbit_demo(const Config& cfg, const fs::path& dir) {
  const json& d = cfg.section("orbit_demo");
  const Settings& s = cfg.settings();
  const auto radii = get_or<std::vector<double>>(d, "radii", {0.5, 1.0, 2.0, 4.0}, "orbit_demo");
  if (radii.empty()) throw ConfigError("orbit_demo.radii: needs at least one radius");
  for (double r : radii)
    if (!(r > 0.0)) throw ConfigError("orbit_demo.radii: radius " + num(r) + " gives a degenerate cube");
  const json& th = d.value("thresholds", json::object());
  double rel = get_or<double>(th, "relative", 1e-8, "orbit_demo.thresholds");
  double vanish = get_or<double>(th, "vanishing", 1e-9, "orbit_demo.thresholds");
  const auto omega_slope = get_or<std::pair<double, double>>(th, "omega_slope", {2.0, 0.02}, "orbit_demo.thresholds");
  const auto x2_slope = get_or<std::pair<double, double>>(th, "x2_dxy_slope", {4.0, 0.05}, "orbit_demo.thresholds");
  double push_tol = get_or<double>(th, "pushforward", 1e-6, "orbit_demo.thresholds");
  if (s.tolerance) rel = vanish = push_tol = *s.tolerance;
  const auto samples = get_or<std::size_t>(d, "samples", 1000, "orbit_demo");
  const ActionDef action = parse_action(cfg, d.value("action", json("z2")));
  OrbitSpaceModel model;
  try {
    model = orbit_pushforward(action.upstairs, action.group, action.hilbert, s.seed);
  } catch (const Error& e) {
    throw ConfigError(std::string("orbit_demo.action: ") + e.what());
  }

  const ScalingTable table = scaling_experiment(radii, QuadratureRule{s.quad_order, 1});
  std::map<std::string, SlopeFit> fits;
  for (const auto& f : table.fits) fits[f.family] = f;
  auto expected = [](const std::string& family, double r) -> std::optional<double> {
    if (family == "omega") return 2.0 * std::numbers::pi * r * r;
    if (family == "x2_dxy") return 0.5 * std::numbers::pi * std::pow(r, 4);
    if (family == "y2_dxy") return -0.5 * std::numbers::pi * std::pow(r, 4);
    return std::nullopt;
  };

  Section sec;
  sec.name = "orbit-demo";
  std::string csv = "form,R,value,slope,r2\n";
  json rows = json::array();
  sec.text = "scaling over circles of radius R\n  " + pad("form", 10) + pad("R", 8) + pad("value", 24) +
             pad("expected", 24) + "check\n";
  for (const auto& row : table.rows) {
    const auto fit = fits.find(row.family);
    csv += row.family + "," + num(row.radius) + "," + num(row.value) + "," +
           (fit != fits.end() ? num(fit->second.slope) : "") + "," + (fit != fits.end() ? num(fit->second.r2) : "") +
           "\n";
    bool ok = row.converged;
    std::string exp_text = "0";
    if (row.vanishing) {
      ok = ok && std::abs(row.value) < vanish;
    } else if (const auto e = expected(row.family, row.radius)) {
      ok = ok && std::abs(row.value - *e) <= rel * std::abs(*e);
      exp_text = num(*e);
    }
    sec.passed = sec.passed && ok;
    sec.text += "  " + pad(row.family, 10) + pad(num(row.radius), 8) + pad(num(row.value), 24) + pad(exp_text, 24) +
                (ok ? "pass" : "FAIL") + "\n";
    rows.push_back({{"form", row.family},
                    {"R", row.radius},
                    {"value", row.value},
                    {"vanishing", row.vanishing},
                    {"order", row.order},
                    {"panels", row.panels},
                    {"passed", ok}});
  }
  write_file(dir / "scaling.csv", csv);
  sec.record["rows"] = rows;

  json jfits = json::array();
  if (table.fits.empty()) {
    sec.text += "\nslope fit skipped (single radius)\n";
  } else {
    sec.text += "\nlog-log slope fits\n";
    for (const auto& f : table.fits) {
      std::optional<std::pair<double, double>> target;
      if (f.family == "omega") target = omega_slope;
      if (f.family == "x2_dxy" || f.family == "y2_dxy") target = x2_slope;
      const bool ok = !target || std::abs(f.slope - target->first) <= target->second;
      sec.passed = sec.passed && ok;
      sec.text += "  " + pad(f.family, 10) + "slope " + pad(num(f.slope), 24) + "r2 " + pad(num(f.r2), 24) +
                  (ok ? "pass" : "FAIL") + "\n";
      jfits.push_back({{"form", f.family}, {"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"passed", ok}});
    }
  }
  sec.record["fits"] = jfits;

  const OrbitExactChecks exact = orbit_exact_checks(action.group, action.hilbert, s.seed, samples);
  const bool exact_ok = exact.invariance == 0 && exact.relation == 0;
  sec.passed = sec.passed && exact_ok;
  sec.text += "\nexact checks on " + std::to_string(exact.samples) + " rational points: invariance " +
              exact.invariance.str() + ", relation " + exact.relation.str() + (exact_ok ? "  pass" : "  FAIL") + "\n";
  sec.record["exact"] = {{"samples", exact.samples},
                         {"invariance", exact.invariance.str()},
                         {"relation", exact.relation.str()},
                         {"passed", exact_ok}};
  sec.record["orbit_space"] = model.space->name();

  if (d.value("action", json("z2")) == json("z2")) {
    const EulerPushforward push = euler_pushforward(s.seed);
    const bool ok = push.residual < push_tol && push.scaling_residual < push_tol;
    sec.passed = sec.passed && ok;
    sec.text += "Euler field pushforward over t in [-1, 1]: residual " + sci(push.residual) + ", e^{2t} scaling " +
                sci(push.scaling_residual) + (ok ? "  pass" : "  FAIL") + "\n";
    sec.record["pushforward"] = {
        {"residual", push.residual}, {"scaling_residual", push.scaling_residual}, {"passed", ok}};
  }
  return sec;
}

// ---- flow ---------------------------------------------------------------------

StepControl parse_control(const json& j, StepControl c, const std::string& ctx) {
  c.rtol = get_or<double>(j, "rtol", c.rtol, ctx);
  c.atol = get_or<double>(j, "atol", c.atol, ctx);
  c.initial_step = get_or<double>(j, "initial_step", c.initial_step, ctx);
  c.min_step = get_or<double>(j, "min_step", c.min_step, ctx);
  c.max_step = get_or<double>(j, "max_step", c.max_step, ctx);
  c.state_cap = get_or<double>(j, "state_cap", c.state_cap, ctx);
  c.event_tolerance = get_or<double>(j, "event_tolerance", c.event_tolerance, ctx);
  c.max_steps = get_or<std::size_t>(j, "max_steps", c.max_steps, ctx);
  c.fixed_step = get_or<double>(j, "fixed_step", c.fixed_step, ctx);
  if (!(c.rtol > 0) || !(c.atol > 0) || !(c.min_step > 0) || !(c.max_step >= c.min_step) || !(c.initial_step > 0))
    throw ConfigError(ctx + ": step controls must be positive with max_step >= min_step");
  return c;
}

VectorFieldModel parse_field(const Config& cfg, const json& def, const std::string& ctx) {
  const SpacePtr sp = cfg.space(get<std::string>(def, "space", ctx), ctx);
  const int n = sp->ambient_dim();
  const SmoothMap field = parse_maps(get<std::vector<std::string>>(def, "field", ctx), n, ctx + ".field");
  if (field.output_dim() != n) throw ConfigError(ctx + ".field: needs one component per ambient coordinate");
  std::vector<SmoothMap> cert;
  for (const auto& c : get_or<std::vector<std::string>>(def, "certificate", {}, ctx))
    cert.push_back(parse_scalar(c, n, ctx + ".certificate"));
  std::vector<PointValue> pvs;
  const json& pdefs = def.value("point_values", json::array());
  for (std::size_t i = 0; i < pdefs.size(); ++i) {
    const std::string pc = ctx + ".point_values[" + std::to_string(i) + "]";
    pvs.push_back({get<Point>(pdefs[i], "point", pc), get<Point>(pdefs[i], "value", pc),
                   get_or<double>(pdefs[i], "radius", 1e-14, pc)});
  }
  try {
    return VectorFieldModel(sp, field, cert, pvs);
  } catch (const Error& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
}

std::optional<ExitReason> parse_reason(const json& def, const std::string& ctx) {
  if (!def.contains("expect")) return std::nullopt;
  const std::string r = get<std::string>(def, "expect", ctx);
  for (ExitReason e : {ExitReason::kMaxTime, ExitReason::kLeftSpace, ExitReason::kBlowUp, ExitReason::kCollapsedToPoint})
    if (to_string(e) == r) return e;
  throw ConfigError(ctx + ".expect: unknown exit reason '" + r + "'");
}

std::string point_text(const Point& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + num(x[i]);
  return s + ")";
}

Section run_flow(const Config& cfg, const fs::path& dir) {
  const json& f = cfg.section("flow");
  const Settings& s = cfg.settings();
  std::vector<FlowExperiment> flows;
  std::vector<ProbeExperiment> probes;
  const auto bundled_flows = bundled_flow_experiments();
  const auto bundled_probes = bundled_probe_experiments(s.seed);
  const json default_flows = json::array({"bump-variety", "bump-variety-origin"});
  const json& fdefs = f.value("experiments", default_flows);
  for (std::size_t i = 0; i < fdefs.size(); ++i) {
    const std::string ctx = "flow.experiments[" + std::to_string(i) + "]";
    if (fdefs[i].is_string()) {
      const std::string id = fdefs[i].get<std::string>();
      const auto it = std::find_if(bundled_flows.begin(), bundled_flows.end(),
                                   [&](const FlowExperiment& e) { return e.id == id; });
      if (it == bundled_flows.end()) throw ConfigError(ctx + ": unknown flow fixture '" + id + "'");
      flows.push_back(*it);
      continue;
    }
    const json& def = fdefs[i];
    VectorFieldModel field = parse_field(cfg, def, ctx);
    const Point start = get<Point>(def, "start", ctx);
    if (static_cast<int>(start.size()) != field.space()->ambient_dim()) throw ConfigError(ctx + ".start: wrong dimension");
    if (!field.space()->contains(start)) throw ConfigError(ctx + ".start: point is not in " + field.space()->name());
    const auto span = get_or<std::pair<double, double>>(def, "span", {-1.0, 1.0}, ctx);
    if (!(span.first <= 0.0 && span.second >= 0.0)) throw ConfigError(ctx + ".span: must contain 0");
    FlowExperiment e{get<std::string>(def, "id", ctx), field, start, span,
                     parse_control(def.value("control", json::object()), StepControl{}, ctx + ".control"),
                     std::nullopt, parse_reason(def, ctx)};
    if (def.contains("closed_form")) {
      e.closed_form = parse_maps(get<std::vector<std::string>>(def, "closed_form", ctx), 1, ctx + ".closed_form", {"t"});
      if (e.closed_form->output_dim() != field.space()->ambient_dim())
        throw ConfigError(ctx + ".closed_form: wrong dimension");
    }
    e.closed_form_tol = get_or<double>(def, "closed_form_tol", e.closed_form_tol, ctx);
    e.residual_tol = get_or<double>(def, "residual_tol", e.residual_tol, ctx);
    flows.push_back(std::move(e));
  }
  const json default_probes = json::array({"disk-with-axis"});
  const json& pdefs = f.value("probes", default_probes);
  for (std::size_t i = 0; i < pdefs.size(); ++i) {
    const std::string ctx = "flow.probes[" + std::to_string(i) + "]";
    if (pdefs[i].is_string()) {
      const std::string id = pdefs[i].get<std::string>();
      const auto it = std::find_if(bundled_probes.begin(), bundled_probes.end(),
                                   [&](const ProbeExperiment& e) { return e.id == id; });
      if (it == bundled_probes.end()) throw ConfigError(ctx + ": unknown probe fixture '" + id + "'");
      probes.push_back(*it);
      continue;
    }
    const json& def = pdefs[i];
    ProbeOptions po;
    po.seed = s.seed;
    po.workers = s.workers;
    po.span_cap = get_or<double>(def, "span_cap", po.span_cap, ctx);
    po.samples_per_radius = get_or<std::size_t>(def, "samples", po.samples_per_radius, ctx);
    po.control = parse_control(def.value("control", json::object()), po.control, ctx + ".control");
    ProbeExperiment e{get<std::string>(def, "id", ctx), parse_field(cfg, def, ctx), get<Point>(def, "center", ctx),
                      get<std::vector<double>>(def, "radii", ctx), po};
    for (double r : e.radii)
      if (!(r > 0.0)) throw ConfigError(ctx + ".radii: radii must be positive");
    e.final_threshold = get_or<double>(def, "threshold", e.final_threshold, ctx);
    probes.push_back(std::move(e));
  }
  if (s.tolerance)
    for (auto& e : flows) e.closed_form_tol = e.residual_tol = *s.tolerance;
  std::sort(flows.begin(), flows.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::sort(probes.begin(), probes.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  Section sec;
  sec.name = "flow";
  std::string summary = "id,start,domain_min,domain_max,open,exit_reason,max_residual,closed_form_error,status\n";
  json jflows = json::array();
  sec.text = "integral curves\n";
  for (const auto& e : flows) {
    const FlowOutcome o = run_flow_experiment(e);
    sec.passed = sec.passed && o.passed;
    const std::size_t n = e.start.size();
    std::string traj = "t";
    for (std::size_t k = 0; k < n; ++k) traj += ",x" + std::to_string(k + 1);
    traj += ",residual\n";
    for (std::size_t i = 0; i < o.curve.times.size(); ++i) {
      traj += num(o.curve.times[i]);
      for (std::size_t k = 0; k < n; ++k) traj += "," + num(o.curve.points[i][k]);
      traj += "," + num(o.curve.residuals[i]) + "\n";
    }
    write_file(dir / ("flow_" + e.id + ".csv"), traj);
    const std::string reason = to_string(o.curve.exit_reason);
    std::string start_text = point_text(e.start);
    summary += e.id + ",\"" + start_text + "\"," + num(o.curve.domain_min()) + "," + num(o.curve.domain_max()) + "," +
               (o.curve.open_interval() ? "true" : "false") + "," + reason + "," + num(o.max_residual) + "," +
               num(o.closed_form_error) + "," + (o.passed ? "pass" : "fail") + "\n";
    sec.text += "  " + pad(e.id, 22) + "domain [" + num(o.curve.domain_min()) + ", " + num(o.curve.domain_max()) +
                "]  " + reason;
    if (o.curve.collapsed()) sec.text += " at " + start_text;
    sec.text += "  residual " + sci(o.max_residual);
    if (e.closed_form) sec.text += "  closed-form error " + sci(o.closed_form_error);
    sec.text += o.passed ? "  pass\n" : "  FAIL\n";
    jflows.push_back({{"id", e.id},
                      {"start", e.start},
                      {"domain", {o.curve.domain_min(), o.curve.domain_max()}},
                      {"open", o.curve.open_interval()},
                      {"exit_reason", reason},
                      {"backward", {{"reach", o.curve.backward.reach}, {"reason", to_string(o.curve.backward.reason)}}},
                      {"forward", {{"reach", o.curve.forward.reach}, {"reason", to_string(o.curve.forward.reason)}}},
                      {"points", o.curve.times.size()},
                      {"max_residual", o.max_residual},
                      {"closed_form_error", number_or_null(o.closed_form_error)},
                      {"passed", o.passed}});
  }
  write_file(dir / "flow.csv", summary);
  sec.record["curves"] = jflows;

  json jprobes = json::array();
  if (!probes.empty()) sec.text += "\nuniform-domain probes\n";
  for (const auto& e : probes) {
    const ProbeOutcome o = run_probe_experiment(e);
    sec.passed = sec.passed && o.passed;
    std::string csv = "radius,min_domain_length,samples,open_domains\n";
    json rows = json::array();
    for (const auto& r : o.rows) {
      csv += num(r.radius) + "," + num(r.min_domain_length) + "," + std::to_string(r.samples) + "," +
             std::to_string(r.open_domains) + "\n";
      sec.text += "  " + pad(e.id, 22) + "radius " + pad(sci(r.radius), 12) + "min domain " +
                  pad(sci(r.min_domain_length), 12) + std::to_string(r.open_domains) + "/" +
                  std::to_string(r.samples) + " open\n";
      rows.push_back({{"radius", r.radius},
                      {"min_domain_length", r.min_domain_length},
                      {"samples", r.samples},
                      {"open_domains", r.open_domains}});
    }
    write_file(dir / ("probe_" + e.id + ".csv"), csv);
    sec.text += "  " + pad(e.id, 22) + std::string(o.monotone ? "monotone" : "not monotone") +
                (o.all_open ? ", all domains open" : ", some domains closed") + (o.passed ? "  pass\n" : "  FAIL\n");
    jprobes.push_back({{"id", e.id}, {"rows", rows}, {"monotone", o.monotone}, {"all_open", o.all_open}, {"passed", o.passed}});
  }
  sec.record["probes"] = jprobes;
  return sec;
}

// ---- cohomology -------------------------------------------------------------

Cover parse_cover(const Config& cfg, const json& def, const std::string& ctx) {
  Cover c;
  c.space = cfg.space(get<std::string>(def, "space", ctx), ctx);
  const int n = c.space->ambient_dim();
  const json& regions = get<json>(def, "regions", ctx);
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string rc = ctx + ".regions[" + std::to_string(i) + "]";
    c.regions.push_back({get_or<std::string>(regions[i], "name", "U" + std::to_string(i), rc),
                         parse_membership(regions[i].value("clauses", json::array()), n, rc + ".clauses")});
  }
  c.nonempty = get_or<std::vector<std::vector<int>>>(def, "nonempty", {}, ctx);
  c.connectivity_scale = get_or<double>(def, "connectivity_scale", c.connectivity_scale, ctx);
  return c;
}

Section run_cohomology(const Config& cfg, const fs::path& dir) {
  const json& h = cfg.section("cohomology");
  const Settings& s = cfg.settings();
  std::vector<CoverExperiment> covers;
  const auto bundled = bundled_cover_experiments();
  const json& cdefs = h.value("covers", json::array({"circle-3", "cone", "interval-2", "plane"}));
  for (std::size_t i = 0; i < cdefs.size(); ++i) {
    const std::string ctx = "cohomology.covers[" + std::to_string(i) + "]";
    if (cdefs[i].is_string()) {
      const std::string id = cdefs[i].get<std::string>();
      const auto it = std::find_if(bundled.begin(), bundled.end(), [&](const CoverExperiment& e) { return e.id == id; });
      if (it == bundled.end()) throw ConfigError(ctx + ": unknown cover fixture '" + id + "'");
      covers.push_back(*it);
      continue;
    }
    CoverExperiment e{get<std::string>(cdefs[i], "id", ctx), parse_cover(cfg, cdefs[i], ctx),
                      get_or<int>(cdefs[i], "max_degree", 1, ctx), std::nullopt};
    if (e.max_degree < 0) throw ConfigError(ctx + ".max_degree: must be nonnegative");
    if (cdefs[i].contains("expect")) e.expected = get<std::vector<int>>(cdefs[i], "expect", ctx);
    covers.push_back(std::move(e));
  }
  std::sort(covers.begin(), covers.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  const auto derham = get_or<std::vector<std::string>>(h, "derham", fixtures::derham_fixture_names(), "cohomology");
  const auto known = fixtures::derham_fixture_names();
  for (const auto& name : derham)
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw ConfigError("cohomology.derham: unknown fixture '" + name + "'");

  Section sec;
  sec.name = "cohomology";
  std::string csv = "cover,degree,dim\n";
  json jcovers = json::array();
  sec.text = "Čech cohomology of nerves\n";
  for (const auto& e : covers) {
    CoverOutcome o;
    try {
      o = run_cover_experiment(e, s.seed);
    } catch (const ValidationError& err) {
      throw ConfigError("cover '" + e.id + "': " + err.what());
    }
    sec.passed = sec.passed && o.passed;
    std::string dims;
    for (std::size_t q = 0; q < o.dims.size(); ++q) {
      csv += e.id + "," + std::to_string(q) + "," + std::to_string(o.dims[q]) + "\n";
      dims += (q ? "," : "") + std::to_string(o.dims[q]);
    }
    sec.text += "  " + pad(e.id, 16) + "dims (" + dims + ")  delta^2 = 0: " + (o.delta_squared_zero ? "yes" : "NO");
    if (e.expected) sec.text += o.passed ? "  pass" : "  FAIL";
    sec.text += "\n";
    json rec{{"id", e.id}, {"dims", o.dims}, {"delta_squared_zero", o.delta_squared_zero}, {"passed", o.passed}};
    if (e.expected) rec["expected"] = *e.expected;
    jcovers.push_back(rec);
  }
  write_file(dir / "cohomology.csv", csv);
  sec.record["covers"] = jcovers;

  std::string dcsv = "fixture,dims,closed_forms,exact_checked,max_exactness_residual,period,consistent\n";
  json jd = json::array();
  std::vector<std::string> names = derham;
  std::sort(names.begin(), names.end());
  if (!names.empty()) sec.text += "\nde Rham spot checks\n";
  for (const auto& name : names) {
    const DeRhamReport r = de_rham_spotcheck(fixtures::derham_fixture(name, s.seed), 1e-9, s.tolerance.value_or(1e-7),
                                             QuadratureRule{s.quad_order, 1});
    sec.passed = sec.passed && r.consistent;
    std::string dims;
    for (std::size_t q = 0; q < r.dims.size(); ++q) dims += (q ? " " : "") + std::to_string(r.dims[q]);
    const double period = r.period.value_or(std::numeric_limits<double>::quiet_NaN());
    dcsv += name + "," + dims + "," + std::to_string(r.closed_forms) + "," + std::to_string(r.exact_checked) + "," +
            num(r.max_exactness_residual) + "," + (r.period ? num(period) : "") + "," +
            (r.consistent ? "true" : "false") + "\n";
    sec.text += "  " + pad(name, 10) + "closed " + std::to_string(r.closed_forms) + ", exact " +
                std::to_string(r.exact_checked) + ", residual " + sci(r.max_exactness_residual);
    if (r.period) sec.text += ", period " + num(period);
    sec.text += r.consistent ? "  consistent\n" : "  INCONSISTENT " + r.note + "\n";
    jd.push_back({{"fixture", name},
                  {"dims", r.dims},
                  {"closed_forms", r.closed_forms},
                  {"exact_checked", r.exact_checked},
                  {"max_exactness_residual", r.max_exactness_residual},
                  {"period", number_or_null(period)},
                  {"consistent", r.consistent},
                  {"note", r.note}});
  }
  write_file(dir / "derham.csv", dcsv);
  sec.record["derham"] = jd;
  return sec;
}

}  // namespace

int run_command(const std::string& command, const RunOptions& options, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> commands{"cohomology", "flow", "orbit-demo", "report", "verify"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    err << "error: unknown command '" << command << "'\n";
    return kExitConfigError;
  }
  try {
    const Config cfg(load_json(options.config_path), options);
    const fs::path dir = cfg.settings().out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());

    std::vector<Section> sections;
    if (command == "verify" || command == "report") sections.push_back(run_verify(cfg, dir));
    if (command == "orbit-demo" || command == "report") sections.push_back(run_orbit_demo(cfg, dir));
    if (command == "flow" || command == "report") sections.push_back(run_flow(cfg, dir));
    if (command == "cohomology" || command == "report") sections.push_back(run_cohomology(cfg, dir));
    std::sort(sections.begin(), sections.end(), [](const Section& a, const Section& b) { return a.name < b.name; });
    write_report(dir, command, command, cfg.settings(), sections, out);
    const bool passed = std::all_of(sections.begin(), sections.end(), [](const Section& s) { return s.passed; });
    return passed ? kExitPass : kExitNumericFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const EvalError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumericFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace diffspace::cli
