#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "diffspace/cech.hpp"
#include "diffspace/chains.hpp"
#include "diffspace/error.hpp"
#include "diffspace/expr_parser.hpp"
#include "diffspace/fixtures.hpp"
#include "diffspace/flow.hpp"
#include "diffspace/forms.hpp"
#include "diffspace/orbit.hpp"
#include "diffspace/suites.hpp"
#include "runner.hpp"

namespace py = pybind11;
using namespace diffspace;

namespace {

struct Space {
  SpacePtr ptr;
};

SpacePtr builtin_space(const std::string& name) {
  if (name == "plane") return fixtures::plane();
  if (name == "line") return fixtures::line();
  if (name == "bump-variety") return fixtures::bump_variety();
  if (name == "disk-with-axis") return fixtures::disk_with_axis();
  if (name == "circle") return fixtures::circle();
  if (name == "interval") return fixtures::unit_interval();
  if (name == "cone") return fixtures::z2_cone().space;
  throw ValidationError("unknown space '" + name + "'");
}

SmoothMap as_map(const std::vector<std::string>& exprs, int dim) { return parse_map(exprs, dim); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Differential spaces: smooth maps, cubical chains, generator forms, flows and Čech cohomology";

  py::register_exception<Error>(m, "DiffspaceError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<MembershipError>(m, "MembershipError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_ArithmeticError);

  py::class_<SmoothMap>(m, "SmoothMap")
      .def(py::init(&as_map), py::arg("expressions"), py::arg("input_dim"))
      .def_property_readonly("input_dim", &SmoothMap::input_dim)
      .def_property_readonly("output_dim", &SmoothMap::output_dim)
      .def("__call__", [](const SmoothMap& f, const Point& x) { return f.evaluate(x); })
      .def("jacobian", [](const SmoothMap& f, const Point& x) { return f.jet(x).jacobian; })
      .def("__repr__", &SmoothMap::to_string);

  py::class_<Space>(m, "Space")
      .def_property_readonly("name", [](const Space& s) { return s.ptr->name(); })
      .def_property_readonly("ambient_dim", [](const Space& s) { return s.ptr->ambient_dim(); })
      .def("contains", [](const Space& s, const Point& x) { return s.ptr->contains(x); })
      .def("residual", [](const Space& s, const Point& x) { return s.ptr->residual(x); })
      .def("sample", [](const Space& s, std::uint64_t seed, std::size_t count) { return s.ptr->sample(seed, count); },
           py::arg("seed"), py::arg("count"))
      .def("__repr__", [](const Space& s) { return "<Space " + s.ptr->name() + ">"; });
  m.def("space", [](const std::string& name) { return Space{builtin_space(name)}; }, py::arg("name"),
        "Bundled space: plane, line, bump-variety, disk-with-axis, circle, interval or cone");
  m.def("euclidean_space", [](int n, double r) { return Space{euclidean_space(n, r)}; }, py::arg("n"),
        py::arg("sample_radius") = 1.0);

  py::class_<SingularCube>(m, "Cube")
      .def(py::init([](const std::vector<std::pair<double, double>>& box, const std::vector<std::string>& map,
                       const Space& space) {
             return make_cube(Box(box), parse_map(map, static_cast<int>(box.size())), space.ptr);
           }),
           py::arg("box"), py::arg("map"), py::arg("space"))
      .def_property_readonly("dim", &SingularCube::dim)
      .def("__call__", [](const SingularCube& c, const Point& t) { return c(t); });

  py::class_<CubicalChain>(m, "Chain")
      .def(py::init<const SingularCube&, long>(), py::arg("cube"), py::arg("coefficient") = 1)
      .def("__len__", &CubicalChain::size)
      .def_property_readonly("coefficients",
                             [](const CubicalChain& c) {
                               std::vector<long> out;
                               for (const auto& t : c.terms()) out.push_back(t.coefficient);
                               return out;
                             })
      .def("__repr__", &CubicalChain::describe);
  m.def("boundary", py::overload_cast<const CubicalChain&>(&boundary), py::arg("chain"));
  m.def("boundary", py::overload_cast<const SingularCube&>(&boundary), py::arg("cube"));

  py::class_<QuadratureRule>(m, "QuadratureRule")
      .def(py::init<int, int>(), py::arg("order") = 12, py::arg("panels") = 1)
      .def_readwrite("order", &QuadratureRule::order)
      .def_readwrite("panels", &QuadratureRule::panels);

  py::class_<GeneratorForm>(m, "Form")
      .def(py::init([](const Space& space, const std::vector<std::string>& entries, double coefficient) {
             std::vector<SmoothMap> maps;
             for (const auto& e : entries) maps.push_back(parse_map({e}, space.ptr->ambient_dim()));
             return GeneratorForm::lambda(space.ptr, maps, coefficient);
           }),
           py::arg("space"), py::arg("entries"), py::arg("coefficient") = 1.0,
           "λ_p(f₀, …, f_p) from expression strings")
      .def_property_readonly("degree", &GeneratorForm::degree)
      .def("__add__", [](const GeneratorForm& a, const GeneratorForm& b) { return a + b; })
      .def("__sub__", [](const GeneratorForm& a, const GeneratorForm& b) { return a - b; })
      .def("__rmul__", [](const GeneratorForm& a, double c) { return c * a; })
      .def("__mul__", [](const GeneratorForm& a, double c) { return c * a; })
      .def("__repr__", &GeneratorForm::to_string);
  m.def("d", &exterior_derivative, py::arg("form"));
  m.def("wedge", &wedge, py::arg("alpha"), py::arg("beta"));
  m.def("pair", py::overload_cast<const GeneratorForm&, const SingularCube&, const QuadratureRule&>(&pair),
        py::arg("form"), py::arg("cube"), py::arg("rule") = QuadratureRule{});
  m.def("pair", py::overload_cast<const GeneratorForm&, const CubicalChain&, const QuadratureRule&>(&pair),
        py::arg("form"), py::arg("chain"), py::arg("rule") = QuadratureRule{});
  m.def("classical_eval", &classical_eval, py::arg("form"), py::arg("cube"), py::arg("rule") = QuadratureRule{});
  m.def("stokes_residual", &stokes_residual, py::arg("form"), py::arg("cube"), py::arg("rule") = QuadratureRule{});

  py::class_<IntegralCurveResult>(m, "IntegralCurve")
      .def_readonly("times", &IntegralCurveResult::times)
      .def_readonly("points", &IntegralCurveResult::points)
      .def_readonly("residuals", &IntegralCurveResult::residuals)
      .def_property_readonly("domain", [](const IntegralCurveResult& r) {
        return std::make_pair(r.domain_min(), r.domain_max());
      })
      .def_property_readonly("open", &IntegralCurveResult::open_interval)
      .def_property_readonly("exit_reason", [](const IntegralCurveResult& r) { return to_string(r.exit_reason); });
  m.def(
      "integrate_curve",
      [](const std::string& fixture, const Point& start, std::pair<double, double> span) {
        if (fixture == "bump-variety")
          return integrate_curve(fixtures::bump_variety_field(), start, span, fixtures::bump_variety_control());
        if (fixture == "disk-with-axis") return integrate_curve(fixtures::disk_with_axis_field(), start, span);
        throw ValidationError("unknown field fixture '" + fixture + "'");
      },
      py::arg("fixture"), py::arg("start"), py::arg("span"), "Integral curve of a bundled field");
  m.def(
      "integrate_field",
      [](const Space& space, const std::vector<std::string>& field, const std::vector<std::string>& certificate,
         const Point& start, std::pair<double, double> span) {
        const int n = space.ptr->ambient_dim();
        std::vector<SmoothMap> cert;
        for (const auto& c : certificate) cert.push_back(parse_map({c}, n));
        return integrate_curve(VectorFieldModel(space.ptr, parse_map(field, n), cert), start, span);
      },
      py::arg("space"), py::arg("field"), py::arg("certificate"), py::arg("start"), py::arg("span"));

  m.def(
      "cover_cohomology",
      [](const std::string& id) {
        for (const auto& e : bundled_cover_experiments())
          if (e.id == id) return cohomology_dims(build_complex(e.cover, e.max_degree));
        throw ValidationError("unknown cover fixture '" + id + "'");
      },
      py::arg("cover"), "Čech cohomology dimensions of a bundled cover");
  m.def("cover_ids", [] {
    std::vector<std::string> ids;
    for (const auto& e : bundled_cover_experiments()) ids.push_back(e.id);
    return ids;
  });

  m.def(
      "scaling_experiment",
      [](const std::vector<double>& radii, int order) {
        const ScalingTable t = scaling_experiment(radii, QuadratureRule{order, 1});
        py::dict out;
        for (const auto& r : t.rows) {
          if (!out.contains(r.family)) out[py::str(r.family)] = py::list();
          out[py::str(r.family)].cast<py::list>().append(py::make_tuple(r.radius, r.value));
        }
        return out;
      },
      py::arg("radii"), py::arg("quad_order") = 12, "Integrals over circles of radius R, keyed by form family");

  py::class_<SuiteResult>(m, "SuiteResult")
      .def_readonly("id", &SuiteResult::id)
      .def_readonly("cases", &SuiteResult::cases)
      .def_readonly("max_residual", &SuiteResult::max_residual)
      .def_readonly("tolerance", &SuiteResult::tolerance)
      .def_readonly("passed", &SuiteResult::passed);
  m.def("suite_ids", &verify_suite_ids);
  m.def(
      "run_suite",
      [](const std::string& id, std::uint64_t seed, int quad_order, int count) {
        SuiteOptions o;
        o.seed = seed;
        o.quad_order = quad_order;
        if (count > 0) {
          o.d_squared_forms = o.stokes_forms = o.chain_rule_draws = count;
          o.homotopy_forms = o.poincare_forms = o.poincare_cubes = count;
        }
        py::gil_scoped_release release;
        return run_suite(id, o);
      },
      py::arg("id"), py::arg("seed") = 0, py::arg("quad_order") = 12, py::arg("count") = 0,
      "Runs one identity suite; count > 0 overrides every battery size");

  m.def(
      "run_command",
      [](const std::string& command, std::optional<std::string> config, std::optional<std::string> out_dir,
         std::optional<std::uint64_t> seed, std::optional<double> tol) {
        cli::RunOptions o;
        o.config_path = config;
        o.out_dir = out_dir;
        o.seed = seed;
        o.tolerance = tol;
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run_command(command, o, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("command"), py::arg("config") = py::none(), py::arg("out") = py::none(), py::arg("seed") = py::none(),
      py::arg("tol") = py::none(), "Runs a runner subcommand; returns (exit status, report, diagnostics)");
}
