#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ifslab/errors.hpp"
#include "ifslab/experiments.hpp"
#include "ifslab/ifs_core.hpp"
#include "ifslab/random_walks.hpp"
#include "ifslab/report.hpp"
#include "ifslab/skew_products.hpp"
#include "ifslab/stationary_measures.hpp"

namespace py = pybind11;
using namespace ifslab;

namespace {

// Reports cross the boundary as plain dicts (same layout as the JSON output).
py::object to_python(const ExperimentReport& r) {
  return py::module_::import("json").attr("loads")(report_json(r).dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random interval maps: iterated function systems, walks and stationary measures";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());

  py::class_<SystemParams>(m, "SystemParams")
      .def_readonly("M", &SystemParams::M)
      .def_readonly("N", &SystemParams::N)
      .def_readonly("p0", &SystemParams::p0)
      .def_readonly("probs", &SystemParams::probs)
      .def_readonly("breakpoints", &SystemParams::breakpoints)
      .def_readonly("lyap", &SystemParams::lyap)
      .def_property_readonly("regime", [](const SystemParams& s) { return to_string(lyap_regime(s)); })
      .def("__repr__", [](const SystemParams& s) {
        return "SystemParams(M=" + std::to_string(s.M) + ", N=" + std::to_string(s.N) +
               ", p0=" + format_real(s.p0) + ")";
      });

  m.def("make_system", &make_system, py::arg("M"), py::arg("N"), py::arg("p0"));
  m.def("apply_map", &apply_map, py::arg("sys"), py::arg("symbol"), py::arg("x"));
  m.def("sample_word", &sample_word, py::arg("sys"), py::arg("seed"), py::arg("n"));
  m.def(
      "orbit",
      [](const SystemParams& s, const Word& word, const std::vector<double>& starts) {
        py::list out;
        for (const auto& rec : iterate_orbit(s, word, starts))
          out.append(py::dict(py::arg("points") = rec.points, py::arg("log_deriv") = rec.log_deriv));
        return out;
      },
      py::arg("sys"), py::arg("word"), py::arg("starts"));
  m.def(
      "transfer_deviation",
      [](const SystemParams& s, const std::vector<double>& xs) { return transfer_density_check(s, xs); },
      py::arg("sys"), py::arg("xs"));
  m.def(
      "gamma",
      [](const SystemParams& s, double w, double x, double y, bool inverse) {
        const Point3 p = gamma(s, {w, x, y}, inverse ? Direction::inverse : Direction::forward);
        return py::make_tuple(p.w, p.x, p.y);
      },
      py::arg("sys"), py::arg("w"), py::arg("x"), py::arg("y"), py::arg("inverse") = false);

  m.def(
      "mult_dependence",
      [](int M, int N) -> py::object {
        const auto md = mult_dependence(M, N);
        if (!md) return py::none();
        return py::make_tuple(md->kappa, md->k, md->l);
      },
      py::arg("M"), py::arg("N"), "(kappa, k, l) with M = kappa^l and N = kappa^k, or None");
  m.def("nu1", &nu1, py::arg("p0"), py::arg("k"), py::arg("l"));
  m.def(
      "char_roots",
      [](double p0, int k, int l) {
        const auto rc = char_roots(p0, k, l);
        return py::dict(py::arg("roots") = rc.roots, py::arg("inside") = rc.inside,
                        py::arg("on_circle") = rc.on_circle, py::arg("outside") = rc.outside,
                        py::arg("nu1") = rc.nu1);
      },
      py::arg("p0"), py::arg("k"), py::arg("l"));
  m.def(
      "solve_b",
      [](double p0, int k, int l, std::optional<int> H) {
        const auto cs = solve_b(p0, k, l, H);
        return py::dict(py::arg("b") = cs.b, py::arg("regime") = to_string(cs.regime), py::arg("H") = cs.H,
                        py::arg("tail_ratio") = cs.tail_ratio,
                        py::arg("recurrence_residual") = cs.recurrence_residual());
      },
      py::arg("p0"), py::arg("k"), py::arg("l"), py::arg("H") = py::none());
  m.def(
      "delta_mass",
      [](double p0, int k, int l, int kappa, const std::vector<double>& eps) {
        const auto cs = solve_b(p0, k, l);
        std::vector<double> out;
        for (double e : eps) out.push_back(delta_eps_mass(cs, kappa, e));
        return out;
      },
      py::arg("p0"), py::arg("k"), py::arg("l"), py::arg("kappa"), py::arg("eps"));
  m.def("loglog_slope", &loglog_slope, py::arg("eps"), py::arg("mass"));

  m.def(
      "first_passage",
      [](double step_down, double step_up, double p0, double z0, std::optional<double> upper, std::uint64_t seed,
         std::uint64_t cap) {
        const auto r = first_passage(make_walk(step_down, step_up, p0), z0, upper, seed, cap);
        return py::dict(py::arg("time") = r.time, py::arg("side") = to_string(r.side),
                        py::arg("final_position") = r.final_position);
      },
      py::arg("step_down"), py::arg("step_up"), py::arg("p0"), py::arg("z0"), py::arg("upper") = py::none(),
      py::arg("seed") = 1, py::arg("cap") = kDefaultCap);
  m.def(
      "martingale_exponent",
      [](double step_down, double step_up, double p0) {
        return martingale_exponent(make_walk(step_down, step_up, p0));
      },
      py::arg("step_down"), py::arg("step_up"), py::arg("p0"));

  m.def(
      "sync_experiment",
      [](const SystemParams& s, std::uint64_t trials, std::uint64_t n, std::uint64_t seed) {
        return to_python(sync_experiment(s, trials, n, seed));
      },
      py::arg("sys"), py::arg("trials"), py::arg("n"), py::arg("seed") = 1);
  m.def(
      "equidistribution_test",
      [](const SystemParams& s, int bins, std::uint64_t n, std::uint64_t seed) {
        return to_python(equidistribution_test(s, bins, n, seed));
      },
      py::arg("sys"), py::arg("bins"), py::arg("n"), py::arg("seed") = 1);
  m.def(
      "divergence_experiment",
      [](const SystemParams& s, const std::vector<double>& eps, std::uint64_t n, std::uint64_t trials,
         std::uint64_t seed) { return to_python(divergence_experiment(s, eps, n, trials, seed)); },
      py::arg("sys"), py::arg("eps"), py::arg("n"), py::arg("trials"), py::arg("seed") = 1);
}
