#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "invflow/demos.hpp"
#include "invflow/dini.hpp"
#include "invflow/io.hpp"
#include "invflow/tangency.hpp"

namespace py = pybind11;
using namespace invflow;
using convex::ConvexSet;

namespace {

io::LoadedScenario load(const std::string& text, std::optional<std::string> mode, std::optional<std::uint64_t> seed) {
    std::optional<io::Mode> m;
    if (mode) m = io::parse_mode(*mode);
    return io::load_scenario(io::json::parse(text), m, seed);
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Invariant-region workbench for reaction-diffusion systems";

    auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(mod, "ParseError", base.ptr());
    py::register_exception<InvalidSet>(mod, "InvalidSet", base.ptr());
    py::register_exception<InvalidScenario>(mod, "InvalidScenario", base.ptr());
    py::register_exception<InvalidArgument>(mod, "InvalidArgument", base.ptr());
    py::register_exception<PreconditionViolated>(mod, "PreconditionViolated", base.ptr());
    py::register_exception<HorizonExceeded>(mod, "HorizonExceeded", base.ptr());
    py::register_exception<InteriorPoint>(mod, "InteriorPoint", base.ptr());
    py::register_exception<InsideSet>(mod, "InsideSet", base.ptr());
    py::register_exception<NotOnSet>(mod, "NotOnSet", base.ptr());
    py::register_exception<EvalFailure>(mod, "EvalFailure", base.ptr());
    py::register_exception<ObliqueViolation>(mod, "ObliqueViolation", base.ptr());
    py::register_exception<Instability>(mod, "Instability", base.ptr());

    py::class_<convex::Projection>(mod, "Projection")
        .def_readonly("omega", &convex::Projection::omega)
        .def_readonly("dist", &convex::Projection::dist)
        .def_readonly("lambda_", &convex::Projection::lambda);

    py::class_<ConvexSet>(mod, "ConvexSet")
        .def_static("box", &ConvexSet::box, py::arg("lo"), py::arg("hi"))
        .def_static("ball", &ConvexSet::ball, py::arg("center"), py::arg("radius"))
        .def_static("polytope", &ConvexSet::polytope, py::arg("normals"), py::arg("offsets"))
        .def_static("from_json", [](const std::string& s) { return io::parse_set(io::json::parse(s)); })
        .def("to_json", [](const ConvexSet& w) { return io::to_json(w).dump(); })
        .def_property_readonly("dim", &ConvexSet::dim)
        .def("project", [](const ConvexSet& w, const Vector& v) { return w.project(v); }, py::arg("v"))
        .def("distance", [](const ConvexSet& w, const Vector& v) { return w.distance(v); }, py::arg("v"))
        .def("contains", [](const ConvexSet& w, const Vector& v, double tol) { return w.contains(v, tol); },
             py::arg("v"), py::arg("tol") = convex::kMembershipTol)
        .def("normal_cone",
             [](const ConvexSet& w, const Vector& omega) { return w.normal_cone(omega).generators; },
             py::arg("omega"));

    py::class_<dini::LemmaPoint>(mod, "LemmaPoint")
        .def_readonly("found", &dini::LemmaPoint::found)
        .def_readonly("t", &dini::LemmaPoint::t)
        .def_readonly("theta", &dini::LemmaPoint::theta)
        .def_readonly("derivative", &dini::LemmaPoint::derivative)
        .def_readonly("best_excess", &dini::LemmaPoint::best_excess)
        .def_readonly("grid_points", &dini::LemmaPoint::grid_points);

    mod.def("geometric_steps", &dini::geometric_steps, py::arg("T"), py::arg("hi_fraction") = 1e-2,
            py::arg("lo_fraction") = 1e-7, py::arg("ratio") = 0.5);
    mod.def(
        "dini_upper",
        [](std::function<double(double)> f, double T, double t, std::optional<std::vector<double>> steps) {
            const dini::SampledFunction theta{std::move(f), T};
            return steps ? dini::dini_upper(theta, t, *steps) : dini::dini_upper(theta, t);
        },
        py::arg("theta"), py::arg("T"), py::arg("t"), py::arg("steps") = py::none());
    mod.def(
        "find_lemma_point",
        [](std::function<double(double)> f, double T, double C, std::size_t t_grid) {
            return dini::find_lemma_point(dini::SampledFunction{std::move(f), T}, C, t_grid);
        },
        py::arg("theta"), py::arg("T"), py::arg("C"), py::arg("t_grid") = dini::kDefaultTimeGrid);

    mod.def(
        "check_tangency",
        [](const std::string& scenario, std::optional<std::string> mode, std::optional<std::uint64_t> seed) {
            return io::to_json(io::check_scenario_tangency(load(scenario, mode, seed))).dump();
        },
        py::arg("scenario"), py::arg("mode") = py::none(), py::arg("seed") = py::none());
    mod.def(
        "run",
        [](const std::string& scenario, std::optional<std::string> mode, std::optional<std::uint64_t> seed,
           std::size_t cadence, std::optional<double> exit_threshold) {
            const auto sc = load(scenario, mode, seed);
            SolveOptions o;
            o.cadence = cadence;
            o.exit_threshold = exit_threshold;
            o.keep_trajectory = false;
            SolveResult r;
            {
                py::gil_scoped_release nogil;
                r = io::run_scenario(sc, o);
            }
            return io::to_json(r).dump();
        },
        py::arg("scenario"), py::arg("mode") = py::none(), py::arg("seed") = py::none(), py::arg("cadence") = 0,
        py::arg("exit_threshold") = py::none());

    mod.def("demo_names", &demos::names);
    mod.def("demo_scenario", [](const std::string& name) -> std::optional<std::string> {
        const auto j = demos::scenario(name);
        return j ? std::optional<std::string>(j->dump()) : std::nullopt;
    });
    mod.def("run_demo", [](const std::string& name) {
        std::ostringstream out;
        const int code = demos::run(name, out);
        return py::make_tuple(code, out.str());
    });
    mod.def("gauge_covariance_check", [] {
        const auto g = demos::gauge_covariance_check();
        return py::make_tuple(g.max_difference, g.passed);
    });
}
