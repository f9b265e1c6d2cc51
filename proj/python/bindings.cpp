// Python bindings for the main operations: models and action charts, Diophantine tests,
// spectrum synthesis, h-chart detection, monodromy and configuration-driven runs.

#include "specmono/averaging.hpp"
#include "specmono/config.hpp"
#include "specmono/detect.hpp"
#include "specmono/diophantine.hpp"
#include "specmono/errors.hpp"
#include "specmono/gl2z.hpp"
#include "specmono/io.hpp"
#include "specmono/models.hpp"
#include "specmono/monodromy.hpp"
#include "specmono/pipeline.hpp"
#include "specmono/synth.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace specmono;

namespace {

// pybind11 holders must be non-const; the library only hands out const objects.
using ModelHolder = std::shared_ptr<ModelSystem>;
using ChartPtr = std::shared_ptr<ActionChart>;

ModelHolder hold(const ModelPtr& m) { return std::const_pointer_cast<ModelSystem>(m); }
ChartPtr hold(ActionChart chart) { return std::make_shared<ActionChart>(std::move(chart)); }

py::dict cloud_dict(const SpectrumCloud& cloud) {
    const auto n = static_cast<py::ssize_t>(cloud.size());
    py::array_t<std::complex<double>> mu(n);
    py::array_t<std::int64_t> k({n, py::ssize_t{2}});
    auto mu_view = mu.mutable_unchecked<1>();
    auto k_view = k.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < n; ++i) {
        const auto& p = cloud.points[static_cast<std::size_t>(i)];
        mu_view(i) = p.mu;
        k_view(i, 0) = p.k_true ? p.k_true->x() : 0;
        k_view(i, 1) = p.k_true ? p.k_true->y() : 0;
    }
    py::dict d;
    d["mu"] = mu;
    d["k"] = k;
    d["tau"] = Vec2(cloud.tau);
    d["epsilon"] = cloud.rectangle.epsilon;
    d["half_width"] = cloud.rectangle.half_width;
    d["half_height"] = cloud.rectangle.half_height;
    return d;
}

SemiclassicalParams make_params(double h, double delta, int noise_order, std::uint64_t seed) {
    SemiclassicalParams p;
    p.h = h;
    p.delta = delta;
    p.noise_order = noise_order;
    p.seed = seed;
    p.validate();
    return p;
}

}  // namespace

PYBIND11_MODULE(_specmono, m) {
    m.doc() = "Synthetic joint spectra, h-chart detection and spectral monodromy";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ModelError>(m, "ModelError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<DetectError>(m, "DetectError", base.ptr());
    py::register_exception<MonodromyError>(m, "MonodromyError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    py::class_<ModelSystem, ModelHolder>(m, "Model")
        .def_property_readonly("name", &ModelSystem::name)
        .def("is_regular", &ModelSystem::is_regular, py::arg("value"))
        .def("distance_to_singular", &ModelSystem::distance_to_singular, py::arg("value"));

    m.def(
        "flat_model",
        [](const Vec2& omega_star, const std::string& q, const Vec2& offset) {
            return hold(make_flat_model(omega_star, q, offset));
        },
        py::arg("omega_star"), py::arg("q") = "xi_weighted", py::arg("action_offset") = Vec2(Vec2::Zero()));
    m.def(
        "champagne_model", [](double b) { return hold(make_champagne_model(b)); }, py::arg("well_depth") = 2.0);

    py::class_<ActionChart, ChartPtr>(m, "ActionChart")
        .def_property_readonly("base", [](const ActionChart& c) { return Vec2(c.base()); })
        .def_property_readonly("base_xi", [](const ActionChart& c) { return Vec2(c.base_xi()); })
        .def_property_readonly("tau", [](const ActionChart& c) { return Vec2(c.tau()); })
        .def_property_readonly("actions", [](const ActionChart& c) { return Vec2(c.actions()); })
        .def_property_readonly("domain",
                               [](const ActionChart& c) { return std::pair{Vec2(c.domain().lo), Vec2(c.domain().hi)}; })
        .def("phi", &ActionChart::phi, py::arg("xi"))
        .def("xi_of", &ActionChart::xi_of, py::arg("value"))
        .def("omega", &ActionChart::omega, py::arg("xi"))
        .def("jacobian", &ActionChart::jacobian, py::arg("xi"));

    m.def(
        "action_coords", [](const ModelHolder& model, const Vec2& c) { return hold(action_coords(model, c)); },
        py::arg("model"), py::arg("value"));
    m.def(
        "action_coords_at",
        [](const ModelHolder& model, const Vec2& xi) { return hold(action_coords_at(model, xi)); },
        py::arg("model"), py::arg("xi"));

    m.def(
        "is_diophantine",
        [](const Vec2& omega, double alpha, double d, std::int64_t k_max) {
            DiophantineParams p;
            p.alpha = alpha;
            p.d = d;
            p.k_max = k_max;
            return is_diophantine(omega, p);
        },
        py::arg("omega"), py::arg("alpha"), py::arg("d") = 1.0, py::arg("k_max") = 10000);
    m.def("diophantine_margin", &diophantine_margin, py::arg("omega"), py::arg("d") = 1.0, py::arg("k_max") = 10000);

    m.def(
        "torus_average", [](const ChartPtr& chart, const Vec2& xi) { return torus_average(*chart, xi); },
        py::arg("chart"), py::arg("xi"));
    m.def(
        "time_average",
        [](const ChartPtr& chart, const Vec2& xi, const Vec2& x0, double T) { return time_average(*chart, xi, x0, T); },
        py::arg("chart"), py::arg("xi"), py::arg("x0"), py::arg("T"));

    m.def(
        "synth_spectrum",
        [](const ChartPtr& chart, const Vec2& a, double h, double delta, int noise_order, std::uint64_t seed, double C0,
           bool higher_terms) {
            const NormalFormSymbol symbol{chart, higher_terms ? default_higher_terms() : std::vector<HigherTerm>{}};
            SynthOptions options;
            options.C0 = C0;
            return cloud_dict(synth_spectrum(symbol, a, make_params(h, delta, noise_order, seed), options));
        },
        py::arg("chart"), py::arg("a"), py::arg("h") = 1e-3, py::arg("delta") = 0.5, py::arg("noise_order") = 3,
        py::arg("seed") = 1, py::arg("C0") = 1.0, py::arg("higher_terms") = true,
        "Eigenvalues in the good rectangle at a: dict with mu (complex array), k (n x 2 labels), tau, epsilon.");

    m.def(
        "fit_hchart",
        [](const ChartPtr& chart, const Vec2& a, double h, double delta, int noise_order, std::uint64_t seed,
           double C0) {
            const NormalFormSymbol symbol{chart, default_higher_terms()};
            SynthOptions options;
            options.C0 = C0;
            SpectrumCloud cloud = synth_spectrum(symbol, a, make_params(h, delta, noise_order, seed), options);
            for (auto& p : cloud.points) p.k_true.reset();
            const HChart hc = fit_hchart(cloud, a);
            py::dict d;
            d["accepted"] = hc.accepted;
            d["labeled_fraction"] = hc.labeled_fraction();
            d["max_residual"] = hc.max_residual;
            d["basis"] = Mat2(hc.basis.matrix());
            d["points"] = hc.cloud_size;
            d["document"] = io::hchart_document(hc);
            return d;
        },
        py::arg("chart"), py::arg("a"), py::arg("h") = 1e-3, py::arg("delta") = 0.5, py::arg("noise_order") = 3,
        py::arg("seed") = 1, py::arg("C0") = 1.0,
        "Synthesizes the rectangle at a and fits an h-chart blind; returns acceptance and residual statistics.");

    m.def(
        "normal_form",
        [](const IMat2& A) {
            const ConjugacyClass c = normal_form(A);
            py::dict d;
            d["kind"] = c.kind;
            d["representative"] = IMat2(c.representative);
            d["trace"] = c.trace;
            d["det"] = c.det;
            d["parabolic_m"] = c.parabolic_m;
            return d;
        },
        py::arg("matrix"));
    m.def("gl2z_conjugate", &gl2z_conjugate, py::arg("A"), py::arg("B"), py::arg("search_bound") = 12);

    m.def(
        "classical_monodromy",
        [](const ModelHolder& model, const Vec2& center, double radius, int n, int windings, double spacing) {
            const auto charts = build_action_atlas(model, loop_covering(*model, Loop::circle(center, radius, n), spacing));
            return IMat2(classical_monodromy(charts, windings).product);
        },
        py::arg("model"), py::arg("center"), py::arg("radius"), py::arg("n") = 16, py::arg("windings") = 1,
        py::arg("spacing") = 0.4, "Classical transition product around a circle in the value plane.");

    m.def(
        "run_config",
        [](const std::string& text, const std::filesystem::path& out_dir) {
            const RunResult r = run_pipeline(parse_config(text), out_dir);
            py::list checks;
            for (const auto& c : r.checks) checks.append(py::make_tuple(c.name, c.pass, c.detail));
            return checks;
        },
        py::arg("config_text"), py::arg("out_dir"),
        "Runs an INI configuration and returns (name, passed, detail) for every check.");
}
