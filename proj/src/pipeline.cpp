#include "specmono/pipeline.hpp"

#include "specmono/averaging.hpp"
#include "specmono/errors.hpp"
#include "specmono/io.hpp"
#include "specmono/monodromy.hpp"
#include "specmono/plot.hpp"

#include <fmt/format.h>

#include <cmath>
#include <memory>
#include <random>

namespace specmono {

bool RunResult::ok() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::vector<Vec2> pick_good_values(const ActionChart& chart, const DiophantineParams& diophantine,
                                   const SemiclassicalParams& params, double C0, int count, GoodValueSet* set) {
    if (count < 1) throw DomainError("at least one good value must be requested");
    const double half = good_rectangle(chart.base(), params, C0).half_width;
    const Box region = chart.domain().inflate(-1.001 * half);
    if (region.empty())
        throw DomainError(fmt::format("chart domain of radius {:.4g} cannot hold a rectangle of half width {:.4g}",
                                      chart.radius(), half));
    const int n = std::max(6, static_cast<int>(std::ceil(std::sqrt(3.0 * count))));
    GoodValueSet grid_set = good_values(chart, diophantine, GridSpec{region, n, n, true});
    std::vector<Vec2> good;
    for (const auto& node : grid_set.nodes)
        if (node.good) good.push_back(node.value);
    if (set) *set = std::move(grid_set);
    if (static_cast<int>(good.size()) < count)
        throw DomainError(fmt::format("only {} good values found, {} requested", good.size(), count));
    std::vector<Vec2> picked;
    for (int i = 0; i < count; ++i)
        picked.push_back(good[static_cast<std::size_t>(i) * good.size() / static_cast<std::size_t>(count)]);
    return picked;
}

std::size_t brute_force_count(const NormalFormSymbol& symbol, const Vec2& a, const SemiclassicalParams& params,
                              double C0) {
    const ActionChart& chart = *symbol.chart;
    const GoodRectangle rect = good_rectangle(a, params, C0);
    const Box window = rect.value_box();
    const double h = params.h, eps = params.epsilon();
    // Preimage bracket from a dense grid over the window widened by twice the higher-term
    // bound, then by four lattice steps.
    const Vec2 shift = 2.0 * higher_term_bound(symbol, window, eps, h) + Vec2::Constant(2.0 * h);
    const Box reach{window.lo - shift, window.hi + shift};
    Box xi_box{Vec2::Constant(INFINITY), Vec2::Constant(-INFINITY)};
    constexpr int kGrid = 24;
    for (int i = 0; i <= kGrid; ++i)
        for (int j = 0; j <= kGrid; ++j) {
            const Vec2 v = reach.lo + Vec2{reach.size().x() * i / kGrid, reach.size().y() * j / kGrid};
            const Vec2 xi = chart.xi_of(v);
            xi_box.lo = xi_box.lo.cwiseMin(xi);
            xi_box.hi = xi_box.hi.cwiseMax(xi);
        }
    xi_box = xi_box.inflate(4.0 * h);
    const Vec2 eta4 = chart.eta().cast<double>() / 4.0;
    const Vec2 k_lo = ((xi_box.lo + chart.tau()) / h + eta4).array().floor();
    const Vec2 k_hi = ((xi_box.hi + chart.tau()) / h + eta4).array().ceil();
    const double noise = std::pow(h, params.noise_order);
    std::size_t count = 0;
    for (auto k1 = static_cast<std::int64_t>(k_lo.x()); k1 <= static_cast<std::int64_t>(k_hi.x()); ++k1)
        for (auto k2 = static_cast<std::int64_t>(k_lo.y()); k2 <= static_cast<std::int64_t>(k_hi.y()); ++k2) {
            const IVec2 k{k1, k2};
            const Vec2 xi = h * (k.cast<double>() - eta4) - chart.tau();
            if (!chart.local().in_domain(xi)) continue;
            const Vec2 value = chart.phi(xi);
            const Complex mu = Complex{value.x(), eps * value.y()} + symbol.higher_part(value, eps, h) +
                               synth_noise(params.seed, k, noise);
            if (rect.contains(mu)) ++count;
        }
    return count;
}

namespace {

struct Stage {
    const RunConfig& config;
    std::filesystem::path out;
    RunResult& result;
    ModelPtr model;

    void check(std::string name, bool pass, std::string detail) {
        result.checks.push_back({std::move(name), pass, std::move(detail)});
    }

    void write(const std::string& name, const std::string& text) {
        io::write_text(out / name, text);
        result.files.push_back(out / name);
    }
};

struct Rectangle {
    Vec2 a;
    SpectrumCloud cloud;
};

std::vector<Rectangle> synth_stage(Stage& s, const std::shared_ptr<const ActionChart>& chart) {
    const RunConfig& c = s.config;
    GoodValueSet set;
    const auto values = pick_good_values(*chart, c.diophantine, c.semiclassical, c.C0, c.rectangles, &set);
    s.write("chart.json", io::chart_document(*chart));
    s.write("good_values.tsv", io::good_values_tsv(set));

    const NormalFormSymbol symbol{chart, c.higher};
    SynthOptions options;
    options.C0 = c.C0;
    options.jobs = c.jobs;
    std::vector<Rectangle> out;
    std::size_t count_mismatch = 0, outside_band = 0, total = 0;
    for (std::size_t r = 0; r < values.size(); ++r) {
        Rectangle rect{values[r], synth_spectrum(symbol, values[r], c.semiclassical, options)};
        const std::string tag = fmt::format("{:02d}", r);
        s.write("spectrum_" + tag + ".tsv", io::spectrum_tsv(rect.cloud));
        s.write("spectrum_" + tag + ".svg", plot::spectrum_svg(rect.cloud));
        if (brute_force_count(symbol, rect.a, c.semiclassical, c.C0) != rect.cloud.size()) ++count_mismatch;
        const Interval band = spectral_band(*chart, rect.a.x(), rect.cloud.rectangle.half_width, c.semiclassical);
        for (const auto& p : rect.cloud.points) outside_band += band.contains(p.mu.imag()) ? 0 : 1;
        total += rect.cloud.size();
        out.push_back(std::move(rect));
    }
    s.check("synth.lattice_count", count_mismatch == 0,
            fmt::format("{} of {} rectangles match the brute-force lattice count", values.size() - count_mismatch,
                        values.size()));
    s.check("synth.band", outside_band == 0,
            fmt::format("{} of {} eigenvalues inside the epsilon-scaled band", total - outside_band, total));
    return out;
}

void detect_stage(Stage& s, const std::vector<Rectangle>& rects) {
    std::size_t accepted = 0, aligned = 0;
    double worst = 0.0, worst_fraction = 1.0;
    for (std::size_t r = 0; r < rects.size(); ++r) {
        const std::string tag = fmt::format("{:02d}", r);
        // Blind detection: the labels of the cloud are not used by the fit.
        SpectrumCloud blind = rects[r].cloud;
        for (auto& p : blind.points) p.k_true.reset();
        try {
            HChart chart = fit_hchart(blind, rects[r].a);
            accepted += chart.accepted ? 1 : 0;
            worst = std::max(worst, chart.max_residual);
            worst_fraction = std::min(worst_fraction, chart.labeled_fraction());
            try {
                align_to_truth(chart, rects[r].cloud);
                ++aligned;
            } catch (const DetectError&) {
            }
            s.write("hchart_" + tag + ".json", io::hchart_document(chart));
            s.write("spectrum_" + tag + "_chart.svg", plot::spectrum_svg(rects[r].cloud, &chart));
            s.write("residuals_" + tag + ".svg",
                    plot::residual_histogram_svg(chart.residuals, DetectOptions{}.max_residual));
        } catch (const DetectError& e) {
            s.write("hchart_" + tag + ".error", std::string(e.what()) + "\n");
            worst_fraction = 0.0;
        }
    }
    s.check("detect.accepted", accepted == rects.size(),
            fmt::format("{} of {} charts accepted; max residual {:.3g} h, min labelled fraction {:.4f}", accepted,
                        rects.size(), worst, worst_fraction));
    s.check("detect.labels_match_synthesis", aligned == rects.size(),
            fmt::format("{} of {} labelings equal the synthesis labels up to an integer gauge", aligned,
                        rects.size()));
}

void averaging_stage(Stage& s, const ActionChart& chart) {
    const std::vector<double> T_list{1e2, 1e3, 1e4};
    const Vec2 x0 = torus_sample(1).front();
    const AverageReport report = average_report(chart, chart.base_xi(), x0, T_list);
    s.write("averages.tsv", io::average_report_tsv(report));
    const double C = ergodic_constant(chart.model().q_symbol(), chart.omega(chart.base_xi()), chart.base_xi(), x0,
                                      T_list.front());
    bool within = true;
    for (const auto& [T, avg] : report.time_avgs) within = within && std::abs(avg - report.torus_avg) * T <= 2.0 * C + 1e-9;
    s.check("averaging.rate", within, fmt::format("|<q>_T - <q>| <= 2 C / T with C = {:.4g}", C));
}

void inversion_stage(Stage& s, const ActionChart& chart) {
    std::mt19937_64 rng(s.config.semiclassical.seed);
    std::uniform_real_distribution<double> ux(chart.domain().lo.x(), chart.domain().hi.x());
    std::uniform_real_distribution<double> uy(chart.domain().lo.y(), chart.domain().hi.y());
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
        const Vec2 v{ux(rng), uy(rng)};
        worst = std::max(worst, (chart.phi(chart.xi_of(v)) - v).norm());
    }
    s.check("models.inversion", worst <= 1e-10, fmt::format("max |phi(phi^-1(v)) - v| = {:.3g}", worst));
}

void monodromy_stage(Stage& s) {
    const RunConfig& c = s.config;
    const LoopConfig& lc = *c.loop;
    AtlasOptions options;
    options.params = c.semiclassical;
    options.diophantine = c.diophantine;
    options.C0 = lc.C0;
    options.higher = c.higher;
    options.jobs = c.jobs;

    io::MonodromyReport report;
    report.model = s.model->name();
    report.loop = lc.loop;
    report.centers = loop_covering(*s.model, lc.loop, lc.spacing, atlas_max_step(options));
    s.write("loop.svg", plot::loop_svg(*s.model, lc.loop, report.centers));
    const auto action = build_action_atlas(s.model, report.centers, c.jobs);
    report.classical = classical_monodromy(action, lc.loop.windings);
    const PseudoChartAtlas atlas = build_spectral_atlas(s.model, report.centers, action, options);
    report.spectral = loop_monodromy(atlas, cyclic_indices(atlas.size()), lc.loop.windings);
    report.cocycle = cocycle_check(atlas, compute_transitions(atlas, c.jobs));
    report.conjugate = compare_monodromies(report.spectral, report.classical);
    s.write("monodromy.json", io::monodromy_document(report));

    double worst = 0.0;
    for (const auto& e : report.spectral.edges) worst = std::max(worst, e.rounding_error);
    s.check("monodromy.cocycle", report.cocycle.ok(),
            fmt::format("{} pairs, {} triples, {} violations", report.cocycle.pairs, report.cocycle.triples,
                        report.cocycle.violations.size()));
    s.check("monodromy.conjugate", report.conjugate,
            fmt::format("spectral {} ({}), classical {} ({}); {} charts, max rounding error {:.3g}",
                        to_string(report.spectral.product), report.spectral.normal_form.kind,
                        to_string(report.classical.product), report.classical.normal_form.kind, atlas.size(), worst));
}

std::string checks_tsv(const RunResult& result) {
    std::string out = "check\tresult\tdetail\n";
    for (const auto& c : result.checks) out += fmt::format("{}\t{}\t{}\n", c.name, c.pass ? "PASS" : "FAIL", c.detail);
    return out;
}

}  // namespace

RunResult run_pipeline(const RunConfig& config, const std::filesystem::path& out_dir) {
    RunResult result;
    Stage s{config, out_dir, result, make_model(config.model)};
    const std::string& mode = config.mode;
    const bool all = mode == "verify-all";
    try {
        if (mode == "synth" || mode == "detect" || all) {
            const auto chart = std::make_shared<const ActionChart>(action_coords(s.model, config.model.center));
            const auto rects = synth_stage(s, chart);
            if (mode == "detect" || all) detect_stage(s, rects);
            if (all) {
                averaging_stage(s, *chart);
                inversion_stage(s, *chart);
            }
        }
        if (mode == "monodromy" || (all && config.loop)) monodromy_stage(s);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        s.check("pipeline", false, e.what());
    }
    io::write_text(out_dir / "checks.tsv", checks_tsv(result));
    result.files.push_back(out_dir / "checks.tsv");
    return result;
}

}  // namespace specmono
