#include "specmono/io.hpp"

#include "specmono/errors.hpp"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"

namespace specmono::io {

using nlohmann::ordered_json;

namespace {

ordered_json vec(const Vec2& v) { return ordered_json::array({v.x(), v.y()}); }
ordered_json ivec(const IVec2& v) { return ordered_json::array({v.x(), v.y()}); }

ordered_json imat(const IMat2& m) {
    return ordered_json::array({ordered_json::array({m(0, 0), m(0, 1)}), ordered_json::array({m(1, 0), m(1, 1)})});
}

ordered_json mat(const Mat2& m) {
    return ordered_json::array({ordered_json::array({m(0, 0), m(0, 1)}), ordered_json::array({m(1, 0), m(1, 1)})});
}

ordered_json box(const Box& b) { return {{"lo", vec(b.lo)}, {"hi", vec(b.hi)}}; }

ordered_json conjugacy(const ConjugacyClass& c) {
    return {{"kind", c.kind},
            {"representative", imat(c.representative)},
            {"trace", c.trace},
            {"det", c.det},
            {"parabolic_m", c.parabolic_m},
            {"canonical", c.canonical}};
}

ordered_json monodromy_class(const MonodromyClass& m) {
    ordered_json edges = ordered_json::array();
    for (const auto& e : m.edges)
        edges.push_back({{"i", e.i},
                         {"j", e.j},
                         {"M", imat(e.M)},
                         {"pre_round", mat(e.pre_round)},
                         {"rounding_error", e.rounding_error}});
    return {{"loop", m.loop},
            {"edges", std::move(edges)},
            {"product", imat(m.product)},
            {"normal_form", conjugacy(m.normal_form)}};
}

// ordered_json::dump prints the shortest text that reads back to the same double.
std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string spectrum_tsv(const SpectrumCloud& cloud, bool with_labels) {
    std::string out = fmt::format("# h\t{}\n# epsilon\t{}\n# rectangle_center\t{}\t{}\n",
                                  format_double(cloud.params.h), format_double(cloud.params.epsilon()),
                                  format_double(cloud.rectangle.center.real()),
                                  format_double(cloud.rectangle.center.imag()));
    out += with_labels ? "re_mu\tim_mu\tk1\tk2\n" : "re_mu\tim_mu\n";
    for (const auto& p : cloud.points) {
        out += format_double(p.mu.real()) + "\t" + format_double(p.mu.imag());
        if (with_labels) {
            if (p.k_true)
                out += fmt::format("\t{}\t{}", p.k_true->x(), p.k_true->y());
            else
                out += "\t\t";
        }
        out += "\n";
    }
    return out;
}

std::vector<SpectralPoint> read_spectrum_tsv(std::istream& in) {
    std::vector<SpectralPoint> points;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("re_mu", 0) == 0) continue;
        }
        std::istringstream row(line);
        SpectralPoint p;
        double re = 0.0, im = 0.0;
        if (!(row >> re >> im))
            throw Error(fmt::format("spectrum table line {}: expected two numbers", line_no));
        p.mu = {re, im};
        std::int64_t k1 = 0, k2 = 0;
        if (row >> k1) {
            if (!(row >> k2)) throw Error(fmt::format("spectrum table line {}: incomplete label", line_no));
            p.k_true = IVec2{k1, k2};
        }
        points.push_back(p);
    }
    return points;
}

std::string chart_document(const ActionChart& chart) {
    ordered_json grid = ordered_json::array();
    for (const auto& node : chart.grid()) grid.push_back({{"xi", vec(node.xi)}, {"phi", vec(node.value)}});
    ordered_json doc = {{"model", chart.model().name()},
                        {"c", vec(chart.base())},
                        {"xi_c", vec(chart.base_xi())},
                        {"S", vec(chart.actions())},
                        {"eta", ivec(chart.eta())},
                        {"tau", vec(chart.tau())},
                        {"domain", box(chart.domain())},
                        {"grid", std::move(grid)}};
    return dump(doc);
}

std::string good_values_tsv(const GoodValueSet& set) {
    std::string out = "E\tG\txi1\txi2\tdiophantine\tdq_nonzero\tomega_prime\tregular\tgood\n";
    for (const auto& n : set.nodes)
        out += fmt::format("{}\t{}\t{}\t{}\t{:d}\t{:d}\t{:d}\t{:d}\t{:d}\n", format_double(n.value.x()),
                           format_double(n.value.y()), format_double(n.xi.x()), format_double(n.xi.y()),
                           n.diophantine_ok, n.dq_ok, n.omega_prime_ok, n.singular_ok, n.good);
    return out;
}

std::string average_report_tsv(const AverageReport& report) {
    std::string out = fmt::format("# xi\t{}\t{}\n# torus_average\t{}\n# q_infinity\t{}\t{}\n",
                                  format_double(report.xi.x()), format_double(report.xi.y()),
                                  format_double(report.torus_avg), format_double(report.q_infinity.lo),
                                  format_double(report.q_infinity.hi));
    out += "T\ttime_average\tabs_error\n";
    for (const auto& [T, avg] : report.time_avgs)
        out += fmt::format("{}\t{}\t{}\n", format_double(T), format_double(avg),
                           format_double(std::abs(avg - report.torus_avg)));
    return out;
}

std::string hchart_document(const HChart& chart) {
    ordered_json labels = ordered_json::array();
    for (std::size_t n = 0; n < chart.labels.size(); ++n)
        labels.push_back({{"point", chart.point_index[n]},
                          {"u", vec(chart.u[n])},
                          {"k", ivec(chart.labels[n])},
                          {"residual", chart.residuals[n]}});
    const auto& C = chart.fit.coefficients();
    ordered_json coeffs = ordered_json::array();
    for (Eigen::Index r = 0; r < C.rows(); ++r) coeffs.push_back({C(r, 0), C(r, 1)});
    double mean = 0.0;
    for (double r : chart.residuals) mean += r;
    if (!chart.residuals.empty()) mean /= static_cast<double>(chart.residuals.size());
    ordered_json doc = {
        {"h", chart.h},
        {"epsilon", chart.epsilon},
        {"rectangle", {{"center", {chart.rectangle.center.real(), chart.rectangle.center.imag()}},
                       {"half_width", chart.rectangle.half_width},
                       {"half_height", chart.rectangle.half_height}}},
        {"basis", {{"b1", vec(chart.basis.b1)}, {"b2", vec(chart.basis.b2)}}},
        {"anchor", chart.anchor},
        {"fit", {{"degree", chart.fit.degree()}, {"uses_hint", chart.fit.uses_hint()}, {"coefficients", coeffs}}},
        {"residuals", {{"max", chart.max_residual}, {"mean", mean}, {"unit", "h"}}},
        {"cloud_size", chart.cloud_size},
        {"labeled_fraction", chart.labeled_fraction()},
        {"accepted", chart.accepted},
        {"labels", std::move(labels)}};
    return dump(doc);
}

std::string monodromy_document(const MonodromyReport& report) {
    ordered_json vertices = ordered_json::array();
    for (const auto& v : report.loop.vertices) vertices.push_back(vec(v));
    ordered_json centers = ordered_json::array();
    for (const auto& c : report.centers) centers.push_back(vec(c));
    ordered_json violations = ordered_json::array();
    for (const auto& v : report.cocycle.violations)
        violations.push_back({{"i", v.i}, {"j", v.j}, {"k", v.k}, {"what", v.what}});
    ordered_json doc = {
        {"model", report.model},
        {"loop", {{"vertices", std::move(vertices)}, {"windings", report.loop.windings}}},
        {"centers", std::move(centers)},
        {"spectral", monodromy_class(report.spectral)},
        {"classical", monodromy_class(report.classical)},
        {"cocycle", {{"pairs", report.cocycle.pairs},
                     {"triples", report.cocycle.triples},
                     {"violations", std::move(violations)}}},
        {"conjugate", report.conjugate}};
    return dump(doc);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
    out << text;
    if (!out) throw Error(fmt::format("failed writing {}", path.string()));
}

}  // namespace specmono::io
