#include "doctest.h"
#include "support.hpp"

#include "specmono/errors.hpp"
#include "specmono/io.hpp"
#include "specmono/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

using namespace specmono;

namespace {

const double kGolden = 0.5 * (1.0 + std::sqrt(5.0));

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

struct Fixture {
    std::shared_ptr<const ActionChart> chart;
    SpectrumCloud cloud;
    HChart hchart;
};

const Fixture& fixture() {
    static const Fixture f = [] {
        Fixture out;
        out.chart = std::make_shared<const ActionChart>(
            action_coords_at(make_flat_model({3.0, 3.0 * kGolden}, "xi_weighted"), Vec2::Zero()));
        SemiclassicalParams p;
        p.h = 2e-3;
        out.cloud = synth_spectrum({out.chart, default_higher_terms()}, Vec2::Zero(), p, {2.0});
        out.hchart = fit_hchart(out.cloud, Vec2::Zero());
        return out;
    }();
    return f;
}

}  // namespace

TEST_CASE("format_double: shortest round trip (property)") {
    testing::Gen gen(12);
    for (int i = 0; i < 500; ++i) {
        const double x = gen.uniform(-1, 1) * std::pow(10.0, gen.integer(-20, 20));
        CHECK(std::stod(io::format_double(x)) == x);
    }
    CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("spectrum table: round trip at full precision") {
    const SpectrumCloud& cloud = fixture().cloud;
    for (bool labels : {true, false}) {
        std::istringstream in(io::spectrum_tsv(cloud, labels));
        const auto back = io::read_spectrum_tsv(in);
        REQUIRE(back.size() == cloud.size());
        for (std::size_t i = 0; i < back.size(); ++i) {
            CHECK(back[i].mu == cloud.points[i].mu);
            CHECK(back[i].k_true.has_value() == labels);
            if (labels) CHECK(*back[i].k_true == *cloud.points[i].k_true);
        }
    }
    std::istringstream bad("# comment\n1.0\t2.0\n1.0\tnot-a-number\n");
    try {
        (void)io::read_spectrum_tsv(bad);
        FAIL("malformed row accepted");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("json documents parse and carry the expected fields") {
    const Fixture& f = fixture();
    const auto chart = nlohmann::json::parse(io::chart_document(*f.chart));
    CHECK(chart.contains("tau"));
    CHECK(chart.contains("domain"));
    const auto hc = nlohmann::json::parse(io::hchart_document(f.hchart));
    CHECK(hc.contains("basis"));
    CHECK(hc.contains("labels"));
    CHECK(hc["labels"].size() == f.hchart.labels.size());
}

TEST_CASE("spectrum svg: one circle per point and one lattice line per label value") {
    const Fixture& f = fixture();
    const std::string plain = plot::spectrum_svg(f.cloud);
    CHECK(count(plain, "<circle") == f.cloud.size());
    CHECK(count(plain, "class=\"lattice\"") == 0);
    CHECK(plot::spectrum_svg(f.cloud) == plain);

    const std::string overlay = plot::spectrum_svg(f.cloud, &f.hchart);
    std::int64_t k1_lo = INT64_MAX, k1_hi = INT64_MIN, k2_lo = INT64_MAX, k2_hi = INT64_MIN;
    for (const auto& k : f.hchart.labels) {
        k1_lo = std::min(k1_lo, k.x()), k1_hi = std::max(k1_hi, k.x());
        k2_lo = std::min(k2_lo, k.y()), k2_hi = std::max(k2_hi, k.y());
    }
    CHECK(count(overlay, "class=\"lattice\"") == static_cast<std::size_t>((k1_hi - k1_lo + 1) + (k2_hi - k2_lo + 1)));
    CHECK(overlay.rfind("<svg", 0) == 0);
}

TEST_CASE("residual histogram and loop plots are deterministic") {
    const Fixture& f = fixture();
    const std::string hist = plot::residual_histogram_svg(f.hchart.residuals, 0.05, 10);
    CHECK(count(hist, "<rect") >= 10);
    CHECK(plot::residual_histogram_svg(f.hchart.residuals, 0.05, 10) == hist);
    const ModelPtr champ = make_champagne_model(2.0);
    const Loop loop = Loop::circle({0.0, 0.0}, 0.5, 12);
    const std::string svg = plot::loop_svg(*champ, loop, loop.vertices);
    CHECK(count(svg, "<polygon") + count(svg, "<polyline") >= 1);
    CHECK(plot::loop_svg(*champ, loop, loop.vertices) == svg);
}
