#include "specmono/monodromy.hpp"

#include "specmono/errors.hpp"
#include "specmono/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace specmono {

Loop Loop::circle(const Vec2& center, double radius, int n, int windings) {
    Loop loop;
    loop.windings = windings;
    for (int k = 0; k < n; ++k) {
        const double t = kTwoPi * k / n;
        loop.vertices.push_back(center + radius * Vec2{std::cos(t), std::sin(t)});
    }
    return loop;
}

Loop Loop::perturbed(double fraction, std::uint64_t seed) const {
    Vec2 centroid = Vec2::Zero();
    for (const auto& v : vertices) centroid += v;
    centroid /= static_cast<double>(std::max<std::size_t>(vertices.size(), 1));
    Loop out = *this;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const std::uint64_t key = splitmix64(seed ^ splitmix64(i));
        const double angle = kTwoPi * static_cast<double>(key >> 11) * 0x1.0p-53;
        const double size = static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
        const double r = fraction * size * (vertices[i] - centroid).norm();
        out.vertices[i] = vertices[i] + r * Vec2{std::cos(angle), std::sin(angle)};
    }
    return out;
}

Loop Loop::reversed() const {
    Loop out = *this;
    std::reverse(out.vertices.begin(), out.vertices.end());
    return out;
}

namespace {

double local_radius(const ModelSystem& model, const Vec2& v) {
    if (!model.is_regular(v))
        throw MonodromyError(fmt::format("loop passes through the non-regular value ({}, {})", v.x(), v.y()));
    const double dist = model.distance_to_singular(v);
    const double r = std::isfinite(dist) ? std::min(0.1 * dist, model.max_chart_radius()) : model.max_chart_radius();
    if (!(r > 1e-6))
        throw MonodromyError(fmt::format("loop comes too close to the singular set at ({}, {})", v.x(), v.y()));
    return r;
}

}  // namespace

std::vector<Vec2> loop_covering(const ModelSystem& model, const Loop& loop, double spacing, double max_step) {
    const auto& v = loop.vertices;
    if (v.size() < 3) throw MonodromyError("a loop needs at least three vertices");
    if (!(spacing > 0.0)) throw MonodromyError("covering spacing must be positive");
    if (!(max_step > 0.0)) throw MonodromyError("covering step bound must be positive");
    std::vector<double> cumulative{0.0};
    for (std::size_t i = 0; i < v.size(); ++i)
        cumulative.push_back(cumulative.back() + (v[(i + 1) % v.size()] - v[i]).norm());
    const double perimeter = cumulative.back();
    auto point_at = [&](double s) {
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
        const std::size_t e = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()) - 1, v.size() - 1);
        const double len = cumulative[e + 1] - cumulative[e];
        const double t = len > 0.0 ? (s - cumulative[e]) / len : 0.0;
        return Vec2(v[e] + t * (v[(e + 1) % v.size()] - v[e]));
    };
    std::vector<Vec2> centers;
    double s = 0.0;
    while (s < perimeter) {
        const Vec2 p = point_at(s);
        const double r = local_radius(model, p);
        centers.push_back(p);
        s += std::min(spacing * r, max_step);
    }
    // Also check the edges between centres stay regular: sample midpoints.
    for (std::size_t i = 0; i < centers.size(); ++i)
        local_radius(model, 0.5 * (centers[i] + centers[(i + 1) % centers.size()]));
    return centers;
}

namespace {

SpectralChart make_spectral_chart(const ModelPtr& model, const Vec2& center,
                                  std::shared_ptr<const ActionChart> action_chart, const AtlasOptions& options) {
    SpectralChart out;
    out.center = center;
    out.action_chart = action_chart ? std::move(action_chart)
                                    : std::make_shared<const ActionChart>(action_coords(model, center));
    const ActionChart& chart = *out.action_chart;
    const GoodRectangle probe = good_rectangle(center, options.params, options.C0);
    const double slack = chart.radius() - probe.half_width;
    if (!(slack > 0.0))
        throw MonodromyError(fmt::format("chart at ({}, {}) is smaller than the good rectangle", center.x(), center.y()));

    // Good-value search on a small grid around the centre, nearest first.
    const double step = std::min({0.02 * chart.radius(), 0.3 * slack, 0.05 * probe.half_width});
    std::vector<Vec2> offsets;
    for (int i = -4; i <= 4; ++i)
        for (int j = -4; j <= 4; ++j) offsets.emplace_back(i * step, j * step);
    std::stable_sort(offsets.begin(), offsets.end(),
                     [](const Vec2& x, const Vec2& y) { return x.squaredNorm() < y.squaredNorm(); });
    std::optional<Vec2> good;
    for (const Vec2& off : offsets) {
        const Vec2 a = center + off;
        if (!chart.domain().contains(good_rectangle(a, options.params, options.C0).value_box())) continue;
        if (classify_value(chart, a, options.diophantine).good) {
            good = a;
            break;
        }
    }
    if (!good)
        throw MonodromyError(fmt::format("no good value found near ({}, {})", center.x(), center.y()));
    out.a = *good;

    NormalFormSymbol symbol{out.action_chart, options.higher};
    SynthOptions synth;
    synth.C0 = options.C0;
    const SpectrumCloud cloud = synth_spectrum(symbol, out.a, options.params, synth);
    out.cloud_size = cloud.size();
    out.hchart = fit_hchart(cloud, out.a, nullptr, options.detect);
    if (!out.hchart.accepted)
        throw MonodromyError(fmt::format("pseudo-chart at ({}, {}) rejected: max residual {:.3g} h", out.a.x(),
                                         out.a.y(), out.hchart.max_residual));
    return out;
}

}  // namespace

double atlas_max_step(const AtlasOptions& options) {
    return good_rectangle(Vec2::Zero(), options.params, options.C0).half_width;
}

PseudoChartAtlas build_spectral_atlas(const ModelPtr& model, const std::vector<Vec2>& centers,
                                      const AtlasOptions& options) {
    options.params.validate();
    PseudoChartAtlas atlas;
    atlas.h = options.params.h;
    atlas.epsilon = options.params.epsilon();
    atlas.charts.resize(centers.size());
    parallel_for(centers.size(), options.jobs,
                 [&](std::size_t i) { atlas.charts[i] = make_spectral_chart(model, centers[i], nullptr, options); });
    return atlas;
}

PseudoChartAtlas build_spectral_atlas(const ModelPtr& model, const std::vector<Vec2>& centers,
                                      const std::vector<std::shared_ptr<const ActionChart>>& action_charts,
                                      const AtlasOptions& options) {
    if (action_charts.size() != centers.size())
        throw MonodromyError("one action chart per centre is required");
    options.params.validate();
    PseudoChartAtlas atlas;
    atlas.h = options.params.h;
    atlas.epsilon = options.params.epsilon();
    atlas.charts.resize(centers.size());
    parallel_for(centers.size(), options.jobs, [&](std::size_t i) {
        atlas.charts[i] = make_spectral_chart(model, centers[i], action_charts[i], options);
    });
    return atlas;
}

std::vector<std::shared_ptr<const ActionChart>> build_action_atlas(const ModelPtr& model,
                                                                   const std::vector<Vec2>& centers,
                                                                   unsigned jobs) {
    std::vector<std::shared_ptr<const ActionChart>> charts(centers.size());
    parallel_for(centers.size(), jobs, [&](std::size_t i) {
        charts[i] = std::make_shared<const ActionChart>(action_coords(model, centers[i]));
    });
    return charts;
}

std::vector<Vec2> overlap_samples(const Box& a, const Box& b, int n) {
    const Box o = a.intersect(b);
    if (!(o.lo.x() < o.hi.x() && o.lo.y() < o.hi.y())) return {};
    const Box inner{o.lo + 0.1 * o.size(), o.hi - 0.1 * o.size()};
    std::vector<Vec2> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double tx = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
            const double ty = n == 1 ? 0.5 : static_cast<double>(j) / (n - 1);
            out.emplace_back(inner.lo.x() + tx * inner.size().x(), inner.lo.y() + ty * inner.size().y());
        }
    return out;
}

namespace {

/// Newton inversion of a fitted chart near a starting point.
Vec2 invert_hchart(const HChart& chart, const Vec2& target, Vec2 u) {
    for (int it = 0; it < 30; ++it) {
        const Vec2 r = chart(u) - target;
        if (r.norm() <= 1e-15 * (1.0 + target.norm())) break;
        u -= chart.jacobian(u).inverse() * r;
    }
    return u;
}

void snap(TransitionMatrix& t, const Mat2& pre) {
    t.pre_round = pre;
    t.M = round_to_int(pre);
    t.rounding_error = (pre - t.M.cast<double>()).cwiseAbs().maxCoeff();
}

}  // namespace

TransitionMatrix transition_matrix(const PseudoChartAtlas& atlas, std::size_t i, std::size_t j,
                                   const std::vector<Vec2>& samples) {
    TransitionMatrix t;
    t.i = i;
    t.j = j;
    if (i == j) return t;
    if (samples.size() < 4) throw MonodromyError("transition_matrix needs at least four samples in the overlap");
    const HChart& fi = atlas.charts.at(i).hchart;
    const HChart& fj = atlas.charts.at(j).hchart;
    const double step = 1e-3 * std::min(fi.rectangle.half_width, fj.rectangle.half_width);
    Mat2 sum = Mat2::Zero();
    for (const Vec2& u : samples) {
        const Vec2 y = fj(u);
        Mat2 D;
        for (int c = 0; c < 2; ++c) {
            Vec2 e = Vec2::Zero();
            e(c) = step;
            const Vec2 plus = fi(invert_hchart(fj, y + e, u));
            const Vec2 minus = fi(invert_hchart(fj, y - e, u));
            D.col(c) = (plus - minus) / (2.0 * step);
        }
        sum += D;
    }
    snap(t, sum / static_cast<double>(samples.size()));
    if (t.rounding_error > kRoundingThreshold)
        throw MonodromyError(fmt::format("transition ({}, {}) is not near-integer: rounding error {:.3g}", i, j,
                                         t.rounding_error));
    if (std::abs(det(t.M)) != 1.0)
        throw MonodromyError(fmt::format("transition ({}, {}) = {} is not unimodular", i, j, to_string(t.M)));
    return t;
}

TransitionMatrix transition_matrix(const PseudoChartAtlas& atlas, std::size_t i, std::size_t j) {
    const auto samples = overlap_samples(atlas.charts.at(i).domain(), atlas.charts.at(j).domain());
    if (samples.empty()) throw MonodromyError(fmt::format("charts {} and {} do not overlap", i, j));
    return transition_matrix(atlas, i, j, samples);
}

TransitionTable compute_transitions(const PseudoChartAtlas& atlas, unsigned jobs) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < atlas.size(); ++i)
        for (std::size_t j = i + 1; j < atlas.size(); ++j)
            if (atlas.charts[i].domain().overlaps(atlas.charts[j].domain())) pairs.emplace_back(i, j);
    std::vector<TransitionMatrix> forward(pairs.size()), backward(pairs.size());
    parallel_for(pairs.size(), jobs, [&](std::size_t n) {
        forward[n] = transition_matrix(atlas, pairs[n].first, pairs[n].second);
        backward[n] = transition_matrix(atlas, pairs[n].second, pairs[n].first);
    });
    TransitionTable table;
    for (std::size_t n = 0; n < pairs.size(); ++n) {
        table[pairs[n]] = forward[n];
        table[{pairs[n].second, pairs[n].first}] = backward[n];
    }
    return table;
}

CocycleReport cocycle_check(const PseudoChartAtlas& atlas, const TransitionTable& table) {
    CocycleReport report;
    auto find = [&](std::size_t a, std::size_t b) -> const TransitionMatrix* {
        const auto it = table.find({a, b});
        return it == table.end() ? nullptr : &it->second;
    };
    for (const auto& [key, t] : table) {
        if (key.first >= key.second) continue;
        ++report.pairs;
        const TransitionMatrix* back = find(key.second, key.first);
        if (!back || t.M * back->M != IMat2::Identity())
            report.violations.push_back({key.first, key.second, key.first, "M_ij M_ji != I"});
    }
    const std::size_t n = atlas.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const TransitionMatrix* ij = find(i, j);
            if (!ij) continue;
            for (std::size_t k = j + 1; k < n; ++k) {
                const TransitionMatrix* jk = find(j, k);
                const TransitionMatrix* ik = find(i, k);
                if (!jk || !ik) continue;
                const Box triple = atlas.charts[i].domain().intersect(atlas.charts[j].domain());
                if (!triple.overlaps(atlas.charts[k].domain())) continue;
                ++report.triples;
                if (ij->M * jk->M != ik->M)
                    report.violations.push_back({i, j, k, "M_ij M_jk != M_ik"});
            }
        }
    return report;
}

CocycleReport cocycle_check(const PseudoChartAtlas& atlas) { return cocycle_check(atlas, compute_transitions(atlas)); }

std::vector<std::size_t> cyclic_indices(std::size_t n) {
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
}

namespace {

IMat2 power(const IMat2& m, int k) {
    IMat2 out = IMat2::Identity();
    for (int i = 0; i < k; ++i) out = out * m;
    return out;
}

}  // namespace

MonodromyClass loop_monodromy(const PseudoChartAtlas& atlas, const std::vector<std::size_t>& loop, int windings) {
    if (loop.empty()) throw MonodromyError("empty loop");
    if (windings < 1) throw MonodromyError("windings must be >= 1");
    MonodromyClass out;
    out.loop = loop;
    IMat2 product = IMat2::Identity();
    for (std::size_t n = 0; n < loop.size(); ++n) {
        const std::size_t a = loop[n], b = loop[(n + 1) % loop.size()];
        if (a != b && !atlas.charts.at(a).domain().overlaps(atlas.charts.at(b).domain()))
            throw MonodromyError(fmt::format("gap in the loop: charts {} and {} do not overlap", a, b));
        out.edges.push_back(transition_matrix(atlas, a, b));
        product = product * out.edges.back().M;
    }
    out.product = power(product, windings);
    out.normal_form = normal_form(out.product);
    return out;
}

namespace {

/// d(xi_i o xi_j^-1) at the value v by central differences in xi_j.
Mat2 action_transition_derivative(const ActionChart& ci, const ActionChart& cj, const Vec2& v) {
    const Vec2 xi = cj.xi_of(v);
    const double step = fd_step(xi);
    Mat2 D;
    for (int c = 0; c < 2; ++c) {
        Vec2 e = Vec2::Zero();
        e(c) = step;
        D.col(c) = (ci.xi_of(cj.phi(xi + e)) - ci.xi_of(cj.phi(xi - e))) / (2.0 * step);
    }
    return D;
}

}  // namespace

MonodromyClass classical_monodromy(const std::vector<std::shared_ptr<const ActionChart>>& charts, int windings) {
    if (charts.empty()) throw MonodromyError("empty loop");
    MonodromyClass out;
    out.loop = cyclic_indices(charts.size());
    IMat2 product = IMat2::Identity();
    for (std::size_t n = 0; n < charts.size(); ++n) {
        const std::size_t a = n, b = (n + 1) % charts.size();
        TransitionMatrix t;
        t.i = a;
        t.j = b;
        if (a != b) {
            const auto samples = overlap_samples(charts[a]->domain(), charts[b]->domain(), 2);
            if (samples.empty())
                throw MonodromyError(fmt::format("gap in the loop: action charts {} and {} do not overlap", a, b));
            Mat2 sum = Mat2::Zero();
            for (const Vec2& v : samples) sum += action_transition_derivative(*charts[a], *charts[b], v);
            snap(t, sum / static_cast<double>(samples.size()));
            if (t.rounding_error > kRoundingThreshold || std::abs(det(t.M)) != 1.0)
                throw MonodromyError(fmt::format("action transition ({}, {}) is not integral (error {:.3g})", a, b,
                                                 t.rounding_error));
            // Transition of the period lattice bundle: t(A)^-1.
            const IMat2 At = t.M.transpose();
            t.M = unimodular_inverse(At);
            t.pre_round = t.pre_round.transpose().inverse().eval();
        }
        out.edges.push_back(t);
        product = product * t.M;
    }
    out.product = power(product, windings);
    out.normal_form = normal_form(out.product);
    return out;
}

MonodromyClass classical_monodromy(const ModelPtr& model, const Loop& loop, double spacing) {
    const auto centers = loop_covering(*model, loop, spacing);
    return classical_monodromy(build_action_atlas(model, centers), loop.windings);
}

bool compare_monodromies(const MonodromyClass& spectral, const MonodromyClass& classical) {
    return gl2z_conjugate(spectral.product, classical.product.transpose());
}

}  // namespace specmono
