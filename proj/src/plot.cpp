#include "specmono/plot.hpp"

#include "specmono/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <map>

namespace specmono::plot {

namespace {

/// Affine map from a data box onto the drawing area, y pointing up.
class Frame {
public:
    explicit Frame(Box data) : data_(data) {
        Vec2 size = data_.size();
        for (int c = 0; c < 2; ++c)
            if (!(size(c) > 0.0)) {
                data_.lo(c) -= 0.5;
                data_.hi(c) += 0.5;
            }
    }

    double x(double v) const {
        return kMargin + (v - data_.lo.x()) / data_.size().x() * (kWidth - 2 * kMargin);
    }
    double y(double v) const {
        return kHeight - kMargin - (v - data_.lo.y()) / data_.size().y() * (kHeight - 2 * kMargin);
    }

private:
    Box data_;
};

Box bounds(const std::vector<Vec2>& pts) {
    Box b{Vec2::Constant(std::numeric_limits<double>::infinity()),
          Vec2::Constant(-std::numeric_limits<double>::infinity())};
    for (const auto& p : pts) {
        b.lo = b.lo.cwiseMin(p);
        b.hi = b.hi.cwiseMax(p);
    }
    return b;
}

std::string header(const std::string& title) {
    return fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
        "<title>{2}</title>\n<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
        kWidth, kHeight, title);
}

std::string axes(const Box& data) {
    return fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n"
        "<text x=\"{}\" y=\"{}\" font-size=\"11\">{:.6g}</text>\n"
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{:.6g}</text>\n"
        "<text x=\"4\" y=\"{}\" font-size=\"11\">{:.6g}</text>\n"
        "<text x=\"4\" y=\"{}\" font-size=\"11\">{:.6g}</text>\n",
        kMargin, kMargin, kWidth - 2 * kMargin, kHeight - 2 * kMargin, kMargin, kHeight - kMargin + 14, data.lo.x(),
        kWidth - kMargin, kHeight - kMargin + 14, data.hi.x(), kHeight - kMargin, data.lo.y(), kMargin + 4,
        data.hi.y());
}

std::string polyline(const std::vector<Vec2>& pts, const Frame& f, const std::string& cls, const std::string& style,
                     bool closed = false) {
    std::string out = fmt::format("<{} class=\"{}\" {} points=\"", closed ? "polygon" : "polyline", cls, style);
    for (std::size_t n = 0; n < pts.size(); ++n)
        out += fmt::format("{}{:.3f},{:.3f}", n ? " " : "", f.x(pts[n].x()), f.y(pts[n].y()));
    return out + "\"/>\n";
}

}  // namespace

std::string spectrum_svg(const SpectrumCloud& cloud, const HChart* overlay) {
    if (cloud.points.empty()) throw DomainError("cannot plot an empty spectrum");
    const std::vector<Vec2> u = scaled_points(cloud);
    const Box data = bounds(u).inflate(0.02 * std::max(bounds(u).size().maxCoeff(), 1e-12));
    const Frame f(data);
    std::string out = header(fmt::format("spectrum near ({:.6g}, {:.6g}), {} points", cloud.rectangle.center.real(),
                                         cloud.rectangle.center.imag() / cloud.rectangle.epsilon, u.size()));
    out += axes(data);
    if (overlay && !overlay->labels.empty()) {
        // Lattice lines: points sharing one label coordinate, ordered by the other.
        for (int axis = 0; axis < 2; ++axis) {
            std::map<std::int64_t, std::vector<std::pair<std::int64_t, Vec2>>> lines;
            std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
            for (std::size_t n = 0; n < overlay->labels.size(); ++n) {
                const std::int64_t key = overlay->labels[n](axis);
                lo = std::min(lo, key);
                hi = std::max(hi, key);
                lines[key].emplace_back(overlay->labels[n](1 - axis), overlay->u[n]);
            }
            for (std::int64_t key = lo; key <= hi; ++key) {
                auto& pts = lines[key];
                std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
                std::vector<Vec2> path;
                for (const auto& [order, p] : pts) path.push_back(p);
                out += polyline(path, f, "lattice", "fill=\"none\" stroke=\"#9ab\" stroke-width=\"0.5\"");
            }
        }
    }
    for (const auto& p : u)
        out += fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"1.5\" fill=\"#1f4e79\"/>\n", f.x(p.x()), f.y(p.y()));
    return out + "</svg>\n";
}

std::string residual_histogram_svg(const std::vector<double>& residuals, double threshold, int bins) {
    if (bins < 1) throw DomainError("histogram needs at least one bin");
    double top = threshold;
    for (double r : residuals) top = std::max(top, r);
    top = top > 0.0 ? 1.05 * top : 1.0;
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    for (double r : residuals) {
        const auto b = std::min<std::size_t>(static_cast<std::size_t>(bins - 1),
                                              static_cast<std::size_t>(std::max(0.0, r) / top * bins));
        ++counts[b];
    }
    const std::size_t max_count = std::max<std::size_t>(1, *std::max_element(counts.begin(), counts.end()));
    const Box data{{0.0, 0.0}, {top, static_cast<double>(max_count)}};
    const Frame f(data);
    std::string out = header(fmt::format("fit residuals (units of h), {} points", residuals.size()));
    out += axes(data);
    for (int b = 0; b < bins; ++b) {
        const double x0 = f.x(top * b / bins), x1 = f.x(top * (b + 1) / bins);
        const double y = f.y(static_cast<double>(counts[b]));
        out += fmt::format("<rect class=\"bar\" x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" "
                           "fill=\"#4a7\" stroke=\"white\"/>\n",
                           x0, y, x1 - x0, f.y(0.0) - y);
    }
    out += fmt::format("<line class=\"threshold\" x1=\"{0:.3f}\" y1=\"{1}\" x2=\"{0:.3f}\" y2=\"{2}\" "
                       "stroke=\"red\" stroke-dasharray=\"4 3\"/>\n",
                       f.x(threshold), kMargin, kHeight - kMargin);
    return out + "</svg>\n";
}

std::string loop_svg(const ModelSystem& model, const Loop& loop, const std::vector<Vec2>& centers) {
    if (loop.vertices.empty()) throw DomainError("cannot plot an empty loop");
    std::vector<Vec2> all = loop.vertices;
    all.insert(all.end(), centers.begin(), centers.end());
    Box data = bounds(all);
    const double pad = 0.25 * std::max(data.size().maxCoeff(), 1e-6);
    data = data.inflate(pad);
    const Frame f(data);
    std::string out = header(fmt::format("loop in the value plane of the {} model, {} charts", model.name(),
                                         centers.size()));
    out += axes(data);
    const SingularSet singular = model.singular_values();
    for (const auto& curve : singular.curves) {
        std::vector<Vec2> inside;
        for (const auto& p : curve)
            if (data.contains(p)) inside.push_back(p);
        if (inside.size() > 1) out += polyline(inside, f, "singular", "fill=\"none\" stroke=\"#c33\" stroke-width=\"1.5\"");
    }
    for (const auto& p : singular.points)
        if (data.contains(p))
            out += fmt::format("<circle class=\"singular\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"4\" fill=\"#c33\"/>\n",
                               f.x(p.x()), f.y(p.y()));
    out += polyline(loop.vertices, f, "loop", "fill=\"none\" stroke=\"#246\" stroke-width=\"1\"", true);
    for (const auto& c : centers)
        out += fmt::format("<circle class=\"center\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"1.5\" fill=\"#f90\"/>\n",
                           f.x(c.x()), f.y(c.y()));
    return out + "</svg>\n";
}

}  // namespace specmono::plot
