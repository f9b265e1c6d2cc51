#pragma once

#include "specmono/detect.hpp"
#include "specmono/monodromy.hpp"

#include <string>
#include <vector>

namespace specmono::plot {

/// Fixed 640 x 480 viewport with a 40 px margin.
inline constexpr int kWidth = 640;
inline constexpr int kHeight = 480;
inline constexpr int kMargin = 40;

/**
 * Spectrum cloud in the rescaled plane chi^-1(mu), one <circle> per point. With an
 * h-chart, one <polyline class="lattice"> per label value k1 in [min, max] and per k2 in
 * [min, max], joining the labelled points along that lattice line.
 */
std::string spectrum_svg(const SpectrumCloud& cloud, const HChart* overlay = nullptr);

/// Histogram of residuals (units of h) with `bins` bars and a marker at `threshold`.
std::string residual_histogram_svg(const std::vector<double>& residuals, double threshold, int bins = 20);

/// Loop polygon, chart centres and sampled singular set of the model in the value plane.
std::string loop_svg(const ModelSystem& model, const Loop& loop, const std::vector<Vec2>& centers);

}  // namespace specmono::plot
