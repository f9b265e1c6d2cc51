#pragma once

#include "specmono/detect.hpp"
#include "specmono/diophantine.hpp"
#include "specmono/gl2z.hpp"
#include "specmono/synth.hpp"

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace specmono {

/// Closed polygon in the value plane, traversed `windings` times.
struct Loop {
    std::vector<Vec2> vertices;
    int windings = 1;

    /// Regular n-gon of the given radius around `center`, counter-clockwise.
    static Loop circle(const Vec2& center, double radius, int n = 16, int windings = 1);
    /// Every vertex moved by a deterministic offset of size <= fraction * |vertex - centroid|.
    Loop perturbed(double fraction, std::uint64_t seed) const;
    /// Same polygon traversed in the opposite direction.
    Loop reversed() const;
};

/**
 * Chart centres along the polygon (one winding), spaced `spacing` times the local chart
 * radius min(0.1 dist, cap) and at most `max_step` apart. Throws MonodromyError if the
 * polygon meets the singular set.
 */
std::vector<Vec2> loop_covering(const ModelSystem& model, const Loop& loop, double spacing = 0.4,
                                double max_step = std::numeric_limits<double>::infinity());

struct SpectralChart {
    /// Centre requested by the covering and the good value actually used.
    Vec2 center = Vec2::Zero();
    Vec2 a = Vec2::Zero();
    std::shared_ptr<const ActionChart> action_chart;
    HChart hchart;
    std::size_t cloud_size = 0;

    Box domain() const { return hchart.domain(); }
};

struct AtlasOptions {
    SemiclassicalParams params;
    DiophantineParams diophantine;
    double C0 = 2.0;
    std::vector<HigherTerm> higher = default_higher_terms();
    DetectOptions detect;
    unsigned jobs = 1;
};

/// Local pseudo-charts fitted blind (without synthesis labels or action charts) on the
/// synthesized spectra near each centre.
struct PseudoChartAtlas {
    std::vector<SpectralChart> charts;
    double h = 0.0;
    double epsilon = 0.0;

    std::size_t size() const { return charts.size(); }
};

/// Largest centre spacing for which consecutive pseudo-charts still overlap: the half width
/// of the good rectangle in the value plane.
double atlas_max_step(const AtlasOptions& options);

/// Builds one pseudo-chart per centre: good-value search near the centre, synthesis,
/// detection and fit. Throws MonodromyError if some centre yields no accepted chart.
PseudoChartAtlas build_spectral_atlas(const ModelPtr& model, const std::vector<Vec2>& centers,
                                      const AtlasOptions& options);
/// Same, reusing action charts already built at the centres.
PseudoChartAtlas build_spectral_atlas(const ModelPtr& model, const std::vector<Vec2>& centers,
                                      const std::vector<std::shared_ptr<const ActionChart>>& action_charts,
                                      const AtlasOptions& options);

/// Action charts (exact action maps) at the given centres.
std::vector<std::shared_ptr<const ActionChart>> build_action_atlas(const ModelPtr& model,
                                                                   const std::vector<Vec2>& centers,
                                                                   unsigned jobs = 1);

struct TransitionMatrix {
    std::size_t i = 0, j = 0;
    IMat2 M = IMat2::Identity();
    Mat2 pre_round = Mat2::Identity();
    double rounding_error = 0.0;
};

/// Snapping threshold for transition matrices.
inline constexpr double kRoundingThreshold = 0.1;

/// n x n sample grid inside the (10% shrunken) intersection of two boxes.
std::vector<Vec2> overlap_samples(const Box& a, const Box& b, int n = 3);

/// d(f~_i o f~_j^-1) by central differences at the samples, averaged and rounded.
/// Throws MonodromyError when the rounding error exceeds 0.1 or |det M| != 1.
TransitionMatrix transition_matrix(const PseudoChartAtlas& atlas, std::size_t i, std::size_t j,
                                   const std::vector<Vec2>& samples);
TransitionMatrix transition_matrix(const PseudoChartAtlas& atlas, std::size_t i, std::size_t j);

/// Transitions on every overlapping pair (i < j computed, (j, i) stored as well).
using TransitionTable = std::map<std::pair<std::size_t, std::size_t>, TransitionMatrix>;
TransitionTable compute_transitions(const PseudoChartAtlas& atlas, unsigned jobs = 1);

struct CocycleViolation {
    std::size_t i, j, k;
    std::string what;
};

struct CocycleReport {
    std::size_t pairs = 0;
    std::size_t triples = 0;
    std::vector<CocycleViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks M_ij M_ji = I on every pair and M_ij M_jk = M_ik on every triple overlap.
CocycleReport cocycle_check(const PseudoChartAtlas& atlas, const TransitionTable& table);
CocycleReport cocycle_check(const PseudoChartAtlas& atlas);

struct MonodromyClass {
    std::vector<std::size_t> loop;
    std::vector<TransitionMatrix> edges;
    IMat2 product = IMat2::Identity();
    ConjugacyClass normal_form;
};

/// Product M_01 M_12 ... M_(n-1)0 around the cyclic chart sequence, repeated `windings` times.
/// Throws MonodromyError on a missing overlap.
MonodromyClass loop_monodromy(const PseudoChartAtlas& atlas, const std::vector<std::size_t>& loop,
                              int windings = 1);

/// Classical transitions t(d(xi_i o xi_j^-1))^-1 of the action charts at the centres,
/// composed around the cyclic sequence.
MonodromyClass classical_monodromy(const std::vector<std::shared_ptr<const ActionChart>>& charts,
                                   int windings = 1);
MonodromyClass classical_monodromy(const ModelPtr& model, const Loop& loop, double spacing = 0.4);

/// True iff the spectral product is GL(2, Z)-conjugate to the transpose of the classical product.
bool compare_monodromies(const MonodromyClass& spectral, const MonodromyClass& classical);

/// Cyclic index sequence 0, 1, ..., n-1.
std::vector<std::size_t> cyclic_indices(std::size_t n);

}  // namespace specmono
