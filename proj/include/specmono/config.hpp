#pragma once

#include "specmono/diophantine.hpp"
#include "specmono/monodromy.hpp"
#include "specmono/synth.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace specmono {

struct ModelConfig {
    /// "flat" or "champagne".
    std::string name = "flat";
    /// champagne: well depth b.
    double well_depth = 2.0;
    /// flat: omega* and the choice of q.
    Vec2 omega_star{3.0, 1.5 * (1.0 + std::sqrt(5.0))};
    std::string q = "xi_weighted";
    /// Regular value around which action charts, good values and rectangles are taken.
    Vec2 center = Vec2::Zero();
};

struct LoopConfig {
    Loop loop;
    double spacing = 0.4;
    /// Rectangle constant of the pseudo-charts along the loop.
    double C0 = 2.0;
};

struct RunConfig {
    /// synth, detect, monodromy or verify-all.
    std::string mode = "verify-all";
    ModelConfig model;
    SemiclassicalParams semiclassical;
    double C0 = 1.0;
    std::vector<HigherTerm> higher = default_higher_terms();
    DiophantineParams diophantine;
    /// Number of good rectangles used by the synth and detect stages.
    int rectangles = 4;
    std::optional<LoopConfig> loop;
    unsigned jobs = 1;
};

/**
 * Parses an INI-style run configuration:
 *
 *   [run]           mode, rectangles, jobs
 *   [model]         name, well_depth, omega_star, q, center
 *   [semiclassical] h, delta, C0, noise_order, seed, higher_coeffs
 *   [diophantine]   alpha, d, k_max
 *   [loop]          circle = cx cy r n | vertices = x y; x y; ...  windings, spacing, C0
 *
 * Vectors are whitespace separated. higher_coeffs is "default", "none" or a list of
 * "pow_E pow_G eps_power h_power re im" entries separated by ';'.
 * Throws ConfigError carrying the line of the offending entry.
 */
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Builds the model named in the configuration.
ModelPtr make_model(const ModelConfig& config);

}  // namespace specmono
