#pragma once

#include "specmono/config.hpp"
#include "specmono/detect.hpp"
#include "specmono/diophantine.hpp"
#include "specmono/synth.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace specmono {

/**
 * Up to `count` good values spread over the part of the chart domain where a rectangle
 * with constant C0 fits, taken evenly from the good nodes of a centred grid. `set` receives
 * the classified grid. Throws DomainError if fewer than `count` good nodes exist.
 */
std::vector<Vec2> pick_good_values(const ActionChart& chart, const DiophantineParams& diophantine,
                                   const SemiclassicalParams& params, double C0, int count,
                                   GoodValueSet* set = nullptr);

/// Number of lattice points whose eigenvalue (exact p, same higher terms and noise) lies in
/// the good rectangle at a, counted over a bracket wider than the one used by synthesis.
std::size_t brute_force_count(const NormalFormSymbol& symbol, const Vec2& a, const SemiclassicalParams& params,
                              double C0);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunResult {
    std::vector<CheckResult> checks;
    std::vector<std::filesystem::path> files;

    bool ok() const;
};

/// Runs the configured mode and writes its artifacts under `out_dir`.
RunResult run_pipeline(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace specmono
