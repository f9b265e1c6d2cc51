#pragma once

#include "specmono/averaging.hpp"
#include "specmono/detect.hpp"
#include "specmono/diophantine.hpp"
#include "specmono/monodromy.hpp"
#include "specmono/synth.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace specmono::io {

/// Shortest text that reads back to the same double.
std::string format_double(double x);

/// Tab-separated spectrum table: re_mu, im_mu and, with `with_labels`, k1, k2.
std::string spectrum_tsv(const SpectrumCloud& cloud, bool with_labels = true);
/// Reads a spectrum table; label columns are optional. Comment lines start with '#'.
/// Throws Error with the line number on malformed rows.
std::vector<SpectralPoint> read_spectrum_tsv(std::istream& in);

/// ActionChart as a JSON document: c, S, eta, tau, domain and the (xi, phi(xi)) grid.
std::string chart_document(const ActionChart& chart);
/// One row per node: E, G, xi_1, xi_2 and the four exclusion flags.
std::string good_values_tsv(const GoodValueSet& set);
/// Rows T, <q>_T, |<q>_T - <q>|, with the torus average and Q_inf range in the header.
std::string average_report_tsv(const AverageReport& report);
/// HChart as a JSON document: basis, anchor, fit coefficients, labels table, residual stats.
std::string hchart_document(const HChart& chart);

struct MonodromyReport {
    std::string model;
    Loop loop;
    std::vector<Vec2> centers;
    MonodromyClass spectral;
    MonodromyClass classical;
    bool conjugate = false;
    CocycleReport cocycle;
};

/// Loop, per-edge matrices, products, normal forms and the comparison verdict as JSON.
std::string monodromy_document(const MonodromyReport& report);

/// Writes `text` to `path`, creating parent directories. Throws Error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace specmono::io
