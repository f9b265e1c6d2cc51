#include "specmono/config.hpp"

#include "specmono/errors.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace specmono {

namespace pt = boost::property_tree;

namespace {

/// Line numbers of "section.key" entries, recovered by a light scan of the same text.
std::map<std::string, int> entry_lines(const std::string& text) {
    std::map<std::string, int> lines;
    std::istringstream in(text);
    std::string line, section;
    for (int n = 1; std::getline(in, line); ++n) {
        boost::trim(line);
        if (line.empty() || line[0] == ';' || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = boost::trim_copy(line.substr(1, line.size() - 2));
            lines.emplace(section, n);
            continue;
        }
        const auto eq = line.find('=');
        if (eq != std::string::npos) lines.emplace(section + "." + boost::trim_copy(line.substr(0, eq)), n);
    }
    return lines;
}

class Reader {
public:
    Reader(const pt::ptree& tree, std::map<std::string, int> lines) : tree_(tree), lines_(std::move(lines)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        const auto it = lines_.find(key);
        const int line = it == lines_.end() ? 0 : it->second;
        throw ConfigError(line ? fmt::format("line {}: {}: {}", line, key, what) : fmt::format("{}: {}", key, what),
                          line);
    }

    bool has(const std::string& key) const { return static_cast<bool>(tree_.get_optional<std::string>(key)); }

    std::string text(const std::string& key, const std::string& fallback) const {
        return boost::trim_copy(tree_.get<std::string>(key, fallback));
    }

    std::vector<double> numbers(const std::string& key, const std::string& raw) const {
        std::istringstream in(raw);
        std::vector<double> out;
        std::string token;
        while (in >> token) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size()) fail(key, fmt::format("'{}' is not a number", token));
            out.push_back(v);
        }
        return out;
    }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const auto v = numbers(key, text(key, ""));
        if (v.size() != 1) fail(key, "expected one number");
        return v[0];
    }

    long integer(const std::string& key, long fallback) const {
        const double v = number(key, static_cast<double>(fallback));
        if (v != std::floor(v)) fail(key, "expected an integer");
        return static_cast<long>(v);
    }

    Vec2 pair(const std::string& key, const Vec2& fallback) const {
        if (!has(key)) return fallback;
        const auto v = numbers(key, text(key, ""));
        if (v.size() != 2) fail(key, "expected two numbers");
        return {v[0], v[1]};
    }

    void check_keys(const std::map<std::string, std::set<std::string>>& allowed) const {
        for (const auto& [section, body] : tree_) {
            const auto it = allowed.find(section);
            if (it == allowed.end()) fail(section, "unknown section");
            for (const auto& [key, value] : body)
                if (!it->second.count(key)) fail(section + "." + key, "unknown key");
        }
    }

private:
    const pt::ptree& tree_;
    std::map<std::string, int> lines_;
};

std::vector<HigherTerm> parse_higher(const Reader& r, const std::string& key) {
    const std::string raw = r.text(key, "default");
    if (raw == "default") return default_higher_terms();
    if (raw == "none") return {};
    std::vector<std::string> entries;
    boost::split(entries, raw, boost::is_any_of(";"));
    std::vector<HigherTerm> terms;
    for (const auto& entry : entries) {
        if (boost::trim_copy(entry).empty()) continue;
        const auto v = r.numbers(key, entry);
        if (v.size() != 6) r.fail(key, "each term needs pow_E pow_G eps_power h_power re im");
        for (int c = 0; c < 4; ++c)
            if (v[c] != std::floor(v[c]) || v[c] < 0) r.fail(key, "powers must be non-negative integers");
        terms.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]),
                         static_cast<int>(v[3]), Complex{v[4], v[5]}});
    }
    try {
        validate_higher_terms(terms);
    } catch (const DomainError& e) {
        r.fail(key, e.what());
    }
    return terms;
}

LoopConfig parse_loop(const Reader& r) {
    LoopConfig out;
    const bool circle = r.has("loop.circle"), vertices = r.has("loop.vertices");
    if (circle == vertices) r.fail("loop", "give exactly one of 'circle' or 'vertices'");
    const long windings = r.integer("loop.windings", 1);
    if (windings < 1) r.fail("loop.windings", "must be >= 1");
    if (circle) {
        const auto v = r.numbers("loop.circle", r.text("loop.circle", ""));
        if (v.size() != 4) r.fail("loop.circle", "expected cx cy radius n");
        if (!(v[2] > 0.0)) r.fail("loop.circle", "radius must be positive");
        if (v[3] < 3 || v[3] != std::floor(v[3])) r.fail("loop.circle", "n must be an integer >= 3");
        out.loop = Loop::circle({v[0], v[1]}, v[2], static_cast<int>(v[3]), static_cast<int>(windings));
    } else {
        std::vector<std::string> entries;
        boost::split(entries, r.text("loop.vertices", ""), boost::is_any_of(";"));
        for (const auto& entry : entries) {
            if (boost::trim_copy(entry).empty()) continue;
            const auto v = r.numbers("loop.vertices", entry);
            if (v.size() != 2) r.fail("loop.vertices", "each vertex needs two coordinates");
            out.loop.vertices.emplace_back(v[0], v[1]);
        }
        if (out.loop.vertices.size() < 3) r.fail("loop.vertices", "a loop needs at least three vertices");
        out.loop.windings = static_cast<int>(windings);
    }
    out.spacing = r.number("loop.spacing", out.spacing);
    if (!(out.spacing > 0.0 && out.spacing <= 1.0)) r.fail("loop.spacing", "must lie in (0, 1]");
    out.C0 = r.number("loop.C0", out.C0);
    if (!(out.C0 >= 1.0)) r.fail("loop.C0", "must be >= 1");
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()), static_cast<int>(e.line()));
    }
    const Reader r(tree, entry_lines(text));
    r.check_keys({{"run", {"mode", "rectangles", "jobs"}},
                  {"model", {"name", "well_depth", "omega_star", "q", "center"}},
                  {"semiclassical", {"h", "delta", "C0", "noise_order", "seed", "higher_coeffs"}},
                  {"diophantine", {"alpha", "d", "k_max"}},
                  {"loop", {"circle", "vertices", "windings", "spacing", "C0"}}});

    RunConfig c;
    c.mode = r.text("run.mode", c.mode);
    if (c.mode != "synth" && c.mode != "detect" && c.mode != "monodromy" && c.mode != "verify-all")
        r.fail("run.mode", fmt::format("unknown mode '{}' (synth, detect, monodromy, verify-all)", c.mode));
    c.rectangles = static_cast<int>(r.integer("run.rectangles", c.rectangles));
    if (c.rectangles < 1) r.fail("run.rectangles", "must be >= 1");
    const long jobs = r.integer("run.jobs", 1);
    if (jobs < 1) r.fail("run.jobs", "must be >= 1");
    c.jobs = static_cast<unsigned>(jobs);

    c.model.name = r.text("model.name", "");
    if (c.model.name.empty()) r.fail("model", "missing 'name'");
    if (c.model.name != "flat" && c.model.name != "champagne")
        r.fail("model.name", fmt::format("unknown model '{}' (flat, champagne)", c.model.name));
    c.model.well_depth = r.number("model.well_depth", c.model.well_depth);
    if (!(c.model.well_depth > 0.0)) r.fail("model.well_depth", "must be positive");
    c.model.omega_star = r.pair("model.omega_star", c.model.omega_star);
    c.model.q = r.text("model.q", c.model.q);
    c.model.center = r.pair("model.center", c.model.name == "champagne" ? Vec2{0.6, 0.25} : Vec2::Zero());

    auto& sc = c.semiclassical;
    sc.h = r.number("semiclassical.h", sc.h);
    if (!(sc.h > 0.0 && sc.h <= 0.1)) r.fail("semiclassical.h", "must lie in (0, 0.1]");
    sc.delta = r.number("semiclassical.delta", sc.delta);
    if (!(sc.delta > 0.0 && sc.delta < 1.0)) r.fail("semiclassical.delta", "must lie in (0, 1)");
    sc.noise_order = static_cast<int>(r.integer("semiclassical.noise_order", sc.noise_order));
    const long seed = r.integer("semiclassical.seed", static_cast<long>(sc.seed));
    if (seed < 0) r.fail("semiclassical.seed", "must be non-negative");
    sc.seed = static_cast<std::uint64_t>(seed);
    try {
        sc.validate();
    } catch (const DomainError& e) {
        r.fail("semiclassical", e.what());
    }
    c.C0 = r.number("semiclassical.C0", c.C0);
    if (!(c.C0 >= 1.0)) r.fail("semiclassical.C0", "must be >= 1");
    c.higher = parse_higher(r, "semiclassical.higher_coeffs");

    c.diophantine.alpha = r.number("diophantine.alpha", c.diophantine.alpha);
    if (!(c.diophantine.alpha > 0.0)) r.fail("diophantine.alpha", "must be positive");
    c.diophantine.d = r.number("diophantine.d", c.diophantine.d);
    if (!(c.diophantine.d > 0.0)) r.fail("diophantine.d", "must be positive");
    c.diophantine.k_max = r.integer("diophantine.k_max", static_cast<long>(c.diophantine.k_max));
    try {
        c.diophantine.validate();
    } catch (const DomainError& e) {
        r.fail("diophantine", e.what());
    }

    if (tree.get_child_optional("loop")) c.loop = parse_loop(r);
    if ((c.mode == "monodromy") && !c.loop) r.fail("loop", "mode 'monodromy' needs a [loop] section");
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot read config file {}", path.string()), 0);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

ModelPtr make_model(const ModelConfig& config) {
    if (config.name == "flat") return make_flat_model(config.omega_star, config.q);
    if (config.name == "champagne") return make_champagne_model(config.well_depth);
    throw ConfigError(fmt::format("unknown model '{}'", config.name), 0);
}

}  // namespace specmono
