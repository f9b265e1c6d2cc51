#include "doctest.h"

#include "specmono/config.hpp"
#include "specmono/errors.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

using namespace specmono;
namespace fs = std::filesystem;

namespace {

const char* kFlatSynth = R"([run]
mode = synth
rectangles = 2

[model]
name = flat
omega_star = 3 4.854101966249685
q = xi_weighted

[semiclassical]
h = 2e-3
seed = 4
)";

int line_of_error(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("specmono_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string command = std::string(SPECMONO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config: valid text parses with defaults") {
    const RunConfig c = parse_config(kFlatSynth);
    CHECK(c.mode == "synth");
    CHECK(c.rectangles == 2);
    CHECK(c.model.name == "flat");
    CHECK(c.semiclassical.h == 2e-3);
    CHECK(c.semiclassical.seed == 4);
    CHECK(c.semiclassical.delta == 0.5);
    CHECK_FALSE(c.loop.has_value());
    CHECK(c.higher.size() == default_higher_terms().size());
}

TEST_CASE("config: errors carry the line of the offending entry") {
    CHECK(line_of_error("[run]\nmode = synth\n[model]\nname = flat\ncolour = red\n") == 5);
    CHECK(line_of_error("[run]\nmode = dance\n[model]\nname = flat\n") == 2);
    CHECK(line_of_error("[model]\nname = flat\n[semiclassical]\nh = 0.5\n") == 4);
    CHECK(line_of_error("[model]\nname = flat\n[semiclassical]\nh = abc\n") == 4);
    CHECK(line_of_error("[model]\nname = flat\n[bogus]\nx = 1\n") == 3);
    CHECK(line_of_error("[model]\nname = flat\n[loop]\ncircle = 0 0 0.5\n") == 4);
    CHECK(line_of_error("[model]\nname = flat\nthis is not ini\n") == 3);
    CHECK_THROWS_AS(parse_config("[run]\nmode = monodromy\n[model]\nname = champagne\n"), ConfigError);
}

TEST_CASE("config: loops and higher terms") {
    const RunConfig c = parse_config(
        "[run]\nmode = monodromy\n[model]\nname = champagne\n"
        "[semiclassical]\nhigher_coeffs = 0 0 2 0 0.01 0.02; 0 0 0 1 0.05 0\n"
        "[loop]\nvertices = 0.3 0; 0 0.3; -0.3 0; 0 -0.3\nwindings = 2\n");
    REQUIRE(c.loop.has_value());
    CHECK(c.loop->loop.vertices.size() == 4);
    CHECK(c.loop->loop.windings == 2);
    CHECK(c.higher.size() == 2);
    CHECK(c.model.center == Vec2{0.6, 0.25});
    CHECK(make_model(c.model)->name() == "champagne");
}

TEST_CASE("cli: exit codes") {
    const fs::path dir = scratch_dir("cli");
    {
        std::ofstream bad(dir / "bad.ini");
        bad << "[run]\nmode = synth\n[model]\nname = flat\nspeed = 3\n";
    }
    CHECK(run_cli((dir / "bad.ini").string()) == 2);
    CHECK(run_cli("run " + (dir / "bad.ini").string()) == 2);
    CHECK(run_cli("run " + (dir / "missing.ini").string()) == 2);
    CHECK(run_cli("frobnicate") == 2);

    {
        std::ofstream good(dir / "synth.ini");
        good << kFlatSynth;
    }
    CHECK(run_cli("run " + (dir / "synth.ini").string() + " --out " + (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "checks.tsv"));
    CHECK(fs::exists(dir / "out" / "config.ini"));
    CHECK(fs::exists(dir / "out" / "spectrum_00.tsv"));
}
