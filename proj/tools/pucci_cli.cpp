// Command-line front end: solve-annulus, solve-exterior, phase-portrait,
// check-invariants. Precedence: built-in defaults < --config file < flags.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pucci/error.hpp"
#include "pucci/io/commands.hpp"
#include "pucci/io/config.hpp"

namespace {

struct Override {
    std::string section;
    std::string key;
    std::string value;
};

struct Invocation {
    std::string config_file;
    std::vector<Override> overrides;
};

void field(CLI::App* app, Invocation& inv, const std::string& flag, const std::string& section,
           const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [&inv, section, key](const std::string& v) { inv.overrides.push_back({section, key, v}); }, help)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

void common(CLI::App* app, Invocation& inv) {
    app->add_option("--config", inv.config_file, "sectioned key = value file");
    field(app, inv, "--operator", "problem", "operator", "plus | minus");
    field(app, inv, "--lambda", "problem", "lambda", "smaller ellipticity constant");
    field(app, inv, "--Lambda", "problem", "Lambda", "larger ellipticity constant");
    field(app, inv, "--N", "problem", "N", "space dimension");
    field(app, inv, "--p", "problem", "p", "exponent of the nonlinearity");
    field(app, inv, "--a", "problem", "a", "Henon weight exponent (> -1)");
    field(app, inv, "--inner", "geometry", "inner", "inner radius of the annulus");
    field(app, inv, "--outer", "geometry", "outer", "outer radius of the annulus");
    field(app, inv, "--R", "geometry", "R", "radius of the excluded ball (exterior problems)");
    field(app, inv, "--out", "output", "dir", "output directory (default $PUCCI_OUT_DIR or pucci_out)");
    field(app, inv, "--seed", "invariants", "seed", "seed for every random sample");
    field(app, inv, "--rel-tol", "solver", "rel_tol", "radial integrator relative tolerance");
    field(app, inv, "--abs-tol", "solver", "abs_tol", "radial integrator absolute tolerance");
    field(app, inv, "--phase-rel-tol", "solver", "phase_rel_tol", "phase integrator relative tolerance");
    field(app, inv, "--phase-abs-tol", "solver", "phase_abs_tol", "phase integrator absolute tolerance");
    field(app, inv, "--threads", "solver", "threads", "sweep worker threads (0 = all cores)");
}

void negative_flag(CLI::App* app, Invocation& inv) {
    app->add_flag_callback(
        "--negative", [&inv]() { inv.overrides.push_back({"geometry", "negative", "true"}); },
        "negative solution through the operator swap");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace pucci;
    CLI::App app{"Radial solutions of Henon-weighted Pucci equations"};
    app.require_subcommand(1);

    Invocation inv;
    auto* annulus = app.add_subcommand("solve-annulus", "positive (or negative) solution in an annulus");
    common(annulus, inv);
    negative_flag(annulus, inv);
    field(annulus, inv, "--boundary-tol", "solver", "boundary_tol", "required |u(outer)|");

    auto* exterior = app.add_subcommand("solve-exterior", "fast decay threshold, one shot, or a sweep");
    common(exterior, inv);
    negative_flag(exterior, inv);
    field(exterior, inv, "--mode", "exterior", "mode", "fast | delta=<value> | sweep");
    field(exterior, inv, "--sweep-lo", "exterior", "sweep_lo", "smallest swept slope");
    field(exterior, inv, "--sweep-hi", "exterior", "sweep_hi", "largest swept slope");
    field(exterior, inv, "--sweep-count", "exterior", "sweep_count", "number of log-spaced slopes");

    auto* portrait = app.add_subcommand("phase-portrait", "SVG portrait and tables of the (x, z) plane");
    common(portrait, inv);
    field(portrait, inv, "--fan", "portrait", "fan", "number of sample trajectories");
    field(portrait, inv, "--t-end", "portrait", "t_end", "time span of the sample trajectories");
    field(portrait, inv, "--manifold-t", "portrait", "manifold_t", "time span of the manifold runs");

    auto* invariants = app.add_subcommand("check-invariants", "run the property suite");
    common(invariants, inv);
    field(invariants, inv, "--budget", "invariants", "budget", "random points per sampled check");
    field(invariants, inv, "--energy-tol", "invariants", "energy_tol", "relative energy tolerance");
    field(invariants, inv, "--slow-delta", "invariants", "slow_delta", "slope of the box-check shot");
    field(invariants, inv, "--poincare-offset", "invariants", "poincare_offset", "seed offset above M0");
    field(invariants, inv, "--poincare-returns", "invariants", "poincare_returns", "section returns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : io::kExitUsage;
    }

    io::RunConfig cfg;
    cfg.out_dir.clear();
    if (exterior->parsed()) cfg.geometry = io::GeometryKind::Exterior;
    try {
        if (!inv.config_file.empty()) io::load_config(inv.config_file, cfg);
        for (const Override& o : inv.overrides) {
            try {
                io::set_field(cfg, o.section, o.key, o.value);
            } catch (const Error& e) {
                throw Error(ErrorKind::ConfigParse, std::string("command line: ") + e.what());
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return io::kExitUsage;
    }
    cfg.out_dir = io::resolve_out_dir(cfg.out_dir);

    if (annulus->parsed()) return io::cmd_solve_annulus(cfg, std::cout, std::cerr);
    if (exterior->parsed()) return io::cmd_solve_exterior(cfg, std::cout, std::cerr);
    if (portrait->parsed()) return io::cmd_phase_portrait(cfg, std::cout, std::cerr);
    return io::cmd_check_invariants(cfg, std::cout, std::cerr);
}
