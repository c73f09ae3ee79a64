#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "pucci/params.hpp"
#include "pucci/shooting.hpp"

namespace pucci::io {

enum class GeometryKind { Annulus, Exterior };

/// Everything a command needs. Defaults describe the reference case
/// λ=1, Λ=1.5, N=4, p=4, a=0 with the Plus operator on (1, 2).
struct RunConfig {
    ProblemParams problem{1.0, 1.5, 4, 4.0, 0.0, Operator::Plus};

    GeometryKind geometry = GeometryKind::Annulus;
    double inner = 1.0;
    double outer = 2.0;
    double exterior_R = 1.0;
    bool negative = false;

    SolverConfig solver;
    double boundary_tol = 1e-8;

    /// "fast", "sweep" or "delta=<value>".
    std::string mode = "fast";
    double sweep_lo = 1e-4;
    double sweep_hi = 1e4;
    int sweep_count = 200;

    int fan = 12;
    double portrait_t = 40.0;
    /// Backward time for Υp and forward time for Γp.
    double manifold_t = 60.0;

    std::size_t budget = 10'000;
    std::uint64_t seed = 1;
    double energy_tol = 1e-7;
    /// Relative offset of the Poincaré seed above M0.
    double poincare_offset = 1e-4;
    int poincare_returns = 5;
    /// Slope of the globally defined exterior shot used for the box check.
    double slow_delta = 1e-3;

    std::filesystem::path out_dir = "pucci_out";
};

/// Parses a sectioned key = value document into `config`, overwriting only
/// the keys present. `source` names the document in error messages, which
/// take the form "<source>:<line>: <problem>". Throws Error(ConfigParse).
void parse_config(std::string_view text, const std::string& source, RunConfig& config);
void load_config(const std::filesystem::path& path, RunConfig& config);

/// Sets one key ("section.key") from its textual value; throws Error(ConfigParse)
/// naming the field.
void set_field(RunConfig& config, const std::string& section, const std::string& key,
               const std::string& value);

/// Checks cross-field constraints (geometry, budgets, mode syntax).
void check(const RunConfig& config);

/// Output directory: explicit value, else $PUCCI_OUT_DIR, else the built-in default.
std::filesystem::path resolve_out_dir(const std::filesystem::path& explicit_dir);

}  // namespace pucci::io
