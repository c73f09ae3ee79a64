#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pucci/params.hpp"
#include "pucci/phase_plane.hpp"
#include "pucci/radial_ivp.hpp"

namespace pucci {

enum class DecayClass { Fast, Slow, PseudoSlow, Annular, Undetermined };
std::string_view to_string(DecayClass decay) noexcept;

struct AnnulusRequest {
    ProblemParams params;
    double inner = 1.0;
    double outer = 2.0;
    double boundary_tol = 1e-8;
};

struct SolverConfig {
    IntegratorConfig integrator;
    PhaseConfig phase;
    /// Shooting slopes are searched inside [delta_min, delta_max].
    double delta_min = 1e-8;
    double delta_max = 1e8;
    double expansion = 4.0;
    /// Relative bracket width at which the fast-decay bisection stops.
    double delta_rel_tol = 1e-11;
    int max_bisections = 400;
    /// Annulus mode integrates the bracket history up to this multiple of the outer radius.
    double annulus_rmax_factor = 1e3;
    /// Phase-time budget past ln R when deciding the fate of an exterior shot.
    double t_budget = 400.0;
    /// Exterior shots are observed on [R, 10^observe_decades R]. When set,
    /// classification stops at the window end and reports Fast if the
    /// trajectory sits within fast_tol of A0 there.
    std::optional<double> observe_decades;
    double fast_tol = 1e-3;
    int pseudo_crossings = 5;
    double pseudo_amplitude = 1e-6;
    /// Decay exponents are fitted over [10^fit_lo_decades R, 10^fit_hi_decades R].
    double fit_lo_decades = 2.0;
    double fit_hi_decades = 4.0;
    /// Worker threads for sweeps (0 = hardware concurrency).
    unsigned threads = 0;
};

struct BracketStep {
    double delta = 0.0;
    std::optional<double> rho;  // empty = unbounded at the truncation radius
};

struct SolveReport {
    double found_delta = 0.0;
    double boundary_residual = 0.0;
    SolutionProfile profile;
    DecayClass decay = DecayClass::Undetermined;
    std::vector<BracketStep> bracket_history;
    std::vector<std::string> diagnostics;
    /// Solution of the original problem obtained by the operator swap.
    bool negative = false;
    /// Annulus mode: |u| > 0 strictly inside and a single critical point.
    bool interior_positive = false;
    bool unique_maximum = false;
    std::optional<double> bracket_lo;
    std::optional<double> bracket_hi;
    std::optional<double> fit_exponent;
    std::optional<double> expected_exponent;
    /// Phase trajectory of the found shot (exterior mode).
    std::optional<PhaseTrajectory> phase;
    /// Distance from the phase trajectory at the window end to the computed Υp.
    std::optional<double> distance_to_stable_manifold;
};

/// First zero of the shot; empty when u stays positive up to the truncation radius.
std::optional<double> rho_of_delta(const ProblemParams& params, double inner, double delta,
                                   const IntegratorConfig& config = {});

SolveReport solve_annulus(const AnnulusRequest& request, const SolverConfig& config = {});

struct DecayAnalysis {
    DecayClass decay = DecayClass::Undetermined;
    /// True when x blew up within the whole budget (finite first zero).
    bool eventually_annular = false;
    std::optional<double> tau;
    /// First zero, from the blow-up of x: ρ ≈ r (1 + 1/x).
    std::optional<double> rho_estimate;
    PhaseTrajectory trajectory;
    int section_crossings = 0;
    double tail_x_amplitude = 0.0;
    /// Distance to A0 at the end of the observation window, when one is set.
    std::optional<double> window_distance_A0;
    std::string note;
};

/// Shoots from (R, 0, delta), integrates radially to τ, then follows the
/// phase trajectory from the z axis.
DecayAnalysis analyze_decay(const ProblemParams& params, double R, double delta,
                            const SolverConfig& config = {});
DecayClass classify_decay(const ProblemParams& params, double R, double delta,
                          const SolverConfig& config = {});

/// Bisection between Annular shots and the unbounded regime. Throws
/// NoTransitionFound when the search range shows only one regime.
SolveReport find_fast_decay_delta(const ProblemParams& params, double R,
                                  const SolverConfig& config = {});

struct DRow {
    double delta = 0.0;
    std::optional<double> rho;
    DecayClass decay = DecayClass::Undetermined;
    bool failed = false;
    std::string error;
};

struct DExploration {
    std::vector<DRow> rows;
    /// Maximal runs of Annular grid points, as (first δ, last δ).
    std::vector<std::pair<double, double>> annular_components;
    /// Smallest grid point of the unbounded Annular component.
    std::optional<double> delta_star_grid;
    std::optional<double> delta_star_refined;
};

/// Tabulates ρδ and the decay class over a strictly increasing positive grid.
/// Rows run in parallel; the output order follows the grid.
DExploration explore_D(const ProblemParams& params, double inner,
                       const std::vector<double>& delta_grid, const SolverConfig& config = {},
                       bool refine = true);

/// u -> -u, with the operator swapped back.
SolutionProfile negate_profile(const SolutionProfile& profile);

/// Negative solution of the request's problem through the Plus/Minus swap.
SolveReport solve_negative_annulus(const AnnulusRequest& request, const SolverConfig& config = {});
SolveReport solve_negative_exterior(const ProblemParams& params, double R,
                                    const SolverConfig& config = {});

/// Least-squares slope of ln|u| against ln r over samples in [r_lo, r_hi].
double fit_log_slope(const SolutionProfile& profile, double r_lo, double r_hi);

/// Same fit on a phase trajectory, with ln u = (ln z - (2+a) t) / (p - 1).
double fit_log_slope(const PhaseTrajectory& trajectory, double t_lo, double t_hi);

struct PStarScan {
    std::vector<std::pair<double, bool>> rows;  // (p, fast decay found)
    /// Smallest scanned p from which every larger scanned p succeeds.
    std::optional<double> p_star_upper;
};

/// Scans find_fast_decay_delta over a p grid.
PStarScan estimate_p_star(const ProblemParams& params, double R, const std::vector<double>& p_grid,
                          const SolverConfig& config = {});

}  // namespace pucci
