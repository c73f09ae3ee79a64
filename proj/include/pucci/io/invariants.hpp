#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pucci/io/config.hpp"
#include "pucci/phase_plane.hpp"
#include "pucci/radial_ivp.hpp"

namespace pucci::io {

struct CheckRecord {
    std::string name;
    bool passed = false;
    /// Measured quantity and the bound it was held to (NaN when the check is boolean).
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct InvariantReport {
    std::vector<CheckRecord> checks;
    bool all_passed() const noexcept;
};

/// Worst relative mismatch of from_phase(to_phase(profile)) against the
/// profile and of to_phase(from_phase(trajectory)) against the trajectory.
double round_trip_gap(const SolutionProfile& profile);

struct CommutationResult {
    double gap = 0.0;
    std::size_t compared = 0;
    bool crossed_z_axis = false;
};

/// Integrates the phase field sample to sample from the first mapped point
/// with |x| <= x_limit and compares with the mapped ODE samples, relative to
/// max(1, |value|).
CommutationResult phase_ode_commutation(const SolutionProfile& profile, const PhaseConfig& config,
                                        double x_limit = 20.0);

/// Runs the whole property suite for `config` (problem, annulus geometry,
/// solver tolerances, budget and seed).
InvariantReport run_invariants(const RunConfig& config);

}  // namespace pucci::io
