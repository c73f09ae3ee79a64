#pragma once

#include <optional>
#include <vector>

#include "pucci/params.hpp"

namespace pucci {

/// Shooting data: u(inner_radius) = 0, u'(inner_radius) = delta.
struct ShootingInput {
    ProblemParams params;
    double inner_radius = 1.0;
    double delta = 1.0;
};

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    /// Truncation radius; unset means 1e6 * inner_radius.
    std::optional<double> r_max;
    long max_steps = 5'000'000;
    /// Event localization tolerance in r; unset means 1e-12 * inner_radius.
    std::optional<double> event_tol;
    /// Stop at the first critical point instead of running to the first zero.
    bool stop_at_tau = false;

    double resolved_r_max(double inner_radius) const { return r_max.value_or(1e6 * inner_radius); }
    double resolved_event_tol(double inner_radius) const {
        return event_tol.value_or(1e-12 * inner_radius);
    }
};

struct RadialSample {
    double r = 0.0;
    double u = 0.0;
    double du = 0.0;
};

/// A sampled shot solution on [inner_radius, rho) (or up to r_max).
struct SolutionProfile {
    std::vector<RadialSample> samples;
    /// First critical radius (u' = 0).
    std::optional<double> tau;
    /// First zero; empty means the solution stayed positive up to r_max.
    std::optional<double> rho;
    ShootingInput input;
    /// Radii where the right-hand side is non-smooth (u' = 0 or operator
    /// branch switch). Samples exist at each of them.
    std::vector<double> kinks;

    bool unbounded() const noexcept { return !rho.has_value(); }
    double r_end() const noexcept { return samples.empty() ? 0.0 : samples.back().r; }
};

/// Integrates u'' = M±(-(N-1) m±(u')/r - r^a |u|^{p-1} u) from the shooting
/// data, locating tau and rho. Stops at rho, at tau when requested, or at r_max.
SolutionProfile integrate_ivp(const ShootingInput& input, const IntegratorConfig& config = {});

/// u_γ(r) = γ u(γ^{1/α} r) sampled on the mapped grid. The result solves the
/// same shooting problem with inner radius a γ^{-1/α} and slope γ^{1+1/α} δ.
SolutionProfile rescale_profile(const SolutionProfile& profile, double gamma);

/// Largest |u''_numeric - radial_rhs(r, u, u')| over interior samples, with
/// u''_numeric obtained by differentiating a local polynomial through the
/// sampled u' values. Stencils never straddle a kink.
double residual_audit(const SolutionProfile& profile);

/// u = coefficient * r^{-exponent}.
struct PowerProfile {
    double coefficient = 0.0;
    double exponent = 0.0;
};

/// The power law r ↦ z0^{1/(p-1)} r^{-α} that corresponds to the stationary
/// point M0; empty when z0 <= 0.
std::optional<PowerProfile> singular_power_profile(const ProblemParams& params);

/// Samples a power profile on a log-spaced grid over [r_lo, r_hi].
SolutionProfile sample_power_profile(const PowerProfile& power, const ProblemParams& params,
                                     double r_lo, double r_hi, int count);

}  // namespace pucci
