#pragma once

#include <optional>
#include <vector>

#include "pucci/params.hpp"
#include "pucci/radial_ivp.hpp"

namespace pucci {

enum class Sigma { lambda, Lambda };
enum class EnergyPhase { Increasing, Decreasing, Critical };

double sigma_value(Sigma sigma, const ProblemParams& params) noexcept;

/// ℰσ = (u')² / (2 r^a) + |u|^{p+1} / (σ (p+1)).
double small_energy(double r, double u, double uprime, double sigma, const ProblemParams& params);

/// Eσ = r^{2(Ñ₋-1)+a} ℰσ. Ñ₋ is used for both operators.
double big_energy(double r, double u, double uprime, double sigma, const ProblemParams& params);

struct EnergySample {
    double r = 0.0;
    double small_energy = 0.0;
    double big_energy = 0.0;
    Sigma sigma_small = Sigma::Lambda;  // Λ where u u' > 0, λ where u u' < 0
    Sigma sigma_big = Sigma::lambda;    // λ on [a, τ], Λ on [τ, ρ]
    EnergyPhase phase = EnergyPhase::Critical;
};

std::vector<EnergySample> energy_samples(const SolutionProfile& profile);

struct Violation {
    double relative = 0.0;  // signed-in-the-bad-direction change / local energy scale
    double r = 0.0;
};

struct MonotonicityReport {
    Violation small_energy;    // ℰ should not increase on either side of τ
    Violation big_lambda;      // E_λ should not decrease on [a, τ]
    Violation big_Lambda;      // E_Λ should not decrease on [τ, ρ]
    double tolerance = 1e-7;
    /// max over [a, τ] of a^a u^{p+1} / (p+1) divided by Λ δ² / 2 (<= 1 expected).
    double small_delta_ratio = 0.0;
    /// τ^{2(Ñ₋-1)+a} u^{p+1}(τ) divided by λ (p+1)/2 a^{2(Ñ₋-1)} δ² (>= 1 expected).
    std::optional<double> tau_growth_ratio;

    double worst() const noexcept;
    bool monotone() const noexcept { return worst() <= tolerance; }
    bool bounds_hold() const noexcept;
};

MonotonicityReport monotonicity_audit(const SolutionProfile& profile, double tolerance = 1e-7);

struct RefinementReport {
    MonotonicityReport coarse;
    MonotonicityReport fine;
    /// Worst violations at or below this count as round-off.
    double floor = 1e-12;
    /// Largest relative change of ℰ and E at τ and at ρ between the two runs.
    double energy_drift = 0.0;
    bool improves() const noexcept;
    bool converged(double tolerance = 1e-7) const noexcept { return energy_drift <= tolerance; }
};

/// Re-integrates the shot at the given tolerances and at half of them and
/// audits both. r_max in `config` bounds both runs.
RefinementReport monotonicity_refinement(const ShootingInput& input, const IntegratorConfig& config,
                                         double tolerance = 1e-7);

}  // namespace pucci
