#include "pucci/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pucci/error.hpp"

namespace pucci {

double sigma_value(Sigma sigma, const ProblemParams& params) noexcept {
    return sigma == Sigma::lambda ? params.lambda : params.Lambda;
}

double small_energy(double r, double u, double uprime, double sigma, const ProblemParams& params) {
    if (!(r > 0.0) || !(sigma > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "small_energy needs r > 0 and sigma > 0");
    }
    const double kinetic = uprime * uprime / (2.0 * std::pow(r, params.a));
    return kinetic + std::pow(std::fabs(u), params.p + 1.0) / (sigma * (params.p + 1.0));
}

double big_energy(double r, double u, double uprime, double sigma, const ProblemParams& params) {
    const double k = 2.0 * (ntilde_minus(params) - 1.0) + params.a;
    return std::pow(r, k) * small_energy(r, u, uprime, sigma, params);
}

namespace {

std::size_t tau_index(const SolutionProfile& profile) {
    const auto& s = profile.samples;
    if (!profile.tau) return s.size() - 1;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].r == *profile.tau) return i;
    }
    // Not on the grid: last sample before τ.
    std::size_t i = 0;
    while (i + 1 < s.size() && s[i + 1].r < *profile.tau) ++i;
    return i;
}

void track(Violation& v, double before, double after, double r) {
    const double scale = std::max({std::fabs(before), std::fabs(after),
                                   std::numeric_limits<double>::min()});
    const double rel = (after - before) / scale;
    if (rel > v.relative) {
        v.relative = rel;
        v.r = r;
    }
}

}  // namespace

std::vector<EnergySample> energy_samples(const SolutionProfile& profile) {
    const ProblemParams& params = profile.input.params;
    const std::size_t it = tau_index(profile);
    std::vector<EnergySample> out;
    out.reserve(profile.samples.size());
    for (std::size_t i = 0; i < profile.samples.size(); ++i) {
        const RadialSample& s = profile.samples[i];
        EnergySample e;
        e.r = s.r;
        const double prod = s.u * s.du;
        e.phase = prod > 0.0 ? EnergyPhase::Increasing
                             : (prod < 0.0 ? EnergyPhase::Decreasing : EnergyPhase::Critical);
        e.sigma_small = prod > 0.0 || (prod == 0.0 && i < it) ? Sigma::Lambda : Sigma::lambda;
        e.sigma_big = i <= it ? Sigma::lambda : Sigma::Lambda;
        e.small_energy = small_energy(s.r, s.u, s.du, sigma_value(e.sigma_small, params), params);
        e.big_energy = big_energy(s.r, s.u, s.du, sigma_value(e.sigma_big, params), params);
        out.push_back(e);
    }
    return out;
}

double MonotonicityReport::worst() const noexcept {
    return std::max({small_energy.relative, big_lambda.relative, big_Lambda.relative});
}

bool MonotonicityReport::bounds_hold() const noexcept {
    return small_delta_ratio <= 1.0 + 1e-9 && (!tau_growth_ratio || *tau_growth_ratio >= 1.0 - 1e-9);
}

MonotonicityReport monotonicity_audit(const SolutionProfile& profile, double tolerance) {
    const auto& s = profile.samples;
    if (s.size() < 2) throw Error(ErrorKind::InvalidInput, "monotonicity audit needs 2 samples");
    const ProblemParams& params = profile.input.params;
    const double lam = params.lambda;
    const double Lam = params.Lambda;
    const std::size_t it = tau_index(profile);

    MonotonicityReport rep;
    rep.tolerance = tolerance;
    auto E = [&](std::size_t i, double sigma) {
        return small_energy(s[i].r, s[i].u, s[i].du, sigma, params);
    };
    auto B = [&](std::size_t i, double sigma) {
        return big_energy(s[i].r, s[i].u, s[i].du, sigma, params);
    };
    // τ closes the left pieces and opens the right ones, with each piece's σ.
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (i < it) {
            track(rep.small_energy, E(i, Lam), E(i + 1, Lam), s[i + 1].r);
            track(rep.big_lambda, -B(i, lam), -B(i + 1, lam), s[i + 1].r);
        } else {
            track(rep.small_energy, E(i, lam), E(i + 1, lam), s[i + 1].r);
            track(rep.big_Lambda, -B(i, Lam), -B(i + 1, Lam), s[i + 1].r);
        }
    }

    const double a0 = profile.input.inner_radius;
    const double d2 = profile.input.delta * profile.input.delta;
    const double rhs_small = Lam * d2 / 2.0;
    for (std::size_t i = 0; i <= it && i < s.size(); ++i) {
        const double lhs = std::pow(a0, params.a) / (params.p + 1.0) *
                           std::pow(std::fabs(s[i].u), params.p + 1.0);
        rep.small_delta_ratio = std::max(rep.small_delta_ratio, lhs / rhs_small);
    }
    if (profile.tau) {
        const double k = 2.0 * (ntilde_minus(params) - 1.0);
        const double lhs = std::pow(s[it].r, k + params.a) *
                           std::pow(std::fabs(s[it].u), params.p + 1.0);
        const double rhs = lam * (params.p + 1.0) / 2.0 * std::pow(a0, k) * d2;
        rep.tau_growth_ratio = lhs / rhs;
    }
    return rep;
}

namespace {

const RadialSample& at_radius(const SolutionProfile& profile, double r) {
    const auto& s = profile.samples;
    auto it = std::lower_bound(s.begin(), s.end(), r,
                               [](const RadialSample& x, double v) { return x.r < v; });
    if (it == s.end()) --it;
    return *it;
}

}  // namespace

bool RefinementReport::improves() const noexcept {
    const double c = coarse.worst();
    const double f = fine.worst();
    return f <= c || (f <= floor && c <= floor);
}

RefinementReport monotonicity_refinement(const ShootingInput& input, const IntegratorConfig& config,
                                         double tolerance) {
    RefinementReport rep;
    const SolutionProfile a = integrate_ivp(input, config);
    IntegratorConfig fine = config;
    fine.rel_tol *= 0.5;
    fine.abs_tol *= 0.5;
    const SolutionProfile b = integrate_ivp(input, fine);
    rep.coarse = monotonicity_audit(a, tolerance);
    rep.fine = monotonicity_audit(b, tolerance);

    // Both energies at the marked radii; the samples sit exactly on them.
    const ProblemParams& params = input.params;
    auto drift = [&](double ra, double rb) {
        const RadialSample& x = at_radius(a, ra);
        const RadialSample& y = at_radius(b, rb);
        for (double sigma : {params.lambda, params.Lambda}) {
            const double e1 = small_energy(x.r, x.u, x.du, sigma, params);
            const double e2 = small_energy(y.r, y.u, y.du, sigma, params);
            const double b1 = big_energy(x.r, x.u, x.du, sigma, params);
            const double b2 = big_energy(y.r, y.u, y.du, sigma, params);
            rep.energy_drift = std::max(rep.energy_drift, std::fabs(e1 - e2) / std::max(std::fabs(e2), 1e-300));
            rep.energy_drift = std::max(rep.energy_drift, std::fabs(b1 - b2) / std::max(std::fabs(b2), 1e-300));
        }
    };
    if (a.tau && b.tau) drift(*a.tau, *b.tau);
    if (a.rho && b.rho) drift(*a.rho, *b.rho);
    if (a.tau.has_value() != b.tau.has_value() || a.rho.has_value() != b.rho.has_value()) {
        rep.energy_drift = std::numeric_limits<double>::infinity();
    }
    return rep;
}

}  // namespace pucci
