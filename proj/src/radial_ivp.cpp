#include "pucci/radial_ivp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "pucci/error.hpp"
#include "pucci/ode.hpp"
#include "pucci/operators.hpp"

namespace pucci {

namespace {

constexpr std::size_t kZeroEvent = 0;
constexpr std::size_t kCriticalEvent = 1;
constexpr std::size_t kBranchEvent = 2;

void check_config(const ShootingInput& input, const IntegratorConfig& config) {
    validate(input.params);
    if (!(input.inner_radius > 0.0) || !std::isfinite(input.inner_radius)) {
        throw Error(ErrorKind::InvalidInput, "inner_radius must be positive and finite");
    }
    if (input.delta == 0.0 || !std::isfinite(input.delta)) {
        throw Error(ErrorKind::InvalidInput, "delta must be nonzero and finite");
    }
    if (!(config.rel_tol > 0.0) || !(config.abs_tol > 0.0) ||
        !(config.resolved_event_tol(input.inner_radius) > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "integrator tolerances must be positive");
    }
    if (!(config.resolved_r_max(input.inner_radius) > input.inner_radius)) {
        throw Error(ErrorKind::InvalidInput, "r_max must exceed inner_radius");
    }
    if (config.max_steps <= 0) throw Error(ErrorKind::InvalidInput, "max_steps must be positive");
}

std::size_t sample_index(const SolutionProfile& profile, double r) {
    const auto it = std::lower_bound(profile.samples.begin(), profile.samples.end(), r,
                                     [](const RadialSample& s, double v) { return s.r < v; });
    return static_cast<std::size_t>(it - profile.samples.begin());
}

// Derivative at xs[i] of the interpolating polynomial through (xs, ys).
double lagrange_derivative(std::span<const double> xs, std::span<const double> ys,
                           std::size_t i) {
    const std::size_t n = xs.size();
    double out = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double w = 0.0;
        if (j == i) {
            for (std::size_t k = 0; k < n; ++k) {
                if (k != i) w += 1.0 / (xs[i] - xs[k]);
            }
        } else {
            double num = 1.0, den = 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (k != j) den *= xs[j] - xs[k];
                if (k != i && k != j) num *= xs[i] - xs[k];
            }
            w = num / den;
        }
        out += w * ys[j];
    }
    return out;
}

}  // namespace

SolutionProfile integrate_ivp(const ShootingInput& input, const IntegratorConfig& config) {
    check_config(input, config);
    const ProblemParams& params = input.params;
    const double r0 = input.inner_radius;

    const ode::Rhs rhs = [&params](double r, const ode::Vec2& y) -> ode::Vec2 {
        return {y[1], radial_rhs(r, y[0], y[1], params)};
    };
    const std::array<ode::Event, 3> events{
        ode::Event{[](double, const ode::Vec2& y) { return y[0]; }, true},
        ode::Event{[](double, const ode::Vec2& y) { return y[1]; }, config.stop_at_tau},
        ode::Event{[&params](double r, const ode::Vec2& y) {
                       return operator_argument(r, y[0], y[1], params);
                   },
                   false},
    };

    ode::Options opt;
    opt.rel_tol = config.rel_tol;
    opt.abs_tol = config.abs_tol;
    opt.max_steps = config.max_steps;
    opt.event_tol = config.resolved_event_tol(r0);

    const ode::Result res =
        ode::integrate(rhs, r0, {0.0, input.delta}, config.resolved_r_max(r0), opt, events);

    SolutionProfile profile;
    profile.input = input;
    profile.samples.reserve(res.t.size());
    for (std::size_t i = 0; i < res.t.size(); ++i) {
        profile.samples.push_back({res.t[i], res.y[i][0], res.y[i][1]});
    }
    for (const ode::EventHit& hit : res.hits) {
        const std::size_t idx = sample_index(profile, hit.t);
        switch (hit.index) {
            case kZeroEvent:
                profile.rho = hit.t;
                profile.samples[idx].u = 0.0;
                break;
            case kCriticalEvent:
                if (!profile.tau) {
                    profile.tau = hit.t;
                    profile.samples[idx].du = 0.0;
                }
                profile.kinks.push_back(hit.t);
                break;
            case kBranchEvent:
                profile.kinks.push_back(hit.t);
                break;
            default:
                break;
        }
    }
    std::sort(profile.kinks.begin(), profile.kinks.end());
    return profile;
}

SolutionProfile rescale_profile(const SolutionProfile& profile, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw Error(ErrorKind::InvalidInput, "gamma must be positive and finite");
    }
    const double al = alpha(profile.input.params);
    const double shrink = std::pow(gamma, -1.0 / al);   // r_new = r_old * shrink
    const double slope = std::pow(gamma, 1.0 + 1.0 / al);

    SolutionProfile out;
    out.input = profile.input;
    out.input.inner_radius = profile.input.inner_radius * shrink;
    out.input.delta = profile.input.delta * slope;
    out.samples.reserve(profile.samples.size());
    for (const RadialSample& s : profile.samples) {
        out.samples.push_back({s.r * shrink, gamma * s.u, slope * s.du});
    }
    if (profile.tau) out.tau = *profile.tau * shrink;
    if (profile.rho) out.rho = *profile.rho * shrink;
    for (double k : profile.kinks) out.kinks.push_back(k * shrink);
    return out;
}

double residual_audit(const SolutionProfile& profile) {
    const auto& s = profile.samples;
    if (s.size() < 3) throw Error(ErrorKind::InvalidInput, "residual audit needs 3 samples");

    // Segment boundaries: first sample, every kink sample, last sample.
    std::vector<std::size_t> bounds{0};
    for (double k : profile.kinks) {
        const std::size_t idx = sample_index(profile, k);
        if (idx < s.size() && s[idx].r == k && idx != bounds.back()) bounds.push_back(idx);
    }
    if (bounds.back() != s.size() - 1) bounds.push_back(s.size() - 1);

    constexpr std::size_t width = 5;
    double worst = 0.0;
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        const std::size_t lo = bounds[b];
        const std::size_t hi = bounds[b + 1];
        const std::size_t len = hi - lo + 1;
        if (len < 3) continue;
        const std::size_t w = std::min(width, len);
        for (std::size_t i = lo; i <= hi; ++i) {
            if (i == 0 || i == s.size() - 1) continue;
            std::size_t start = i >= lo + w / 2 ? i - w / 2 : lo;
            start = std::min(start, hi + 1 - w);
            std::array<double, width> xs{}, ys{};
            for (std::size_t k = 0; k < w; ++k) {
                xs[k] = s[start + k].r - s[i].r;
                ys[k] = s[start + k].du;
            }
            const double d2 = lagrange_derivative(std::span<const double>(xs.data(), w),
                                                  std::span<const double>(ys.data(), w), i - start);
            const double exact = radial_rhs(s[i].r, s[i].u, s[i].du, profile.input.params);
            worst = std::max(worst, std::fabs(d2 - exact));
        }
    }
    return worst;
}

std::optional<PowerProfile> singular_power_profile(const ProblemParams& params) {
    validate(params);
    const double z0 = m0_height(params);
    if (!(z0 > 0.0)) return std::nullopt;
    return PowerProfile{std::pow(z0, 1.0 / (params.p - 1.0)), alpha(params)};
}

SolutionProfile sample_power_profile(const PowerProfile& power, const ProblemParams& params,
                                     double r_lo, double r_hi, int count) {
    if (!(r_lo > 0.0) || !(r_hi > r_lo) || count < 2) {
        throw Error(ErrorKind::InvalidInput, "power profile grid needs 0 < r_lo < r_hi, count >= 2");
    }
    SolutionProfile out;
    out.input.params = params;
    out.input.inner_radius = r_lo;
    const double step = std::log(r_hi / r_lo) / (count - 1);
    for (int i = 0; i < count; ++i) {
        const double r = i == count - 1 ? r_hi : r_lo * std::exp(step * i);
        const double u = power.coefficient * std::pow(r, -power.exponent);
        out.samples.push_back({r, u, -power.exponent * u / r});
    }
    out.input.delta = out.samples.front().du;
    return out;
}

}  // namespace pucci
