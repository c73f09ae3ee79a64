#include "pucci/io/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pucci/energy.hpp"
#include "pucci/error.hpp"
#include "pucci/io/tables.hpp"
#include "pucci/shooting.hpp"

namespace pucci::io {

bool InvariantReport::all_passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.passed; });
}

namespace {

double rel_gap(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

}  // namespace

double round_trip_gap(const SolutionProfile& profile) {
    const PhaseTrajectory traj = to_phase(profile);
    const SolutionProfile back = from_phase(traj);
    double gap = 0.0;
    std::size_t j = 0;
    for (const RadialSample& s : profile.samples) {
        if (s.u == 0.0) continue;
        if (j >= back.samples.size()) break;
        const RadialSample& b = back.samples[j++];
        gap = std::max({gap, rel_gap(b.r, s.r), std::fabs(b.u - s.u) / std::fabs(s.u),
                        std::fabs(b.du - s.du) / std::max(std::fabs(s.du), std::fabs(s.u) / s.r)});
    }
    const PhaseTrajectory again = to_phase(back);
    for (std::size_t i = 0; i < traj.points.size() && i < again.points.size(); ++i) {
        gap = std::max({gap, rel_gap(again.points[i].x, traj.points[i].x),
                        std::fabs(again.points[i].z - traj.points[i].z) / traj.points[i].z,
                        rel_gap(again.points[i].t, traj.points[i].t)});
    }
    return gap;
}

CommutationResult phase_ode_commutation(const SolutionProfile& profile, const PhaseConfig& config,
                                        double x_limit) {
    const PhaseTrajectory mapped = to_phase(profile);
    const auto& pts = mapped.points;
    std::size_t i0 = 0;
    while (i0 < pts.size() && std::fabs(pts[i0].x) > x_limit) ++i0;
    std::size_t i1 = i0;
    while (i1 + 1 < pts.size() && std::fabs(pts[i1 + 1].x) <= x_limit) ++i1;

    CommutationResult out;
    if (i0 >= pts.size()) return out;
    PhaseConfig cfg = config;
    cfg.stop_at = {false, false, false};
    cfg.x_escape = std::max(cfg.x_escape, 1e3 * x_limit);
    PhasePoint state = pts[i0];
    for (std::size_t k = i0 + 1; k <= i1; ++k) {
        const PhaseRun run = integrate_phase(profile.input.params, state, pts[k].t, cfg);
        state = run.trajectory.points.back();
        if (state.t != pts[k].t) {
            out.gap = std::numeric_limits<double>::infinity();
            return out;
        }
        out.gap = std::max({out.gap, rel_gap(state.x, pts[k].x), rel_gap(state.z, pts[k].z)});
        ++out.compared;
        if ((pts[k - 1].x < 0.0) != (pts[k].x < 0.0) || pts[k].x == 0.0) out.crossed_z_axis = true;
    }
    return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void add(InvariantReport& rep, std::string name, bool passed, double value, double threshold,
         std::string detail) {
    rep.checks.push_back({std::move(name), passed, value, threshold, std::move(detail)});
}

std::string describe(const BoundReport& b) {
    std::ostringstream out;
    out << b.checked << " checked, " << b.violations << " violations";
    if (b.worst_point) {
        out << ", worst at (" << format_number(b.worst_point->x) << ", " << format_number(b.worst_point->z)
            << ")";
    }
    for (const std::string& n : b.notes) out << "; " << n;
    return out.str();
}

}  // namespace

InvariantReport run_invariants(const RunConfig& config) {
    const ProblemParams& params = config.problem;
    validate(params);
    InvariantReport rep;
    std::mt19937_64 rng(config.seed);

    const Geometry geo = geometry(params);
    const double z0 = m0_height(params);
    const double x_span = 2.0 * std::max({geo.box_x, geo.pi2_x, 1.0});
    const double z_span = 2.0 * std::max({geo.box_z, z0, 1.0});

    {
        std::uniform_real_distribution<double> ux(0.0, x_span), uz(0.0, z_span);
        double worst = 0.0;
        for (std::size_t i = 0; i < config.budget; ++i) {
            const double x = ux(rng), z = uz(rng);
            const auto a = vector_field(x, z, params);
            const auto b = vector_field_branch(x, z, params);
            const double scale = 1.0 + x * x + z;
            worst = std::max({worst, std::fabs(a[0] - b[0]) / scale, std::fabs(a[1] - b[1]) / scale});
        }
        add(rep, "field_consistency", worst <= 1e-13, worst, 1e-13,
            std::to_string(config.budget) + " random first-quadrant points");
    }

    {
        double worst = 0.0;
        bool signs_ok = true;
        std::ostringstream detail;
        for (const StationaryPoint& sp : stationary_points(params)) {
            if (!sp.in_closed_first_quadrant) continue;
            const auto f = vector_field(sp.x, sp.z, params);
            worst = std::max({worst, std::fabs(f[0]), std::fabs(f[1])});
            const auto ev = eigenvalues_2x2(numeric_jacobian(sp.x, sp.z, params, 1e-6));
            const Stability numeric = classify_by_signs(ev, 1e-6);
            if (numeric != sp.classification) signs_ok = false;
            detail << to_string(sp.name) << ' ' << to_string(sp.classification) << '/' << to_string(numeric)
                   << "; ";
        }
        add(rep, "stationarity", worst < 1e-12, worst, 1e-12, "largest |field| at O, A0, M0");
        add(rep, "jacobian_signs", signs_ok, kNaN, kNaN, "analytic/numeric: " + detail.str());
    }

    {
        const BoundReport flow = flow_direction_audit(params, config.budget, config.seed);
        add(rep, "flow_directions", flow.ok(), static_cast<double>(flow.violations), 0.0, describe(flow));
    }

    {
        std::uniform_real_distribution<double> ux(-10.0 * x_span, 0.0), uz(0.0, z_span);
        std::size_t bad = 0;
        for (std::size_t i = 0; i < config.budget; ++i) {
            double x = ux(rng);
            if (x == 0.0) x = -x_span;
            const double z = uz(rng);
            const auto f = vector_field(x, z, params);
            if (!(f[0] > 0.0) || (z > 0.0 && !(f[1] > 0.0))) ++bad;
        }
        add(rep, "second_quadrant_signs", bad == 0, static_cast<double>(bad), 0.0,
            std::to_string(config.budget) + " random second-quadrant points");
    }

    SolveReport solved;
    bool have_profile = false;
    try {
        solved = solve_annulus({params, config.inner, config.outer, config.boundary_tol}, config.solver);
        have_profile = true;
        add(rep, "annulus_solve",
            solved.boundary_residual < config.boundary_tol && solved.interior_positive && solved.unique_maximum,
            solved.boundary_residual, config.boundary_tol,
            "delta=" + format_number(solved.found_delta) +
                (solved.interior_positive ? "" : ", positivity violated") +
                (solved.unique_maximum ? "" : ", maximum not unique"));
    } catch (const Error& e) {
        add(rep, "annulus_solve", false, kNaN, config.boundary_tol, e.what());
    }

    if (have_profile) {
        const SolutionProfile& prof = solved.profile;
        const MonotonicityReport mono = monotonicity_audit(prof, config.energy_tol);
        add(rep, "energy_monotonicity", mono.monotone(), mono.worst(), config.energy_tol,
            "worst relative violation (small energy, E_lambda, E_Lambda)");
        std::ostringstream b;
        b << "small-delta ratio " << format_number(mono.small_delta_ratio) << " (<= 1), tau growth ratio "
          << (mono.tau_growth_ratio ? format_number(*mono.tau_growth_ratio) : "n/a") << " (>= 1)";
        add(rep, "energy_bounds", mono.bounds_hold(), mono.small_delta_ratio, 1.0, b.str());

        IntegratorConfig ic = config.solver.integrator;
        ic.r_max = 2.0 * config.outer;
        const RefinementReport ref =
            monotonicity_refinement({params, config.inner, solved.found_delta}, ic, config.energy_tol);
        std::ostringstream r;
        r << "coarse " << format_number(ref.coarse.worst()) << ", fine " << format_number(ref.fine.worst())
          << ", energy drift " << format_number(ref.energy_drift);
        add(rep, "energy_refinement", ref.improves() && ref.converged(config.energy_tol), ref.energy_drift,
            config.energy_tol, r.str());

        const double rt = round_trip_gap(prof);
        add(rep, "phase_round_trip", rt < 1e-8, rt, 1e-8, "to_phase/from_phase on the solved profile");

        const CommutationResult cm = phase_ode_commutation(prof, config.solver.phase);
        add(rep, "phase_ode_commutation", cm.gap < 1e-6 && cm.crossed_z_axis && cm.compared > 0, cm.gap, 1e-6,
            std::to_string(cm.compared) + " samples" + (cm.crossed_z_axis ? ", crosses x=0" : ", no x=0 crossing"));

        BoundReport total = blowup_bound_2Q(to_phase(prof));
        for (int k = 1; k <= 5; ++k) {
            const PhasePoint seed{0.0, geo.box_z * k / 3.0, 0.0};
            const PhaseRun back = integrate_phase(params, seed, -40.0, config.solver.phase);
            const BoundReport b2 = blowup_bound_2Q(back.trajectory);
            total.checked += b2.checked;
            total.violations += b2.violations;
            if (b2.worst_excess > total.worst_excess) {
                total.worst_excess = b2.worst_excess;
                total.worst_point = b2.worst_point;
            }
        }
        add(rep, "blowup_bound_2Q", total.ok(), static_cast<double>(total.violations), 0.0, describe(total));
    }

    {
        try {
            const DecayAnalysis shot = analyze_decay(params, config.inner, config.slow_delta, config.solver);
            const BoxReport box = apriori_box_check(shot.trajectory, params);
            const bool global = shot.decay == DecayClass::Slow || shot.decay == DecayClass::Fast ||
                                shot.decay == DecayClass::PseudoSlow;
            std::string detail = "delta=" + format_number(config.slow_delta) + " is " +
                                 std::string(to_string(shot.decay)) + (box.inside ? ", inside" : ", leaves") +
                                 " the box";
            if (global) {
                add(rep, "apriori_box", box.inside, box.max_x, geo.box_x, detail);
            } else if (shot.decay == DecayClass::Annular) {
                add(rep, "apriori_box", !box.inside, box.max_x, geo.box_x, detail + " (blows up, expected)");
            } else {
                add(rep, "apriori_box", false, box.max_x, geo.box_x, detail);
            }
        } catch (const Error& e) {
            add(rep, "apriori_box", false, kNaN, geo.box_x, e.what());
        }
    }

    if (z0 > 0.0) {
        const StationaryPoint m0 = stationary_point(StationaryName::M0, params);
        const PoincareReport pr =
            poincare_return(params, z0 * (1.0 + config.poincare_offset), config.poincare_returns);
        std::ostringstream d;
        d << "M0 " << to_string(m0.classification) << ", " << pr.returns.size() << " returns";
        switch (m0.classification) {
            case Stability::Center: {
                const double gap = pr.returns.empty() ? kNaN : std::fabs(pr.returns.front() - pr.seed_z);
                add(rep, "poincare_return", !pr.returns.empty() && gap < 1e-5, gap, 1e-5, d.str());
                break;
            }
            case Stability::Source:
                add(rep, "poincare_return", !pr.budget_exhausted && pr.strictly_increasing(), kNaN, kNaN,
                    d.str() + ", distances must grow");
                break;
            case Stability::Sink:
                add(rep, "poincare_return", !pr.budget_exhausted && pr.strictly_decreasing(), kNaN, kNaN,
                    d.str() + ", distances must shrink");
                break;
            default:
                break;
        }
    }
    return rep;
}

}  // namespace pucci::io
