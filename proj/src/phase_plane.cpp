#include "pucci/phase_plane.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pucci/error.hpp"
#include "pucci/ode.hpp"
#include "pucci/operators.hpp"

namespace pucci {

Quadrant quadrant_of(double x) noexcept {
    if (x > 0.0) return Quadrant::First;
    if (x < 0.0) return Quadrant::Second;
    return Quadrant::Axis;
}

Region region_of(double x, double z, const ProblemParams& params) noexcept {
    if (x < 0.0) return Region::SecondQuadrant;
    if (x == 0.0) return Region::ZAxis;
    const double line = concave_weight(params) * (params.N - 1) * x;
    if (z > line) return Region::Concave;
    if (z < line) return Region::Convex;
    return Region::OnLine;
}

std::string_view to_string(Region region) noexcept {
    switch (region) {
        case Region::Concave: return "R+";
        case Region::Convex: return "R-";
        case Region::OnLine: return "ell";
        case Region::SecondQuadrant: return "2Q";
        case Region::ZAxis: return "z-axis";
    }
    return "?";
}

std::string_view to_string(StationaryName name) noexcept {
    switch (name) {
        case StationaryName::O: return "O";
        case StationaryName::A0: return "A0";
        case StationaryName::M0: return "M0";
    }
    return "?";
}

std::string_view to_string(Termination termination) noexcept {
    switch (termination) {
        case Termination::None: return "none";
        case Termination::ConvergedToStationary: return "converged";
        case Termination::BlowupBackward2Q: return "blowup_backward_2q";
        case Termination::BlowupForwardX: return "blowup_forward_x";
        case Termination::SectionBudget: return "section_budget";
        case Termination::HorizonReached: return "horizon";
    }
    return "?";
}

std::string_view to_string(Stability stability) noexcept {
    switch (stability) {
        case Stability::Saddle: return "Saddle";
        case Stability::Source: return "Source";
        case Stability::Sink: return "Sink";
        case Stability::Center: return "Center";
        case Stability::Degenerate: return "Degenerate";
    }
    return "?";
}

std::array<double, 2> vector_field(double x, double z, const ProblemParams& params) noexcept {
    const double arg = -(params.N - 1) * lipschitz_m(-x, params) - z;
    const double xdot = x * (x + 1.0) - lipschitz_M(arg, params);
    const double zdot = z * (x + 2.0 + params.a - params.p * x);
    return {xdot, zdot};
}

std::array<double, 2> vector_field(const PhasePoint& point, const ProblemParams& params) noexcept {
    return vector_field(point.x, point.z, params);
}

namespace {

struct Branch {
    double dim;
    double weight;
};

Branch branch_for(Region region, const ProblemParams& params) noexcept {
    switch (region) {
        case Region::SecondQuadrant:
            return {increasing_dimension(params), concave_weight(params)};
        case Region::Convex:
            return {effective_dimension(params), convex_weight(params)};
        default:
            return {static_cast<double>(params.N), concave_weight(params)};
    }
}

}  // namespace

std::array<double, 2> vector_field_branch(double x, double z, const ProblemParams& params) noexcept {
    const Branch b = branch_for(region_of(x, z, params), params);
    return {x * (x - b.dim + 2.0) + z / b.weight, z * (x + 2.0 + params.a - params.p * x)};
}

std::array<std::array<double, 2>, 2> branch_jacobian(double x, double z, Region region,
                                                     const ProblemParams& params) noexcept {
    const Branch b = branch_for(region, params);
    return {{{2.0 * x - b.dim + 2.0, 1.0 / b.weight},
             {z * (1.0 - params.p), x + 2.0 + params.a - params.p * x}}};
}

double unstable_slope_O(const ProblemParams& params) noexcept {
    return concave_weight(params) * (params.N + params.a);
}

double stable_slope_A0(const ProblemParams& params) noexcept {
    return convex_weight(params) *
           ((effective_dimension(params) - 2.0) * params.p - (2.0 + params.a));
}

namespace {

constexpr double kLabelTol = 1e-9;

}  // namespace

std::array<std::complex<double>, 2> eigenvalues_2x2(const std::array<std::array<double, 2>, 2>& j) {
    const double tr = j[0][0] + j[1][1];
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        // Stable form for the smaller-magnitude root.
        const double big = tr >= 0.0 ? 0.5 * (tr + s) : 0.5 * (tr - s);
        const double small = big != 0.0 ? det / big : 0.0;
        std::array<std::complex<double>, 2> out{std::complex<double>(std::min(big, small)),
                                                std::complex<double>(std::max(big, small))};
        return out;
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(0.5 * tr, -im), std::complex<double>(0.5 * tr, im)};
}

std::array<std::array<double, 2>, 2> numeric_jacobian(double x, double z, const ProblemParams& params,
                                                      double h) {
    const auto fxp = vector_field(x + h, z, params);
    const auto fxm = vector_field(x - h, z, params);
    const auto fzp = vector_field(x, z + h, params);
    const auto fzm = vector_field(x, z - h, params);
    return {{{(fxp[0] - fxm[0]) / (2.0 * h), (fzp[0] - fzm[0]) / (2.0 * h)},
             {(fxp[1] - fxm[1]) / (2.0 * h), (fzp[1] - fzm[1]) / (2.0 * h)}}};
}

Stability classify_by_signs(const std::array<std::complex<double>, 2>& ev, double tol) {
    const double r0 = ev[0].real();
    const double r1 = ev[1].real();
    if (std::fabs(r0) <= tol || std::fabs(r1) <= tol) {
        return ev[0].imag() != 0.0 && std::fabs(r0) <= tol ? Stability::Center : Stability::Degenerate;
    }
    if ((r0 < 0.0) != (r1 < 0.0)) return Stability::Saddle;
    return r0 > 0.0 ? Stability::Source : Stability::Sink;
}

StationaryPoint stationary_point(StationaryName name, const ProblemParams& params) {
    validate(params);
    const DerivedExponents ex = derive_exponents(params);
    const double nt = effective_dimension(params);
    StationaryPoint sp;
    sp.name = name;
    switch (name) {
        case StationaryName::O: {
            sp.eigenvalues = {std::complex<double>(2.0 - nt), std::complex<double>(2.0 + params.a)};
            sp.classification = Stability::Saddle;
            sp.directions = {0.0, unstable_slope_O(params)};
            break;
        }
        case StationaryName::A0: {
            sp.x = nt - 2.0;
            const double mu = 2.0 + params.a - (params.p - 1.0) * (nt - 2.0);
            sp.eigenvalues = {std::complex<double>(mu), std::complex<double>(nt - 2.0)};
            sp.directions = {-stable_slope_A0(params), 0.0};
            if (std::fabs(params.p - ex.p_serrin) <= kLabelTol) {
                sp.classification = Stability::Degenerate;
            } else {
                sp.classification = mu < 0.0 ? Stability::Saddle : Stability::Source;
            }
            break;
        }
        case StationaryName::M0: {
            sp.x = ex.alpha;
            sp.z = m0_height(params);
            sp.in_closed_first_quadrant = sp.z >= 0.0;
            const auto j = branch_jacobian(sp.x, sp.z, Region::Convex, params);
            sp.eigenvalues = eigenvalues_2x2(j);
            const double tr = j[0][0] + j[1][1];
            const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if (std::fabs(params.p - ex.p_serrin) <= kLabelTol) {
                sp.classification = Stability::Degenerate;
            } else if (std::fabs(params.p - ex.p_pseudo) <= kLabelTol) {
                sp.classification = Stability::Center;
            } else if (det < 0.0) {
                sp.classification = Stability::Saddle;
            } else {
                sp.classification = tr > 0.0 ? Stability::Source : Stability::Sink;
            }
            for (const auto& ev : sp.eigenvalues) {
                if (ev.imag() == 0.0 && j[0][1] != 0.0) {
                    sp.directions.push_back((ev.real() - j[0][0]) / j[0][1]);
                }
            }
            break;
        }
    }
    return sp;
}

std::vector<StationaryPoint> stationary_points(const ProblemParams& params) {
    return {stationary_point(StationaryName::O, params),
            stationary_point(StationaryName::A0, params),
            stationary_point(StationaryName::M0, params)};
}

Geometry geometry(const ProblemParams& params) {
    validate(params);
    Geometry g;
    const double nt = effective_dimension(params);
    const double sc = convex_weight(params);
    g.ell_slope = concave_weight(params) * (params.N - 1);
    g.pi1_linear = sc * (nt - 2.0);
    g.pi1_quadratic = sc;
    g.pi2_x = alpha(params);
    g.tangency_x = (1.0 + params.a) / params.p;
    g.tangency_z = g.tangency_x * g.ell_slope;
    g.box_x = nt - 2.0;
    g.box_z = concave_weight(params) * alpha(params) * (params.N + params.a);
    return g;
}

PhaseTrajectory to_phase(const SolutionProfile& profile) {
    const ProblemParams& params = profile.input.params;
    PhaseTrajectory out;
    out.params = params;
    const auto& s = profile.samples;
    out.points.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].u == 0.0 && (i == 0 || i + 1 == s.size())) continue;
        if (!(s[i].u > 0.0)) {
            std::ostringstream msg;
            msg << "to_phase: u <= 0 at r=" << s[i].r;
            throw Error(ErrorKind::InvalidInput, msg.str());
        }
        const double r = s[i].r;
        out.points.push_back({-r * s[i].du / s[i].u,
                              std::pow(r, 2.0 + params.a) * std::pow(s[i].u, params.p - 1.0),
                              std::log(r)});
    }
    return out;
}

SolutionProfile from_phase(const PhaseTrajectory& trajectory) {
    const ProblemParams& params = trajectory.params;
    const double al = alpha(params);
    SolutionProfile out;
    out.input.params = params;
    out.samples.reserve(trajectory.points.size());
    for (const PhasePoint& pt : trajectory.points) {
        if (!(pt.z > 0.0)) {
            std::ostringstream msg;
            msg << "from_phase: z <= 0 at t=" << pt.t;
            throw Error(ErrorKind::InvalidInput, msg.str());
        }
        const double r = std::exp(pt.t);
        const double u = std::pow(r, -al) * std::pow(pt.z, 1.0 / (params.p - 1.0));
        out.samples.push_back({r, u, -pt.x * u / r});
        if (pt.x == 0.0 && !out.tau) out.tau = r;
    }
    if (!out.samples.empty()) {
        out.input.inner_radius = out.samples.front().r;
        out.input.delta = out.samples.front().du;
    }
    return out;
}

namespace {

// Events 0 and 1 (x = 0 and ℓ) only align steps.
constexpr std::size_t kEscapeRight = 2;
constexpr std::size_t kEscapeLeft = 3;
constexpr std::size_t kStopBase = 4;  // + index of StationaryName
constexpr std::size_t kSectionEvent = 7;

}  // namespace

PhaseRun integrate_phase(const ProblemParams& params, const PhasePoint& start, double t_end,
                         const PhaseConfig& config) {
    validate(params);
    const auto stat = stationary_points(params);
    const double al = alpha(params);

    const ode::Rhs rhs = [&params](double, const ode::Vec2& y) -> ode::Vec2 {
        return vector_field(y[0], y[1], params);
    };

    std::vector<ode::Event> events;
    events.push_back({[](double, const ode::Vec2& y) { return y[0]; }, false, 0});
    events.push_back({[&params](double, const ode::Vec2& y) {
                          return -(params.N - 1) * lipschitz_m(-y[0], params) - y[1];
                      },
                      false, 0});
    const double esc = config.x_escape;
    events.push_back({[esc](double, const ode::Vec2& y) { return y[0] - esc; }, true, +1});
    events.push_back({[esc](double, const ode::Vec2& y) { return y[0] + esc; }, true, -1});
    for (std::size_t k = 0; k < 3; ++k) {
        const double sx = stat[k].x;
        const double sz = stat[k].z;
        const double tol = config.converge_tol;
        const bool active = config.stop_at[k] && stat[k].in_closed_first_quadrant;
        events.push_back({[sx, sz, tol](double, const ode::Vec2& y) {
                              return std::hypot(y[0] - sx, y[1] - sz) - tol;
                          },
                          active, -1});
    }
    if (config.track_section) {
        events.push_back({[al](double, const ode::Vec2& y) { return y[0] - al; }, true, 0});
    }

    ode::Options opt;
    opt.rel_tol = config.rel_tol;
    opt.abs_tol = config.abs_tol;
    opt.max_steps = config.max_steps;
    opt.event_tol = config.event_tol;

    PhaseRun run;
    PhaseTrajectory& traj = run.trajectory;
    traj.params = params;
    traj.points.push_back(start);

    double t = start.t;
    ode::Vec2 y{start.x, start.z};
    int counted = 0;
    long steps_left = config.max_steps;
    while (true) {
        opt.max_steps = steps_left;
        const ode::Result res = ode::integrate(rhs, t, y, t_end, opt, events);
        steps_left -= res.steps;
        for (std::size_t i = 1; i < res.t.size(); ++i) {
            traj.points.push_back({res.y[i][0], res.y[i][1], res.t[i]});
        }
        t = res.t.back();
        y = res.y.back();
        if (res.status == ode::Status::ReachedEnd) {
            traj.termination = Termination::HorizonReached;
            break;
        }
        const ode::EventHit& hit = res.hits.back();
        if (hit.index == kEscapeRight || hit.index == kEscapeLeft) {
            traj.termination = hit.index == kEscapeRight ? Termination::BlowupForwardX
                                                         : Termination::BlowupBackward2Q;
            traj.blowup_time = hit.t + 1.0 / hit.y[0];
            break;
        }
        if (hit.index >= kStopBase && hit.index < kStopBase + 3) {
            traj.termination = Termination::ConvergedToStationary;
            traj.converged_to = static_cast<StationaryName>(hit.index - kStopBase);
            break;
        }
        if (hit.index == kSectionEvent) {
            const int dir = vector_field(hit.y[0], hit.y[1], params)[0] > 0.0 ? 1 : -1;
            run.section_hits.push_back({hit.y[0], hit.y[1], hit.t});
            run.section_directions.push_back(dir);
            if (dir == config.section_direction) ++counted;
            if (config.section_budget > 0 && counted >= config.section_budget) {
                traj.termination = Termination::SectionBudget;
                break;
            }
            if (t == t_end) {
                traj.termination = Termination::HorizonReached;
                break;
            }
            continue;
        }
        break;
    }
    return run;
}

namespace {

std::optional<std::size_t> axis_crossing(const PhaseTrajectory& traj) {
    for (std::size_t i = 1; i < traj.points.size(); ++i) {
        const double a = traj.points[i - 1].x;
        const double b = traj.points[i].x;
        if (a == 0.0) return i - 1;
        if ((a < 0.0) != (b < 0.0) || b == 0.0) {
            return std::fabs(a) < std::fabs(b) ? i - 1 : i;
        }
    }
    return std::nullopt;
}

void fill_crossing(ManifoldRun& run) {
    if (const auto idx = axis_crossing(run.trajectory)) {
        run.axis_crossing_z = run.trajectory.points[*idx].z;
        run.axis_crossing_t = run.trajectory.points[*idx].t;
    }
}

void require_finite(const PhaseTrajectory& traj, const char* what) {
    for (const PhasePoint& pt : traj.points) {
        if (!std::isfinite(pt.x) || !std::isfinite(pt.z)) {
            throw IntegrationError(ErrorKind::PrecisionLoss,
                                   std::string(what) + ": non-finite state", pt.t, {pt.x, pt.z});
        }
    }
}

}  // namespace

ManifoldRun unstable_manifold_O(const ProblemParams& params, double t_end,
                                const PhaseConfig& config) {
    validate(params);
    const double nt = effective_dimension(params);
    const double eps = config.manifold_eps * std::max(1.0, nt - 2.0);
    const double s = unstable_slope_O(params);
    const double norm = std::hypot(1.0, s);
    const double rate = 2.0 + params.a;

    auto seeded = [&](double e, double t_seed, double t_stop) {
        const PhasePoint seed{e / norm, e * s / norm, t_seed};
        return integrate_phase(params, seed, t_stop, config).trajectory;
    };

    ManifoldRun run;
    run.eps = eps;
    run.trajectory = seeded(eps, 0.0, t_end);
    require_finite(run.trajectory, "unstable manifold of O");
    fill_crossing(run);

    // Seeds at eps and eps/2, synchronized through the linear flow, compared
    // at a common probe time.
    const double probe = std::min(1.0, run.trajectory.points.back().t);
    const PhaseTrajectory a = seeded(eps, 0.0, probe);
    const PhaseTrajectory b = seeded(0.5 * eps, -std::log(2.0) / rate, probe);
    run.halving_gap = std::hypot(a.points.back().x - b.points.back().x,
                                 a.points.back().z - b.points.back().z);
    return run;
}

ManifoldRun stable_manifold_A0(const ProblemParams& params, double t_end,
                               const PhaseConfig& config) {
    validate(params);
    const DerivedExponents ex = derive_exponents(params);
    if (!(params.p > ex.p_serrin)) {
        throw Error(ErrorKind::InvalidParams,
                    "stable manifold of A0 requires p > p_serrin (A0 must be a saddle)");
    }
    if (!(t_end < 0.0)) throw Error(ErrorKind::InvalidInput, "t_end must be negative");
    const double nt = effective_dimension(params);
    const double eps = config.manifold_eps * std::max(1.0, nt - 2.0);
    const double A = stable_slope_A0(params);
    const double norm = std::hypot(1.0, A);
    const double mu = 2.0 + params.a - (params.p - 1.0) * (nt - 2.0);

    auto seeded = [&](double e, double t_seed, double t_stop) {
        const PhasePoint seed{nt - 2.0 - e / norm, e * A / norm, t_seed};
        return integrate_phase(params, seed, t_stop, config).trajectory;
    };

    ManifoldRun run;
    run.eps = eps;
    run.trajectory = seeded(eps, 0.0, t_end);
    require_finite(run.trajectory, "stable manifold of A0");
    fill_crossing(run);

    const double t_half = std::log(2.0) / -mu;
    const PhaseTrajectory half = seeded(0.5 * eps, t_half, t_end);
    ManifoldRun half_run;
    half_run.trajectory = half;
    fill_crossing(half_run);

    if (run.axis_crossing_z.has_value() != half_run.axis_crossing_z.has_value()) {
        const PhasePoint& last = run.trajectory.points.back();
        throw IntegrationError(ErrorKind::PrecisionLoss,
                               "stable manifold of A0: eps-halving runs disagree on the z-axis "
                               "crossing",
                               last.t, {last.x, last.z});
    }
    if (run.axis_crossing_z) {
        run.halving_gap = std::fabs(*run.axis_crossing_z - *half_run.axis_crossing_z);
        if (run.halving_gap > 1e-4 * std::max(1.0, *run.axis_crossing_z)) {
            const PhasePoint& last = run.trajectory.points.back();
            throw IntegrationError(ErrorKind::PrecisionLoss,
                                   "stable manifold of A0 departs before the z axis", last.t,
                                   {last.x, last.z});
        }
    } else {
        const double probe = std::max(-1.0, std::max(run.trajectory.points.back().t,
                                                     half.points.back().t));
        const PhaseTrajectory a = seeded(eps, 0.0, probe);
        const PhaseTrajectory b = seeded(0.5 * eps, t_half, probe);
        run.halving_gap = std::hypot(a.points.back().x - b.points.back().x,
                                     a.points.back().z - b.points.back().z);
    }
    return run;
}

BoundReport blowup_bound_2Q(const PhaseTrajectory& trajectory, double rel_tol) {
    BoundReport rep;
    const ProblemParams& params = trajectory.params;
    const double K = increasing_dimension(params) - 2.0;

    // Contiguous runs of 2Q samples, each sorted by t.
    std::vector<std::vector<PhasePoint>> segments;
    std::vector<PhasePoint> current;
    for (const PhasePoint& pt : trajectory.points) {
        if (pt.x < 0.0) {
            current.push_back(pt);
        } else if (!current.empty()) {
            segments.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) segments.push_back(std::move(current));

    auto flag = [&](const PhasePoint& pt, double excess) {
        ++rep.violations;
        if (excess > rep.worst_excess || !rep.worst_point) {
            rep.worst_excess = std::max(rep.worst_excess, excess);
            rep.worst_point = pt;
        }
    };

    for (auto& seg : segments) {
        std::sort(seg.begin(), seg.end(),
                  [](const PhasePoint& l, const PhasePoint& r) { return l.t < r.t; });
        for (const PhasePoint& pt : seg) {
            const auto f = vector_field(pt.x, pt.z, params);
            ++rep.checked;
            if (!(f[0] > 0.0) || !(f[1] > 0.0)) flag(pt, std::max(-f[0], -f[1]));
        }
        const std::size_t n = seg.size();
        const std::size_t anchors = std::min<std::size_t>(n, 200);
        for (std::size_t k = 0; k < anchors; ++k) {
            const std::size_t i = anchors == 1 ? n - 1 : k * (n - 1) / (anchors - 1);
            const PhasePoint& p0 = seg[i];
            const double c0 = 1.0 - K / p0.x;
            for (std::size_t j = 0; j <= i; ++j) {
                const PhasePoint& pt = seg[j];
                const double den = c0 * std::exp(K * (pt.t - p0.t)) - 1.0;
                ++rep.checked;
                if (!(den > 0.0)) {
                    flag(pt, std::numeric_limits<double>::infinity());
                    continue;
                }
                const double bound = -K / den;
                const double excess = pt.x - bound;
                if (excess > rel_tol * std::max(1.0, std::fabs(bound))) flag(pt, excess);
            }
        }
    }
    if (segments.empty()) rep.notes.push_back("no 2Q samples");
    return rep;
}

BoxReport apriori_box_check(const PhaseTrajectory& trajectory, const ProblemParams& params) {
    const Geometry g = geometry(params);
    BoxReport rep;
    rep.box_x = g.box_x;
    rep.box_z = g.box_z;
    bool first = true;
    for (const PhasePoint& pt : trajectory.points) {
        if (!(pt.x > 0.0)) continue;
        if (first) {
            rep.min_x = rep.max_x = pt.x;
            first = false;
        }
        rep.max_x = std::max(rep.max_x, pt.x);
        rep.min_x = std::min(rep.min_x, pt.x);
        rep.max_z = std::max(rep.max_z, pt.z);
        if ((pt.x >= g.box_x || pt.z >= g.box_z || !(pt.z > 0.0)) && rep.inside) {
            rep.inside = false;
            rep.first_exit = pt;
        }
    }
    return rep;
}

BoundReport flow_direction_audit(const ProblemParams& params, std::size_t budget,
                                 std::uint64_t seed) {
    validate(params);
    const Geometry g = geometry(params);
    const double al = alpha(params);
    const double z0 = m0_height(params);
    const double xa = effective_dimension(params) - 2.0;
    const double x_span = 3.0 * std::max({xa, al, g.tangency_x, 1.0});
    const double z_span = 3.0 * std::max({z0, g.box_z, 1.0});
    constexpr double kRoundoff = 1e-12;
    constexpr double kSkip = 1e-9;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    BoundReport rep;
    auto fail = [&](const char* what, double x, double z) {
        ++rep.violations;
        if (rep.notes.size() < 20) {
            std::ostringstream msg;
            msg.precision(17);
            msg << what << " at (" << x << ", " << z << ")";
            rep.notes.push_back(msg.str());
        }
        if (!rep.worst_point) rep.worst_point = PhasePoint{x, z, 0.0};
    };

    const std::size_t per = std::max<std::size_t>(1, budget / 5);
    const double s = g.ell_slope;
    for (std::size_t k = 0; k < per; ++k) {
        // ℓ: crossing direction and the slope of the flow.
        const double x = draw(0.0, x_span);
        if (x == 0.0 || std::fabs(x - g.tangency_x) < kSkip) continue;
        const double z = s * x;
        const auto f = vector_field(x, z, params);
        ++rep.checked;
        const double normal = f[1] - s * f[0];
        const double scale = std::fabs(f[1]) + s * std::fabs(f[0]) + 1.0;
        if (x < g.tangency_x ? !(normal > kRoundoff * scale) : !(normal < -kRoundoff * scale)) {
            fail("ell: wrong crossing direction", x, z);
        }
        const double predicted = s * (params.p - 1.0) * x * (al - x) / (x * (x + 1.0));
        if (std::fabs(f[1] / f[0] - predicted) > 1e-10 * std::max(1.0, std::fabs(predicted))) {
            fail("ell: flow slope differs from closed form", x, z);
        }
    }
    for (std::size_t k = 0; k < per; ++k) {
        // x axis.
        const double x = draw(0.0, x_span);
        if (x == 0.0 || std::fabs(x - xa) < kSkip) continue;
        const auto f = vector_field(x, 0.0, params);
        ++rep.checked;
        if (f[1] != 0.0) fail("x-axis: zdot nonzero", x, 0.0);
        if (x < xa ? !(f[0] < 0.0) : !(f[0] > 0.0)) fail("x-axis: wrong xdot sign", x, 0.0);
    }
    for (std::size_t k = 0; k < per; ++k) {
        // z axis.
        const double z = draw(0.0, z_span);
        if (z == 0.0) continue;
        const auto f = vector_field(0.0, z, params);
        ++rep.checked;
        if (!(f[0] > 0.0) || !(f[1] > 0.0)) fail("z-axis: flow not up-right", 0.0, z);
    }
    if (xa > 0.0) {
        for (std::size_t k = 0; k < per; ++k) {
            // π1: vertical flow, up left of π2, down right of it; below ℓ.
            const double x = draw(0.0, xa);
            if (x == 0.0 || std::fabs(x - al) < kSkip) continue;
            const double z = g.pi1_linear * x - g.pi1_quadratic * x * x;
            const auto f = vector_field(x, z, params);
            ++rep.checked;
            if (!(z < s * x)) fail("pi1: not below ell", x, z);
            if (std::fabs(f[0]) > kRoundoff * (1.0 + x * (x + 1.0) + z)) {
                fail("pi1: flow not vertical", x, z);
            }
            if (x < al ? !(f[1] > 0.0) : !(f[1] < 0.0)) fail("pi1: wrong zdot sign", x, z);
        }
    }
    for (std::size_t k = 0; k < per; ++k) {
        // π2: horizontal flow, left below M0, right above.
        const double z = draw(0.0, z_span);
        if (z == 0.0 || std::fabs(z - z0) < kSkip) continue;
        const auto f = vector_field(al, z, params);
        ++rep.checked;
        if (std::fabs(f[1]) > kRoundoff * z * (1.0 + params.p * al)) {
            fail("pi2: flow not horizontal", al, z);
        }
        if (z < z0 ? !(f[0] < 0.0) : !(f[0] > 0.0)) fail("pi2: wrong xdot sign", al, z);
    }
    return rep;
}

std::vector<double> PoincareReport::distances() const {
    std::vector<double> out{std::fabs(seed_z - z0)};
    for (double z : returns) out.push_back(std::fabs(z - z0));
    return out;
}

bool PoincareReport::strictly_increasing() const {
    const auto d = distances();
    if (d.size() < 2) return false;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (!(d[i] > d[i - 1])) return false;
    }
    return true;
}

bool PoincareReport::strictly_decreasing() const {
    const auto d = distances();
    if (d.size() < 2) return false;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (!(d[i] < d[i - 1])) return false;
    }
    return true;
}

PoincareReport poincare_return(const ProblemParams& params, double seed_z, int returns,
                               double t_budget, const PhaseConfig& config) {
    validate(params);
    if (returns <= 0) throw Error(ErrorKind::InvalidInput, "returns must be positive");
    if (!(seed_z > 0.0)) throw Error(ErrorKind::InvalidInput, "seed must lie in 1Q (z > 0)");
    const double al = alpha(params);
    const double seed_dir = vector_field(al, seed_z, params)[0];
    if (seed_dir == 0.0) throw Error(ErrorKind::InvalidInput, "seed is the stationary point M0");
    PhaseConfig cfg = config;
    cfg.track_section = true;
    cfg.section_direction = seed_dir > 0.0 ? 1 : -1;
    cfg.section_budget = returns;
    cfg.stop_at = {false, false, false};

    PoincareReport rep;
    rep.seed_z = seed_z;
    rep.z0 = m0_height(params);
    const PhaseRun run = integrate_phase(params, {al, seed_z, 0.0}, t_budget, cfg);
    for (std::size_t i = 0; i < run.section_hits.size(); ++i) {
        if (run.section_directions[i] == cfg.section_direction) {
            rep.returns.push_back(run.section_hits[i].z);
        }
    }
    rep.termination = run.trajectory.termination;
    rep.budget_exhausted = static_cast<int>(rep.returns.size()) < returns;
    return rep;
}

}  // namespace pucci
