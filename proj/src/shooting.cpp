#include "pucci/shooting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "pucci/error.hpp"

namespace pucci {

std::string_view to_string(DecayClass decay) noexcept {
    switch (decay) {
        case DecayClass::Fast: return "Fast";
        case DecayClass::Slow: return "Slow";
        case DecayClass::PseudoSlow: return "PseudoSlow";
        case DecayClass::Annular: return "Annular";
        case DecayClass::Undetermined: return "Undetermined";
    }
    return "?";
}

std::optional<double> rho_of_delta(const ProblemParams& params, double inner, double delta,
                                   const IntegratorConfig& config) {
    if (!(delta > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "rho_of_delta needs delta > 0 (use the operator swap)");
    }
    return integrate_ivp({params, inner, delta}, config).rho;
}

namespace {

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

bool unique_interior_max(const SolutionProfile& profile) {
    const auto& s = profile.samples;
    int changes = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i - 1].du > 0.0 && s[i].du <= 0.0) ++changes;
        if (s[i - 1].du <= 0.0 && s[i].du > 0.0) ++changes;
    }
    return changes == 1;
}

bool interior_positive(const SolutionProfile& profile) {
    const auto& s = profile.samples;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (!(s[i].u > 0.0)) return false;
    }
    return true;
}

}  // namespace

SolveReport solve_annulus(const AnnulusRequest& request, const SolverConfig& config) {
    validate(request.params);
    if (!(request.inner > 0.0) || !(request.outer > request.inner) || !std::isfinite(request.outer)) {
        std::ostringstream msg;
        msg << "invalid annulus (0 < inner < outer < inf): inner=" << request.inner
            << " outer=" << request.outer;
        throw Error(ErrorKind::InvalidAnnulus, msg.str());
    }
    if (!(request.boundary_tol > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "boundary_tol must be positive");
    }
    const double b = request.outer;

    SolveReport rep;
    IntegratorConfig full = config.integrator;
    full.stop_at_tau = false;
    full.r_max = b * config.annulus_rmax_factor;
    auto shot = [&](double delta) {
        const auto rho = integrate_ivp({request.params, request.inner, delta}, full).rho;
        rep.bracket_history.push_back({delta, rho});
        return rho;
    };
    // Unbounded at the truncation radius counts as rho > b.
    auto too_large = [&](const std::optional<double>& rho) { return rho && *rho < b; };

    auto fail = [&](const char* why) {
        std::ostringstream msg;
        msg << "bracket expansion failed (" << why << "); sweep:";
        for (const auto& st : rep.bracket_history) {
            msg << " [" << fmt(st.delta) << ", " << (st.rho ? fmt(*st.rho) : "unbounded") << "]";
        }
        throw Error(ErrorKind::BracketFailure, msg.str());
    };

    double lo = 0.0, hi = 0.0;
    double delta = std::clamp(1.0, config.delta_min, config.delta_max);
    if (too_large(shot(delta))) {
        hi = delta;
        while (true) {
            delta /= config.expansion;
            if (delta < config.delta_min) fail("delta_min reached with rho < outer");
            if (!too_large(shot(delta))) {
                lo = delta;
                break;
            }
            hi = delta;
        }
    } else {
        lo = delta;
        while (true) {
            delta *= config.expansion;
            if (delta > config.delta_max) fail("delta_max reached with rho >= outer");
            if (too_large(shot(delta))) {
                hi = delta;
                break;
            }
            lo = delta;
        }
    }
    rep.diagnostics.push_back("bracket [" + fmt(lo) + ", " + fmt(hi) + "] after " +
                              std::to_string(rep.bracket_history.size()) + " shots");

    // Bisection on integrations truncated at the outer radius. The lower end
    // always keeps u > 0 on (inner, outer], and u(outer) is its residual.
    IntegratorConfig trunc = config.integrator;
    trunc.stop_at_tau = false;
    trunc.r_max = b;
    SolutionProfile lo_profile = integrate_ivp({request.params, request.inner, lo}, trunc);
    if (lo_profile.rho) {
        throw Error(ErrorKind::BracketFailure,
                    "lower bracket end vanishes before the outer radius when truncated");
    }
    int iter = 0;
    while (std::fabs(lo_profile.samples.back().u) > request.boundary_tol &&
           iter < config.max_bisections) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            rep.diagnostics.push_back("bracket reached machine width");
            break;
        }
        SolutionProfile prof = integrate_ivp({request.params, request.inner, mid}, trunc);
        rep.bracket_history.push_back({mid, prof.rho});
        if (prof.rho) {
            hi = mid;
        } else {
            lo = mid;
            lo_profile = std::move(prof);
        }
        ++iter;
    }
    rep.diagnostics.push_back("bisection steps: " + std::to_string(iter));

    rep.found_delta = lo;
    rep.bracket_lo = lo;
    rep.bracket_hi = hi;
    rep.boundary_residual = std::fabs(lo_profile.samples.back().u);
    rep.decay = DecayClass::Annular;
    rep.profile = std::move(lo_profile);
    if (rep.boundary_residual > request.boundary_tol) {
        rep.diagnostics.push_back("boundary residual " + fmt(rep.boundary_residual) +
                                  " above tolerance " + fmt(request.boundary_tol));
    }
    rep.interior_positive = interior_positive(rep.profile);
    rep.unique_maximum = unique_interior_max(rep.profile);
    if (!rep.interior_positive) rep.diagnostics.push_back("interior positivity violated");
    if (!rep.unique_maximum) rep.diagnostics.push_back("maximum not unique");
    return rep;
}

namespace {

double distance(const PhasePoint& pt, double x, double z) { return std::hypot(pt.x - x, pt.z - z); }

void fill_recurrence(DecayAnalysis& out, const PhaseRun& run, const ProblemParams& params,
                     const SolverConfig& config) {
    out.section_crossings = static_cast<int>(run.section_hits.size());
    const auto& pts = out.trajectory.points;
    if (out.section_crossings < config.pseudo_crossings || pts.empty()) return;
    const double t_from =
        run.section_hits[run.section_hits.size() - static_cast<std::size_t>(config.pseudo_crossings)].t;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    PhaseTrajectory tail;
    for (const PhasePoint& p : pts) {
        if (p.t < t_from) continue;
        lo = std::min(lo, p.x);
        hi = std::max(hi, p.x);
        tail.points.push_back(p);
    }
    out.tail_x_amplitude = hi - lo;
    const BoxReport box = apriori_box_check(tail, params);
    if (out.tail_x_amplitude >= config.pseudo_amplitude && box.inside) {
        out.decay = DecayClass::PseudoSlow;
    }
}

}  // namespace

DecayAnalysis analyze_decay(const ProblemParams& params, double R, double delta,
                            const SolverConfig& config) {
    validate(params);
    if (!(R > 0.0)) throw Error(ErrorKind::InvalidInput, "exterior radius must be positive");
    if (!(delta > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "analyze_decay needs delta > 0 (use the operator swap)");
    }
    DecayAnalysis out;
    out.trajectory.params = params;

    IntegratorConfig ic = config.integrator;
    ic.stop_at_tau = true;
    ic.r_max = R * 1e12;
    const SolutionProfile rising = integrate_ivp({params, R, delta}, ic);
    if (rising.rho) {
        out.decay = DecayClass::Annular;
        out.eventually_annular = true;
        out.rho_estimate = rising.rho;
        out.note = "zero before the critical point";
        return out;
    }
    if (!rising.tau) {
        out.note = "no critical point before r = 1e12 R";
        return out;
    }
    out.tau = rising.tau;
    const RadialSample& top = rising.samples.back();
    const PhasePoint start{0.0, std::pow(top.r, 2.0 + params.a) * std::pow(top.u, params.p - 1.0),
                           std::log(top.r)};

    PhaseConfig pc = config.phase;
    pc.stop_at = {false, false, true};
    pc.track_section = true;
    pc.section_budget = 0;
    const StationaryPoint a0 = stationary_point(StationaryName::A0, params);
    const double t_final = std::log(R) + config.t_budget;

    PhaseRun run;
    if (config.observe_decades) {
        const double t_window = std::log(R) + *config.observe_decades * std::log(10.0);
        if (start.t < t_window) {
            run = integrate_phase(params, start, t_window, pc);
            if (run.trajectory.termination == Termination::HorizonReached) {
                out.window_distance_A0 = distance(run.trajectory.points.back(), a0.x, a0.z);
                if (*out.window_distance_A0 < config.fast_tol) {
                    out.trajectory = std::move(run.trajectory);
                    out.section_crossings = static_cast<int>(run.section_hits.size());
                    out.decay = DecayClass::Fast;
                    out.note = "within fast_tol of A0 at the window end";
                    return out;
                }
                // Follow the rest of the budget from the window end.
                PhaseRun rest = integrate_phase(params, run.trajectory.points.back(), t_final, pc);
                run.trajectory.points.insert(run.trajectory.points.end(),
                                             rest.trajectory.points.begin() + 1,
                                             rest.trajectory.points.end());
                run.trajectory.termination = rest.trajectory.termination;
                run.trajectory.converged_to = rest.trajectory.converged_to;
                run.trajectory.blowup_time = rest.trajectory.blowup_time;
                run.section_hits.insert(run.section_hits.end(), rest.section_hits.begin(),
                                        rest.section_hits.end());
                run.section_directions.insert(run.section_directions.end(),
                                              rest.section_directions.begin(),
                                              rest.section_directions.end());
            }
        } else {
            out.note = "critical point lies beyond the observation window";
            run = integrate_phase(params, start, t_final, pc);
        }
    } else {
        run = integrate_phase(params, start, t_final, pc);
    }

    out.trajectory = std::move(run.trajectory);
    out.section_crossings = static_cast<int>(run.section_hits.size());
    const PhasePoint& last = out.trajectory.points.back();
    switch (out.trajectory.termination) {
        case Termination::BlowupForwardX:
            out.decay = DecayClass::Annular;
            out.eventually_annular = true;
            out.rho_estimate = std::exp(last.t) * (1.0 + 1.0 / last.x);
            break;
        case Termination::ConvergedToStationary:
            out.decay = DecayClass::Slow;
            break;
        case Termination::HorizonReached:
            fill_recurrence(out, run, params, config);
            if (out.decay == DecayClass::Undetermined &&
                distance(last, a0.x, a0.z) < config.fast_tol) {
                out.decay = DecayClass::Fast;
            }
            break;
        default:
            break;
    }
    return out;
}

DecayClass classify_decay(const ProblemParams& params, double R, double delta,
                          const SolverConfig& config) {
    return analyze_decay(params, R, delta, config).decay;
}

double fit_log_slope(const SolutionProfile& profile, double r_lo, double r_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const RadialSample& s : profile.samples) {
        if (s.r < r_lo || s.r > r_hi || s.u == 0.0) continue;
        const double x = std::log(s.r);
        const double y = std::log(std::fabs(s.u));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw Error(ErrorKind::InvalidInput, "fit window holds fewer than 2 samples");
    const double mx = sx / n;
    return (sxy - mx * sy) / (sxx - mx * sx);
}

double fit_log_slope(const PhaseTrajectory& trajectory, double t_lo, double t_hi) {
    const ProblemParams& params = trajectory.params;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const PhasePoint& p : trajectory.points) {
        if (p.t < t_lo || p.t > t_hi || !(p.z > 0.0)) continue;
        const double y = (std::log(p.z) - (2.0 + params.a) * p.t) / (params.p - 1.0);
        sx += p.t;
        sy += y;
        sxx += p.t * p.t;
        sxy += p.t * y;
        ++n;
    }
    if (n < 2) throw Error(ErrorKind::InvalidInput, "fit window holds fewer than 2 samples");
    const double mx = sx / n;
    return (sxy - mx * sy) / (sxx - mx * sx);
}

namespace {

double polyline_distance(const PhasePoint& q, const PhaseTrajectory& line) {
    double best = std::numeric_limits<double>::infinity();
    const auto& pts = line.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double dx = pts[i + 1].x - pts[i].x;
        const double dz = pts[i + 1].z - pts[i].z;
        const double len2 = dx * dx + dz * dz;
        double s = len2 > 0.0 ? ((q.x - pts[i].x) * dx + (q.z - pts[i].z) * dz) / len2 : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        best = std::min(best, std::hypot(q.x - pts[i].x - s * dx, q.z - pts[i].z - s * dz));
    }
    return best;
}

}  // namespace

SolveReport find_fast_decay_delta(const ProblemParams& params, double R,
                                  const SolverConfig& config) {
    validate(params);
    SolverConfig fate = config;
    fate.observe_decades.reset();

    SolveReport rep;
    auto annular = [&](double delta) {
        const DecayAnalysis a = analyze_decay(params, R, delta, fate);
        rep.bracket_history.push_back({delta, a.rho_estimate});
        return a.eventually_annular;
    };
    auto none = [&](const char* why) {
        std::ostringstream msg;
        msg << "no transition found (" << why << "); sweep:";
        for (const auto& st : rep.bracket_history) {
            msg << " [" << fmt(st.delta) << ", " << (st.rho ? fmt(*st.rho) : "unbounded") << "]";
        }
        throw Error(ErrorKind::NoTransitionFound, msg.str());
    };

    double lo = 0.0, hi = 0.0;
    double delta = std::clamp(1.0, config.delta_min, config.delta_max);
    if (annular(delta)) {
        hi = delta;
        while (true) {
            delta /= config.expansion;
            if (delta < config.delta_min) none("every shot in range is Annular");
            if (!annular(delta)) {
                lo = delta;
                break;
            }
            hi = delta;
        }
    } else {
        lo = delta;
        while (true) {
            delta *= config.expansion;
            if (delta > config.delta_max) none("no Annular shot in range");
            if (annular(delta)) {
                hi = delta;
                break;
            }
            lo = delta;
        }
    }
    int iter = 0;
    while (hi - lo > config.delta_rel_tol * hi && iter < config.max_bisections) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (annular(mid) ? hi : lo) = mid;
        ++iter;
    }
    rep.bracket_lo = lo;
    rep.bracket_hi = hi;
    rep.found_delta = lo;
    rep.diagnostics.push_back("bisection steps: " + std::to_string(iter) +
                              ", relative width " + fmt((hi - lo) / hi));

    // Decay observed on [R, 10^hi R] from the unbounded side of the bracket.
    SolverConfig window = config;
    window.observe_decades = config.fit_hi_decades;
    const DecayAnalysis at_star = analyze_decay(params, R, lo, window);
    rep.decay = at_star.decay;
    rep.phase = at_star.trajectory;

    IntegratorConfig ic = config.integrator;
    ic.stop_at_tau = false;
    ic.r_max = R * std::pow(10.0, config.fit_hi_decades);
    rep.profile = integrate_ivp({params, R, lo}, ic);
    if (rep.profile.rho) {
        rep.diagnostics.push_back("shot vanishes inside the fit window at r=" + fmt(*rep.profile.rho));
    } else {
        rep.fit_exponent = fit_log_slope(rep.profile, R * std::pow(10.0, config.fit_lo_decades),
                                         R * std::pow(10.0, config.fit_hi_decades));
    }
    rep.expected_exponent = -(effective_dimension(params) - 2.0);

    try {
        ManifoldRun ups = stable_manifold_A0(params, -60.0, config.phase);
        // The seed sits eps away from A0; close the curve at A0 itself.
        const StationaryPoint a0 = stationary_point(StationaryName::A0, params);
        ups.trajectory.points.insert(ups.trajectory.points.begin(), PhasePoint{a0.x, a0.z, 0.0});
        rep.distance_to_stable_manifold = polyline_distance(at_star.trajectory.points.back(), ups.trajectory);
    } catch (const Error& e) {
        rep.diagnostics.push_back(std::string("stable manifold unavailable: ") + e.what());
    }
    return rep;
}

DExploration explore_D(const ProblemParams& params, double inner,
                       const std::vector<double>& delta_grid, const SolverConfig& config,
                       bool refine) {
    validate(params);
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        if (!(delta_grid[i] > 0.0) || (i > 0 && !(delta_grid[i] > delta_grid[i - 1]))) {
            throw Error(ErrorKind::InvalidInput, "delta grid must be positive and strictly increasing");
        }
    }
    SolverConfig fate = config;
    fate.observe_decades.reset();

    DExploration out;
    out.rows.resize(delta_grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < delta_grid.size(); i = next++) {
            DRow& row = out.rows[i];
            row.delta = delta_grid[i];
            try {
                row.rho = rho_of_delta(params, inner, row.delta, config.integrator);
                row.decay = classify_decay(params, inner, row.delta, fate);
            } catch (const Error& e) {
                row.failed = true;
                row.error = e.what();
            }
        }
    };
    unsigned n = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, delta_grid.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    auto is_annular = [](const DRow& r) { return !r.failed && r.decay == DecayClass::Annular; };
    for (std::size_t i = 0; i < out.rows.size();) {
        if (!is_annular(out.rows[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < out.rows.size() && is_annular(out.rows[j + 1])) ++j;
        out.annular_components.emplace_back(out.rows[i].delta, out.rows[j].delta);
        i = j + 1;
    }
    if (!out.rows.empty() && is_annular(out.rows.back())) {
        std::size_t k = out.rows.size() - 1;
        while (k > 0 && is_annular(out.rows[k - 1])) --k;
        if (k > 0 && !out.rows[k - 1].failed) {
            out.delta_star_grid = out.rows[k].delta;
            if (refine) {
                double lo = out.rows[k - 1].delta;
                double hi = out.rows[k].delta;
                for (int it = 0; it < config.max_bisections && hi - lo > config.delta_rel_tol * hi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    (analyze_decay(params, inner, mid, fate).eventually_annular ? hi : lo) = mid;
                }
                out.delta_star_refined = hi;
            }
        }
    }
    return out;
}

SolutionProfile negate_profile(const SolutionProfile& profile) {
    SolutionProfile out = profile;
    out.input.params.op = swapped(profile.input.params.op);
    out.input.delta = -profile.input.delta;
    for (RadialSample& s : out.samples) {
        s.u = -s.u;
        s.du = -s.du;
    }
    return out;
}

SolveReport solve_negative_annulus(const AnnulusRequest& request, const SolverConfig& config) {
    AnnulusRequest swapped_request = request;
    swapped_request.params.op = swapped(request.params.op);
    SolveReport rep = solve_annulus(swapped_request, config);
    rep.profile = negate_profile(rep.profile);
    rep.found_delta = -rep.found_delta;
    if (rep.bracket_lo) rep.bracket_lo = -*rep.bracket_lo;
    if (rep.bracket_hi) rep.bracket_hi = -*rep.bracket_hi;
    rep.negative = true;
    rep.diagnostics.push_back("negative solution via the operator swap");
    return rep;
}

SolveReport solve_negative_exterior(const ProblemParams& params, double R,
                                    const SolverConfig& config) {
    ProblemParams sw = params;
    sw.op = swapped(params.op);
    SolveReport rep = find_fast_decay_delta(sw, R, config);
    rep.profile = negate_profile(rep.profile);
    rep.found_delta = -rep.found_delta;
    if (rep.bracket_lo) rep.bracket_lo = -*rep.bracket_lo;
    if (rep.bracket_hi) rep.bracket_hi = -*rep.bracket_hi;
    rep.negative = true;
    rep.diagnostics.push_back("negative solution via the operator swap");
    return rep;
}

PStarScan estimate_p_star(const ProblemParams& params, double R, const std::vector<double>& p_grid,
                          const SolverConfig& config) {
    PStarScan out;
    for (double p : p_grid) {
        ProblemParams q = params;
        q.p = p;
        bool ok = false;
        try {
            ok = find_fast_decay_delta(q, R, config).decay == DecayClass::Fast;
        } catch (const Error&) {
            ok = false;
        }
        out.rows.emplace_back(p, ok);
    }
    std::vector<std::pair<double, bool>> sorted = out.rows;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = sorted.size(); i-- > 0;) {
        if (!sorted[i].second) break;
        out.p_star_upper = sorted[i].first;
    }
    return out;
}

}  // namespace pucci
