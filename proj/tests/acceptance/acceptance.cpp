// Acceptance run: one PASS/FAIL line per criterion, with its runtime budget.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pucci/energy.hpp"
#include "pucci/error.hpp"
#include "pucci/io/invariants.hpp"
#include "pucci/params.hpp"
#include "pucci/phase_plane.hpp"
#include "pucci/radial_ivp.hpp"
#include "pucci/shooting.hpp"

using namespace pucci;

namespace {

const ProblemParams C1{1.0, 1.5, 4, 4.0, 0.0, Operator::Plus};

ProblemParams with_p(ProblemParams q, double p) {
    q.p = p;
    return q;
}

struct Outcome {
    bool pass = true;
    std::ostringstream note;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            note << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, double budget_s, const std::function<void(Outcome&)>& body) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.pass = false;
        out.note << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
        out.pass = false;
        out.note << " [over time budget]";
    }
    if (!out.pass) ++failures;
    std::printf("%s criterion %d (%.2f s of %.0f s):%s\n", out.pass ? "PASS" : "FAIL", id, secs, budget_s,
                out.note.str().c_str());
    std::fflush(stdout);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Expected type from the sign rules: +1 source, -1 sink, 0 saddle.
enum class Kind { Saddle, Source, Sink, Center, Degenerate, Skip };

Kind classify(const std::array<std::complex<double>, 2>& ev, double tol) {
    const double r0 = ev[0].real(), r1 = ev[1].real();
    if (std::fabs(ev[0].imag()) > tol && std::fabs(r0) <= tol) return Kind::Center;
    if (std::fabs(r0) <= tol || std::fabs(r1) <= tol) return Kind::Degenerate;
    if ((r0 > 0) != (r1 > 0)) return Kind::Saddle;
    return r0 > 0 ? Kind::Source : Kind::Sink;
}

Kind from_library(Stability s) {
    switch (s) {
        case Stability::Saddle: return Kind::Saddle;
        case Stability::Source: return Kind::Source;
        case Stability::Sink: return Kind::Sink;
        case Stability::Center: return Kind::Center;
        case Stability::Degenerate: return Kind::Degenerate;
    }
    return Kind::Skip;
}

// Random valid parameters, with p drawn from the requested band.
ProblemParams random_params(std::mt19937_64& rng, int band) {
    std::uniform_real_distribution<double> lam(0.3, 1.0), ratio(1.0, 2.0), aa(-0.5, 2.0), u01(0.05, 0.95);
    while (true) {
        ProblemParams q{lam(rng), 0.0, 3 + static_cast<int>(rng() % 5), 0.0, aa(rng),
                        rng() % 2 ? Operator::Plus : Operator::Minus};
        q.Lambda = q.lambda * ratio(rng);
        const double nt = oracle::ntilde(q, q.op == Operator::Plus);
        if (nt <= 2.2) continue;
        const double ps = (nt + q.a) / (nt - 2.0);
        const double pp = (nt + 2.0 * q.a + 2.0) / (nt - 2.0);
        if (band == 0) q.p = 1.0 + (ps - 1.0) * u01(rng);
        if (band == 1) q.p = ps + (pp - ps) * u01(rng);
        if (band == 2) q.p = pp * (1.0 + 2.0 * u01(rng));
        return q;
    }
}

// z0 of the singular power profile, found by bisection on the oracle's u''.
double oracle_z0(const ProblemParams& q) {
    const double al = oracle::alpha(q);
    auto f = [&](double c) { return oracle::second_derivative(1.0, c, -al * c, q) - al * (al + 1.0) * c; };
    double lo = 1e-8, hi = 1e8;
    for (int i = 0; i < 400 && hi / lo > 1.0 + 1e-15; ++i) {
        const double mid = std::sqrt(lo * hi);
        ((f(mid) > 0) == (f(lo) > 0) ? lo : hi) = mid;
    }
    return std::pow(std::sqrt(lo * hi), q.p - 1.0);
}

// Least-squares slope of (ln r, ln u).
double slope(const std::vector<double>& lr, const std::vector<double>& lu) {
    const double n = static_cast<double>(lr.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lr.size(); ++i) {
        sx += lr[i];
        sy += lu[i];
        sxx += lr[i] * lr[i];
        sxy += lr[i] * lu[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Fit over phase samples with t in [t_lo, t_hi]; ln u = (ln z - (2+a) t) / (p - 1).
double phase_fit(const PhaseTrajectory& traj, double t_lo, double t_hi) {
    std::vector<double> lr, lu;
    const ProblemParams& q = traj.params;
    for (const PhasePoint& pt : traj.points) {
        if (pt.t < t_lo || pt.t > t_hi) continue;
        lr.push_back(pt.t);
        lu.push_back((std::log(pt.z) - (2.0 + q.a) * pt.t) / (q.p - 1.0));
    }
    return lr.size() >= 3 ? slope(lr, lu) : std::numeric_limits<double>::quiet_NaN();
}

// |u(b)| for the shot (params, a, delta).
double boundary_residual(const ProblemParams& q, double a, double b, double delta) {
    IntegratorConfig ic;
    ic.r_max = b;
    const SolutionProfile prof = integrate_ivp({q, a, delta}, ic);
    if (prof.rho) return std::fabs(prof.samples.back().du) * (b - *prof.rho);
    return std::fabs(prof.samples.back().u);
}

bool interior_positive(const SolutionProfile& prof) {
    for (std::size_t i = 1; i + 1 < prof.samples.size(); ++i) {
        if (!(prof.samples[i].u > 0.0)) return false;
    }
    return true;
}

bool single_maximum(const SolutionProfile& prof) {
    int changes = 0;
    for (std::size_t i = 1; i < prof.samples.size(); ++i) {
        const double a = prof.samples[i - 1].du, b = prof.samples[i].du;
        if (a != 0.0 && b != 0.0 && (a > 0) != (b > 0)) ++changes;
        if (a > 0 && b == 0.0) ++changes;
    }
    return changes == 1;
}

std::vector<SolutionProfile> solved_profiles;

}  // namespace

int main() {
    // 1. Singular power profile.
    criterion(1, 1.0, [](Outcome& o) {
        std::mt19937_64 rng(101);
        double worst_res = 0.0, worst_lib = 0.0, worst_map = 0.0;
        for (int k = 0; k < 10; ++k) {
            const ProblemParams q = random_params(rng, k % 2 ? 1 : 2);
            const double z0 = oracle_z0(q);
            const double al = oracle::alpha(q);
            const double c = std::pow(z0, 1.0 / (q.p - 1.0));
            const auto power = singular_power_profile(q);
            o.require(power.has_value(), "power profile missing");
            if (!power) continue;
            const SolutionProfile prof = sample_power_profile(*power, q, 0.5, 50.0, 20000);
            for (const RadialSample& s : prof.samples) {
                const double d2 = al * (al + 1.0) * s.u / (s.r * s.r);
                const double exact = std::fabs(oracle::second_derivative(s.r, s.u, s.du, q) - d2);
                worst_res = std::max({worst_res, exact, std::fabs(s.u - c * std::pow(s.r, -al)) / s.u});
            }
            worst_lib = std::max(worst_lib, residual_audit(prof));
            for (const PhasePoint& pt : to_phase(prof).points) {
                worst_map = std::max({worst_map, std::fabs(pt.x - al), std::fabs(pt.z - z0) / z0});
            }
        }
        o.note << " exact ODE residual " << num(worst_res) << ", stencil audit " << num(worst_lib)
               << ", distance to M0 " << num(worst_map);
        o.require(worst_res < 1e-8, "ODE residual < 1e-8");
        o.require(worst_lib < 1e-8, "audited residual < 1e-8");
        o.require(worst_map < 1e-10, "to_phase within 1e-10 of M0");
    });

    // 2. Stationary-point classification.
    criterion(2, 5.0, [](Outcome& o) {
        std::mt19937_64 rng(202);
        int compared = 0, mismatches = 0;
        for (int k = 0; k < 20; ++k) {
            const ProblemParams q = random_params(rng, k % 3);
            const double nt = oracle::ntilde(q, q.op == Operator::Plus);
            const double ps = (nt + q.a) / (nt - 2.0);
            const double pp = (nt + 2.0 * q.a + 2.0) / (nt - 2.0);
            const std::array<Kind, 3> expected{Kind::Saddle, q.p > ps ? Kind::Saddle : Kind::Source,
                                               q.p < ps ? Kind::Skip : (q.p < pp ? Kind::Source : Kind::Sink)};
            for (const StationaryPoint& sp : stationary_points(q)) {
                const Kind want = expected[static_cast<int>(sp.name)];
                if (want == Kind::Skip) continue;
                const Kind numeric = classify(oracle::eigenvalues(oracle::central_jacobian(sp.x, sp.z, q)), 1e-6);
                const Kind lib = from_library(sp.classification);
                ++compared;
                if (numeric != want || lib != want) ++mismatches;
            }
        }
        int degenerate = 0;
        double worst_zero = 0.0;
        for (int k = 0; k < 5; ++k) {
            ProblemParams q = random_params(rng, 1);
            const double nt = oracle::ntilde(q, q.op == Operator::Plus);
            q.p = (nt + q.a) / (nt - 2.0);
            const StationaryPoint a0 = stationary_point(StationaryName::A0, q);
            // On the invariant axis z = 0 the transverse eigenvalue is ż / z.
            const double zt = 1e-12;
            const double transverse = oracle::phase_field(a0.x, zt, q)[1] / zt;
            const double library = std::min(std::abs(a0.eigenvalues[0]), std::abs(a0.eigenvalues[1]));
            worst_zero = std::max({worst_zero, std::fabs(transverse), library});
            if (a0.classification == Stability::Degenerate) ++degenerate;
        }
        o.note << " " << compared << " points compared, " << mismatches << " mismatches; at p = p_serrin "
               << degenerate << "/5 flagged degenerate, largest near-zero eigenvalue " << num(worst_zero);
        o.require(compared >= 45 && mismatches == 0, "classification matches");
        o.require(degenerate == 5 && worst_zero < 1e-9, "degenerate case within 1e-9");
    });

    // 3. Annulus solves and scaling.
    criterion(3, 30.0, [](Outcome& o) {
        ProblemParams minus = C1;
        minus.op = Operator::Minus;
        struct Case {
            ProblemParams q;
            double a, b;
        };
        std::vector<SolveReport> reps;
        for (const Case& c : {Case{C1, 1.0, 2.0}, Case{C1, 2.0, 4.0}, Case{minus, 1.0, 3.0}}) {
            const SolveReport rep = solve_annulus({c.q, c.a, c.b, 1e-8});
            const double independent = [&] {
                const oracle::Rk4Run ref = oracle::rk4_shoot(c.q, c.a, rep.found_delta, 2.0 * c.b, 1e-5 * c.b);
                return ref.rho ? std::fabs(*ref.rho - c.b) : std::numeric_limits<double>::infinity();
            }();
            o.note << " (" << num(c.a) << "," << num(c.b) << ") delta=" << rep.found_delta << " |u(b)|="
                   << num(rep.boundary_residual) << " rk4 |rho-b|=" << num(independent) << ";";
            o.require(rep.boundary_residual < 1e-8, "boundary residual");
            o.require(interior_positive(rep.profile) && single_maximum(rep.profile), "shape");
            o.require(independent < 1e-6 * c.b, "independent RK4 zero");
            reps.push_back(rep);
            solved_profiles.push_back(rep.profile);
        }
        const double s = 2.0;
        const double scaled = std::pow(s, -(oracle::alpha(C1) + 1.0)) * reps[0].found_delta;
        const double res = boundary_residual(C1, 2.0, 4.0, scaled);
        o.note << " rescaled root residual on (2,4) " << num(res);
        o.require(res < 1e-6, "rescaled root residual < 1e-6");
    });

    // More solved profiles for 4, 7 and 8.
    for (auto [a, b] : {std::pair{1.0, 1.5}, std::pair{1.0, 5.0}}) {
        solved_profiles.push_back(solve_annulus({C1, a, b, 1e-8}).profile);
    }

    // 4. Energy monotonicity.
    criterion(4, 10.0, [](Outcome& o) {
        double worst = 0.0, drift = 0.0;
        std::size_t halved = 0, at_floor = 0;
        for (const SolutionProfile& prof : solved_profiles) {
            IntegratorConfig ic;
            ic.r_max = 2.0 * prof.r_end();
            const RefinementReport ref = monotonicity_refinement(prof.input, ic, 1e-7);
            const double c = ref.coarse.worst(), f = ref.fine.worst();
            worst = std::max({worst, c, f});
            drift = std::max(drift, ref.energy_drift);
            if (f <= ref.floor && c <= ref.floor) {
                ++at_floor;
            } else if (f <= 0.5 * c) {
                ++halved;
            }
            o.require(ref.coarse.bounds_hold(), "energy bounds");
        }
        o.note << " worst relative violation " << num(worst) << "; " << halved << " profiles halved, "
               << at_floor << " already at the 1e-12 round-off floor; energy drift " << num(drift);
        o.require(worst < 1e-7, "violation < 1e-7");
        o.require(halved + at_floor == solved_profiles.size(), "halving under refinement");
        o.require(drift < 1e-7, "energies stable under refinement");
    });

    // 5. Endpoint behaviour of the slope sweep.
    criterion(5, 60.0, [](Outcome& o) {
        double min_small = std::numeric_limits<double>::infinity(), max_large = 0.0, worst_ratio = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double delta = 1e-4 * std::pow(1e8, i / 49.0);
            const auto rho = rho_of_delta(C1, 1.0, delta);
            const double r = rho ? *rho : std::numeric_limits<double>::infinity();
            if (delta <= 1e-3) min_small = std::min(min_small, r);
            if (delta >= 1e3) max_large = std::max(max_large, r);
            IntegratorConfig ic;
            ic.stop_at_tau = true;
            const SolutionProfile head = integrate_ivp({C1, 1.0, delta}, ic);
            o.require(head.tau.has_value(), "tau found");
            if (!head.tau) continue;
            const double u = head.samples.back().u;
            const double bound = C1.Lambda * (C1.p + 1.0) / (2.0 * std::pow(1.0, C1.a)) * delta * delta;
            worst_ratio = std::max(worst_ratio, std::pow(u, C1.p + 1.0) / bound);
        }
        o.note << " smallest decade min rho " << num(min_small) << ", largest decade max rho " << num(max_large)
               << ", max u^(p+1)(tau)/bound " << num(worst_ratio);
        o.require(min_small > 1e3, "rho > 1e3 a for small slopes");
        o.require(max_large < 1.1, "rho < 1.1 a for large slopes");
        o.require(worst_ratio <= 1.0, "small-slope bound");
    });

    // 6. Fast decay in exterior domains.
    criterion(6, 120.0, [](Outcome& o) {
        const ProblemParams lap{1.0, 1.0, 3, 6.0, 0.0, Operator::Plus};
        const SolveReport s = find_fast_decay_delta(lap, 1.0);
        const double width = (*s.bracket_hi - *s.bracket_lo) / s.found_delta;
        // Independent RK4 shot at δ* with samples on [1e2, 1e4].
        std::vector<double> radii;
        for (int i = 0; i <= 40; ++i) radii.push_back(100.0 * std::pow(100.0, i / 40.0));
        const oracle::Rk4Run ref = oracle::rk4_shoot(lap, 1.0, s.found_delta, 1e4, 2e-3, radii);
        std::vector<double> lr, lu;
        for (const oracle::State& st : ref.at) {
            lr.push_back(std::log(st.r));
            lu.push_back(std::log(st.u));
        }
        const double fit_lap = ref.at.size() == radii.size() ? slope(lr, lu) : std::nan("");
        o.note << " semilinear delta*=" << s.found_delta << " width " << num(width) << ", fit "
               << num(s.fit_exponent.value_or(std::nan(""))) << " (rk4 " << num(fit_lap) << ") vs -1;";
        o.require(width < 1e-10, "bracket width");
        o.require(std::fabs(fit_lap + 1.0) < 1e-2 && std::fabs(*s.fit_exponent + 1.0) < 1e-2, "semilinear fit");

        const ProblemParams q = with_p(C1, 6.0);
        const SolveReport c = find_fast_decay_delta(q, 1.0);
        const double fast_target = -(oracle::ntilde(q, true) - 2.0);
        const double fit_fast = phase_fit(*c.phase, std::log(1e2), std::log(1e4));
        o.note << " C1 p=6 delta*=" << c.found_delta << " fit " << num(fit_fast) << " vs " << num(fast_target)
               << ";";
        o.require(std::fabs(fit_fast - fast_target) < 2e-2, "C1 fast fit");

        // Half the threshold: slow decay towards M0.
        const DecayAnalysis slow = analyze_decay(q, 1.0, 0.5 * c.found_delta);
        const double target = -oracle::alpha(q);
        const double t_end = slow.trajectory.points.back().t;
        const double fit_window = phase_fit(slow.trajectory, std::log(1e2), std::log(1e4));
        const double fit_tail = phase_fit(slow.trajectory, t_end - 2.0 * std::log(10.0), t_end);
        o.note << " delta*/2 is " << to_string(slow.decay) << ", fit on [1e2,1e4] " << num(fit_window)
               << ", fit on the last two decades before M0 (r up to " << num(std::exp(t_end)) << ") "
               << num(fit_tail) << " vs -alpha = " << num(target);
        o.require(slow.decay == DecayClass::Slow, "slow decay at delta*/2");
        o.require(std::fabs(fit_tail - target) < 2e-2, "slow-decay fit");
    });

    // 7. Phase/ODE round trip and commutation.
    criterion(7, 30.0, [](Outcome& o) {
        double worst_rt = 0.0, worst_cm = 0.0;
        int crossings = 0;
        for (const SolutionProfile& prof : solved_profiles) {
            worst_rt = std::max(worst_rt, io::round_trip_gap(prof));
            const io::CommutationResult cm = io::phase_ode_commutation(prof, PhaseConfig{});
            worst_cm = std::max(worst_cm, cm.gap);
            if (cm.crossed_z_axis && cm.compared > 0) ++crossings;
        }
        o.note << " " << solved_profiles.size() << " profiles, round trip " << num(worst_rt) << ", commutation "
               << num(worst_cm) << ", " << crossings << " with a z-axis crossing";
        o.require(solved_profiles.size() >= 5, "five profiles");
        o.require(worst_rt < 1e-8, "round trip");
        o.require(worst_cm < 1e-6, "commutation");
        o.require(crossings == static_cast<int>(solved_profiles.size()), "z-axis crossings");
    });

    // 8. Second-quadrant bound and flow directions.
    criterion(8, 20.0, [](Outcome& o) {
        std::vector<PhaseTrajectory> trajs;
        for (const SolutionProfile& prof : solved_profiles) trajs.push_back(to_phase(prof));
        for (double p : {3.5, 4.0, 5.0, 6.0}) {
            const ProblemParams q = with_p(C1, p);
            for (int k = 1; k <= 5; ++k) {
                const PhasePoint seed{0.0, 0.6 * k, 0.0};
                trajs.push_back(integrate_phase(q, seed, -40.0).trajectory);
            }
        }
        std::size_t checked = 0, violations = 0, oracle_bad = 0;
        for (const PhaseTrajectory& t : trajs) {
            const BoundReport b = blowup_bound_2Q(t);
            checked += b.checked;
            violations += b.violations;
            for (const PhasePoint& pt : t.points) {
                if (!(pt.x < 0.0)) continue;
                const auto f = oracle::phase_field(pt.x, pt.z, t.params);
                if (!(f[0] > 0.0 && f[1] > 0.0)) ++oracle_bad;
            }
        }
        const BoundReport flow = flow_direction_audit(C1, 10000, 1);
        o.note << " " << trajs.size() << " trajectories, " << checked << " 2Q samples, " << violations
               << " bound violations, " << oracle_bad << " sign violations; flow audit " << flow.checked
               << " points, " << flow.violations << " violations";
        o.require(checked > 1000 && violations == 0 && oracle_bad == 0, "2Q bound");
        o.require(flow.checked >= 10000 && flow.ok(), "flow audit");
    });

    // 9. Center at the pseudo exponent.
    criterion(9, 30.0, [](Outcome& o) {
        const ProblemParams q5 = with_p(C1, 5.0);
        const double z5 = m0_height(q5);
        const PoincareReport center = poincare_return(q5, 1.1 * z5, 1);
        const double gap = center.returns.empty() ? std::numeric_limits<double>::infinity()
                                                  : std::fabs(center.returns.front() - center.seed_z);
        // Independent closure: fixed-step RK4 on the chain-rule field.
        const double al = oracle::alpha(q5);
        std::array<double, 2> y{al, 1.1 * z5};
        double rk4_gap = std::numeric_limits<double>::infinity();
        const double h = 2e-4;
        for (int step = 0; step < 1'000'000; ++step) {
            auto f = [&](const std::array<double, 2>& v) { return oracle::phase_field(v[0], v[1], q5); };
            const auto k1 = f(y);
            const auto k2 = f({y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
            const auto k3 = f({y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
            const auto k4 = f({y[0] + h * k3[0], y[1] + h * k3[1]});
            const std::array<double, 2> y1{y[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                                           y[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
            if (step > 10 && y[0] < al && y1[0] >= al) {
                const double w = (al - y[0]) / (y1[0] - y[0]);
                rk4_gap = std::fabs(y[1] + w * (y1[1] - y[1]) - 1.1 * z5);
                break;
            }
            y = y1;
        }
        o.note << " p=5 closure " << num(gap) << " (rk4 " << num(rk4_gap) << ");";
        o.require(gap < 1e-5 && rk4_gap < 1e-5, "closed orbit");

        const double z4 = m0_height(C1);
        const PoincareReport coarse4 = poincare_return(C1, 1.1 * z4, 5);
        const PoincareReport out4 = poincare_return(C1, z4 * (1.0 + 1e-4), 5);
        const ProblemParams q6 = with_p(C1, 6.0);
        const PoincareReport in6 = poincare_return(q6, 1.1 * m0_height(q6), 5);
        o.note << " p=4 from 1e-4 z0: " << out4.returns.size() << " returns, "
               << (out4.strictly_increasing() ? "outward" : "not outward") << " (from 0.1 z0: "
               << coarse4.returns.size() << " returns before escaping); p=6 from 0.1 z0: " << in6.returns.size()
               << " returns, " << (in6.strictly_decreasing() ? "inward" : "not inward");
        o.require(out4.returns.size() == 5 && out4.strictly_increasing(), "p=4 outward");
        o.require(in6.returns.size() == 5 && in6.strictly_decreasing(), "p=6 inward");
    });

    std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
