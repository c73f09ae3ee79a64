#include "pucci/io/commands.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "pucci/energy.hpp"
#include "pucci/error.hpp"
#include "pucci/io/invariants.hpp"
#include "pucci/io/portrait.hpp"
#include "pucci/io/tables.hpp"
#include "pucci/shooting.hpp"

namespace pucci::io {

namespace {

using Json = nlohmann::ordered_json;

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(format_number(v)); }

Json config_json(const RunConfig& c, const std::string& command) {
    const DerivedExponents ex = derive_exponents(c.problem);
    Json j;
    j["command"] = command;
    j["problem"] = {{"operator", std::string(to_string(c.problem.op))},
                    {"lambda", c.problem.lambda},
                    {"Lambda", c.problem.Lambda},
                    {"N", c.problem.N},
                    {"p", c.problem.p},
                    {"a", c.problem.a}};
    j["derived"] = {{"Ntilde_plus", ex.Ntilde_plus}, {"Ntilde_minus", ex.Ntilde_minus},
                    {"p_serrin", ex.p_serrin},       {"p_pseudo", ex.p_pseudo},
                    {"p_laplace", ex.p_laplace},     {"alpha", ex.alpha}};
    Json geo;
    if (c.geometry == GeometryKind::Annulus) {
        geo = {{"kind", "annulus"}, {"inner", c.inner}, {"outer", c.outer}};
    } else {
        geo = {{"kind", "exterior"}, {"R", c.exterior_R}};
    }
    geo["negative"] = c.negative;
    j["geometry"] = geo;
    const SolverConfig& s = c.solver;
    j["solver"] = {{"rel_tol", s.integrator.rel_tol},
                   {"abs_tol", s.integrator.abs_tol},
                   {"max_steps", s.integrator.max_steps},
                   {"phase_rel_tol", s.phase.rel_tol},
                   {"phase_abs_tol", s.phase.abs_tol},
                   {"x_escape", s.phase.x_escape},
                   {"converge_tol", s.phase.converge_tol},
                   {"manifold_eps", s.phase.manifold_eps},
                   {"delta_min", s.delta_min},
                   {"delta_max", s.delta_max},
                   {"expansion", s.expansion},
                   {"delta_rel_tol", s.delta_rel_tol},
                   {"max_bisections", s.max_bisections},
                   {"annulus_rmax_factor", s.annulus_rmax_factor},
                   {"t_budget", s.t_budget},
                   {"fast_tol", s.fast_tol},
                   {"pseudo_crossings", s.pseudo_crossings},
                   {"pseudo_amplitude", s.pseudo_amplitude},
                   {"fit_lo_decades", s.fit_lo_decades},
                   {"fit_hi_decades", s.fit_hi_decades},
                   {"boundary_tol", c.boundary_tol}};
    j["exterior"] = {{"mode", c.mode}, {"sweep_lo", c.sweep_lo}, {"sweep_hi", c.sweep_hi},
                     {"sweep_count", c.sweep_count}};
    j["portrait"] = {{"fan", c.fan}, {"t_end", c.portrait_t}, {"manifold_t", c.manifold_t}};
    j["invariants"] = {{"budget", c.budget},
                       {"seed", c.seed},
                       {"energy_tol", c.energy_tol},
                       {"poincare_offset", c.poincare_offset},
                       {"poincare_returns", c.poincare_returns},
                       {"slow_delta", c.slow_delta}};
    return j;
}

Json report_json(const SolveReport& r) {
    Json j;
    j["found_delta"] = r.found_delta;
    j["boundary_residual"] = r.boundary_residual;
    j["negative"] = r.negative;
    j["decay"] = std::string(to_string(r.decay));
    j["bracket_lo"] = opt(r.bracket_lo);
    j["bracket_hi"] = opt(r.bracket_hi);
    if (r.bracket_lo && r.bracket_hi) {
        j["bracket_relative_width"] = std::fabs(*r.bracket_hi - *r.bracket_lo) / std::fabs(*r.bracket_hi);
    }
    j["tau"] = opt(r.profile.tau);
    j["rho"] = opt(r.profile.rho);
    j["samples"] = r.profile.samples.size();
    Json hist = Json::array();
    for (const BracketStep& st : r.bracket_history) hist.push_back({{"delta", st.delta}, {"rho", opt(st.rho)}});
    j["bracket_history"] = hist;
    j["diagnostics"] = r.diagnostics;
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int fail(std::ostream& err, const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidParams || e.kind() == ErrorKind::InvalidInput ||
                   e.kind() == ErrorKind::InvalidAnnulus || e.kind() == ErrorKind::ConfigParse ||
                   e.kind() == ErrorKind::Io
               ? kExitUsage
               : kExitFailure;
}

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> g(static_cast<std::size_t>(count));
    const double step = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = i + 1 == count ? hi : lo * std::exp(step * i);
    return g;
}

}  // namespace

int cmd_solve_annulus(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.geometry != GeometryKind::Annulus) {
            throw Error(ErrorKind::ConfigParse, "solve-annulus needs geometry.kind = annulus");
        }
        check(config);
        const AnnulusRequest req{config.problem, config.inner, config.outer, config.boundary_tol};
        const SolveReport rep = config.negative ? solve_negative_annulus(req, config.solver)
                                                : solve_annulus(req, config.solver);

        const MonotonicityReport mono = monotonicity_audit(rep.profile, config.energy_tol);
        IntegratorConfig ic = config.solver.integrator;
        ic.r_max = 2.0 * config.outer;
        const RefinementReport ref =
            monotonicity_refinement(rep.profile.input, ic, config.energy_tol);
        const double residual = residual_audit(rep.profile);

        Json audit;
        audit["ode_residual"] = residual;
        audit["interior_positive"] = rep.interior_positive;
        audit["unique_maximum"] = rep.unique_maximum;
        audit["energy"] = {{"tolerance", mono.tolerance},
                           {"small_energy_violation", mono.small_energy.relative},
                           {"small_energy_violation_r", mono.small_energy.r},
                           {"big_lambda_violation", mono.big_lambda.relative},
                           {"big_lambda_violation_r", mono.big_lambda.r},
                           {"big_Lambda_violation", mono.big_Lambda.relative},
                           {"big_Lambda_violation_r", mono.big_Lambda.r},
                           {"monotone", mono.monotone()},
                           {"small_delta_ratio", mono.small_delta_ratio},
                           {"tau_growth_ratio", opt(mono.tau_growth_ratio)},
                           {"bounds_hold", mono.bounds_hold()},
                           {"refinement_coarse", ref.coarse.worst()},
                           {"refinement_fine", ref.fine.worst()},
                           {"refinement_drift", ref.energy_drift},
                           {"refinement_ok", ref.improves() && ref.converged(config.energy_tol)}};

        Json summary = config_json(config, "solve-annulus");
        summary["result"] = report_json(rep);
        summary["files"] = {"summary.json", "profile.csv", "audit.json"};
        write_file(config.out_dir, "profile.csv", profile_table(rep.profile).str());
        write_file(config.out_dir, "audit.json", dump(audit));
        write_file(config.out_dir, "summary.json", dump(summary));

        const bool ok = rep.boundary_residual < config.boundary_tol;
        out << "found_delta " << format_number(rep.found_delta) << "\n"
            << "boundary_residual " << format_number(rep.boundary_residual) << "\n"
            << "written to " << config.out_dir.string() << "\n";
        if (!ok) err << "error: boundary residual above tolerance\n";
        return ok ? kExitOk : kExitFailure;
    } catch (const Error& e) {
        return fail(err, e);
    }
}

int cmd_solve_exterior(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.geometry != GeometryKind::Exterior) {
            throw Error(ErrorKind::ConfigParse, "solve-exterior needs geometry.kind = exterior");
        }
        check(config);
        const double R = config.exterior_R;
        ProblemParams params = config.problem;
        if (config.negative) params.op = swapped(params.op);
        Json summary = config_json(config, "solve-exterior");

        if (config.mode == "fast") {
            SolveReport rep;
            try {
                rep = config.negative ? solve_negative_exterior(config.problem, R, config.solver)
                                      : find_fast_decay_delta(config.problem, R, config.solver);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NoTransitionFound) throw;
                summary["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
                write_file(config.out_dir, "summary.json", dump(summary));
                err << "error: NoTransitionFound: " << e.what() << "\n";
                return kExitFailure;
            }
            Json res = report_json(rep);
            res["delta_star"] = rep.found_delta;
            res["fit_window"] = {R * std::pow(10.0, config.solver.fit_lo_decades),
                                 R * std::pow(10.0, config.solver.fit_hi_decades)};
            res["fit_exponent"] = opt(rep.fit_exponent);
            res["expected_exponent"] = opt(rep.expected_exponent);
            res["distance_to_stable_manifold"] = opt(rep.distance_to_stable_manifold);
            summary["result"] = res;

            std::vector<std::string> files{"summary.json", "profile.csv"};
            write_file(config.out_dir, "profile.csv", profile_table(rep.profile).str());
            if (rep.phase) {
                write_file(config.out_dir, "phase.csv", trajectory_table(*rep.phase).str());
                files.push_back("phase.csv");
            }
            try {
                const ManifoldRun ups = stable_manifold_A0(params, -config.manifold_t, config.solver.phase);
                write_file(config.out_dir, "stable_manifold.csv", trajectory_table(ups.trajectory).str());
                files.push_back("stable_manifold.csv");
                summary["result"]["stable_manifold"] = {{"eps", ups.eps},
                                                        {"halving_gap", ups.halving_gap},
                                                        {"axis_crossing_z", opt(ups.axis_crossing_z)},
                                                        {"axis_crossing_t", opt(ups.axis_crossing_t)}};
            } catch (const Error& e) {
                summary["result"]["stable_manifold"] = {{"error", e.what()}};
            }
            summary["files"] = files;
            write_file(config.out_dir, "summary.json", dump(summary));
            out << "delta_star " << format_number(rep.found_delta) << "\n"
                << "decay " << to_string(rep.decay) << "\n"
                << "fit_exponent " << (rep.fit_exponent ? format_number(*rep.fit_exponent) : "n/a") << "\n"
                << "written to " << config.out_dir.string() << "\n";
            return kExitOk;
        }

        if (config.mode == "sweep") {
            const DExploration ex =
                explore_D(params, R, log_grid(config.sweep_lo, config.sweep_hi, config.sweep_count),
                          config.solver, true);
            Json comps = Json::array();
            for (const auto& [a, b] : ex.annular_components) comps.push_back({a, b});
            summary["result"] = {{"rows", ex.rows.size()},
                                 {"annular_components", comps},
                                 {"delta_star_grid", opt(ex.delta_star_grid)},
                                 {"delta_star_refined", opt(ex.delta_star_refined)}};
            summary["files"] = {"summary.json", "sweep.csv"};
            write_file(config.out_dir, "sweep.csv", sweep_table(ex).str());
            write_file(config.out_dir, "summary.json", dump(summary));
            out << "rows " << ex.rows.size() << "\n"
                << "annular_components " << ex.annular_components.size() << "\n"
                << "delta_star " << (ex.delta_star_refined ? format_number(*ex.delta_star_refined) : "n/a")
                << "\n"
                << "written to " << config.out_dir.string() << "\n";
            return kExitOk;
        }

        const double delta = std::stod(config.mode.substr(6));
        const DecayAnalysis da = analyze_decay(params, R, delta, config.solver);
        Json res;
        res["delta"] = config.negative ? -delta : delta;
        res["decay"] = std::string(to_string(da.decay));
        res["eventually_annular"] = da.eventually_annular;
        res["tau"] = opt(da.tau);
        res["rho_estimate"] = opt(da.rho_estimate);
        res["termination"] = std::string(to_string(da.trajectory.termination));
        res["section_crossings"] = da.section_crossings;
        res["tail_x_amplitude"] = da.tail_x_amplitude;
        res["note"] = da.note;
        summary["result"] = res;
        summary["files"] = {"summary.json", "phase.csv"};
        write_file(config.out_dir, "phase.csv", trajectory_table(da.trajectory).str());
        write_file(config.out_dir, "summary.json", dump(summary));
        out << "delta " << format_number(delta) << "\n"
            << "decay " << to_string(da.decay) << "\n"
            << "written to " << config.out_dir.string() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        return fail(err, e);
    }
}

int cmd_phase_portrait(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate(config.problem);
        PortraitOptions po;
        po.fan = config.fan;
        po.t_end = config.portrait_t;
        po.manifold_t = config.manifold_t;
        po.phase = config.solver.phase;
        const Portrait portrait = build_portrait(config.problem, po);

        CsvTable curves({"curve", "role", "index", "t", "x", "z"});
        for (const PortraitCurve& c : portrait.curves) {
            for (std::size_t i = 0; i < c.points.size(); ++i) {
                const PhasePoint& p = c.points[i];
                curves.add_row({c.name, std::string(to_string(c.role)), std::to_string(i), format_number(p.t),
                                format_number(p.x), format_number(p.z)});
            }
        }

        Json summary = config_json(config, "phase-portrait");
        Json st = Json::array();
        for (const StationaryPoint& sp : portrait.stationary) {
            st.push_back({{"name", std::string(to_string(sp.name))},
                          {"x", sp.x},
                          {"z", sp.z},
                          {"classification", std::string(to_string(sp.classification))},
                          {"eigenvalues", {{sp.eigenvalues[0].real(), sp.eigenvalues[0].imag()},
                                           {sp.eigenvalues[1].real(), sp.eigenvalues[1].imag()}}},
                          {"in_first_quadrant", sp.in_closed_first_quadrant}});
        }
        const Geometry& g = portrait.geometry;
        Json cj = Json::array();
        for (const PortraitCurve& c : portrait.curves) {
            Json e{{"name", c.name},
                   {"role", std::string(to_string(c.role))},
                   {"points", c.points.size()},
                   {"termination", std::string(to_string(c.termination))}};
            if (c.role == CurveRole::Closed && !c.points.empty()) {
                e["closure_gap"] = std::fabs(c.points.back().z - c.points.front().z);
            }
            if (c.role == CurveRole::StableA0) {
                bool crosses = false;
                for (std::size_t i = 1; i < c.points.size(); ++i) {
                    if ((c.points[i - 1].x < 0.0) != (c.points[i].x < 0.0)) crosses = true;
                }
                e["crosses_z_axis"] = crosses;
            }
            cj.push_back(e);
        }
        summary["result"] = {{"stationary_points", st},
                             {"geometry",
                              {{"ell_slope", g.ell_slope},
                               {"pi1_linear", g.pi1_linear},
                               {"pi1_quadratic", g.pi1_quadratic},
                               {"pi2_x", g.pi2_x},
                               {"tangency", {g.tangency_x, g.tangency_z}},
                               {"box", {g.box_x, g.box_z}}}},
                             {"curves", cj},
                             {"notes", portrait.notes}};
        summary["files"] = {"summary.json", "portrait.svg", "stationary.csv", "curves.csv"};
        write_file(config.out_dir, "portrait.svg", render_svg(portrait));
        write_file(config.out_dir, "stationary.csv", stationary_table(portrait.stationary).str());
        write_file(config.out_dir, "curves.csv", curves.str());
        write_file(config.out_dir, "summary.json", dump(summary));
        for (const StationaryPoint& sp : portrait.stationary) {
            out << to_string(sp.name) << " " << to_string(sp.classification) << "\n";
        }
        out << "written to " << config.out_dir.string() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        return fail(err, e);
    }
}

int cmd_check_invariants(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        check(config);
        const InvariantReport rep = run_invariants(config);
        Json checks = Json::array();
        for (const CheckRecord& c : rep.checks) {
            checks.push_back({{"name", c.name},
                              {"passed", c.passed},
                              {"value", std::isnan(c.value) ? Json(nullptr) : num(c.value)},
                              {"threshold", std::isnan(c.threshold) ? Json(nullptr) : num(c.threshold)},
                              {"detail", c.detail}});
            out << (c.passed ? "PASS " : "FAIL ") << c.name;
            if (!std::isnan(c.value)) out << " value=" << format_number(c.value);
            if (!std::isnan(c.threshold)) out << " bound=" << format_number(c.threshold);
            out << ": " << c.detail << "\n";
        }
        Json summary = config_json(config, "check-invariants");
        summary["result"] = {{"all_passed", rep.all_passed()}, {"checks", checks}};
        summary["files"] = {"invariants.json"};
        write_file(config.out_dir, "invariants.json", dump(summary));
        if (!rep.all_passed()) err << "error: invariant checks failed\n";
        return rep.all_passed() ? kExitOk : kExitFailure;
    } catch (const Error& e) {
        return fail(err, e);
    }
}

}  // namespace pucci::io
