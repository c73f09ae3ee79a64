#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pucci/error.hpp"
#include "pucci/shooting.hpp"

using namespace pucci;

namespace {
const ProblemParams C1{1.0, 1.5, 4, 4.0, 0.0, Operator::Plus};
const ProblemParams Lap3{1.0, 1.0, 3, 6.0, 0.0, Operator::Plus};

ProblemParams with_p(ProblemParams q, double p) {
    q.p = p;
    return q;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return g;
}
}  // namespace

TEST_CASE("first zero as a function of the slope") {
    const auto rho1 = rho_of_delta(C1, 1.0, 1.0);
    REQUIRE(rho1);
    const oracle::Rk4Run ref = oracle::rk4_shoot(C1, 1.0, 1.0, *rho1 + 1.0, 1e-4);
    CHECK(*rho1 == doctest::Approx(*ref.rho).epsilon(1e-6));

    // Large slopes: the zero comes back close to the inner radius.
    const auto big = rho_of_delta(C1, 1.0, 1e6);
    REQUIRE(big);
    CHECK(*big - 1.0 < 0.1);

    IntegratorConfig cfg;
    cfg.r_max = 1e3;
    CHECK_FALSE(rho_of_delta(C1, 1.0, 1e-4, cfg).has_value());

    // ρ decreases with δ over the sampled range.
    double prev = 1e300;
    for (double d : log_grid(0.5, 1e4, 15)) {
        const auto r = rho_of_delta(C1, 1.0, d);
        REQUIRE(r);
        CHECK(*r < prev);
        prev = *r;
    }
}

TEST_CASE("annulus solves") {
    struct Case {
        double inner, outer;
    };
    for (const Case& c : {Case{1.0, 2.0}, Case{1.0, 1.1}, Case{0.5, 3.0}, Case{2.0, 20.0}}) {
        CAPTURE(c.outer);
        const SolveReport rep = solve_annulus({C1, c.inner, c.outer, 1e-8});
        CHECK(rep.boundary_residual < 1e-8);
        CHECK(rep.interior_positive);
        CHECK(rep.unique_maximum);
        CHECK(rep.found_delta > 0.0);
        const oracle::Rk4Run ref = oracle::rk4_shoot(C1, c.inner, rep.found_delta, 2 * c.outer, 1e-4 * c.outer);
        REQUIRE(ref.rho);
        CHECK(*ref.rho == doctest::Approx(c.outer).epsilon(1e-6));
    }
    const SolveReport c1 = solve_annulus({C1, 1.0, 2.0, 1e-8});
    CHECK(c1.found_delta == doctest::Approx(16.0441023111).epsilon(1e-8));
}

TEST_CASE("annulus scaling covariance") {
    // u_γ solves the problem on (γ^{-1/α} a, γ^{-1/α} b) with slope γ^{1+1/α} δ.
    const double alpha = oracle::alpha(C1);
    const SolveReport base = solve_annulus({C1, 1.0, 2.0, 1e-10});
    for (double gamma : {0.25, 3.0}) {
        const double s = std::pow(gamma, -1.0 / alpha);
        const SolveReport scaled = solve_annulus({C1, s, 2.0 * s, 1e-10});
        CHECK(scaled.found_delta == doctest::Approx(std::pow(gamma, 1.0 + 1.0 / alpha) * base.found_delta).epsilon(1e-7));
    }
}

TEST_CASE("invalid annuli") {
    for (auto [a, b] : {std::pair{2.0, 1.0}, std::pair{1.0, 1.0}, std::pair{0.0, 1.0}, std::pair{-1.0, 2.0}}) {
        try {
            solve_annulus({C1, a, b, 1e-8});
            FAIL("expected InvalidAnnulus");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InvalidAnnulus);
        }
    }
}

TEST_CASE("negative solutions come from the operator swap") {
    const SolveReport neg = solve_negative_annulus({C1, 1.0, 3.0, 1e-8});
    CHECK(neg.negative);
    CHECK(neg.found_delta < 0.0);
    CHECK(neg.boundary_residual < 1e-8);
    for (std::size_t i = 1; i + 1 < neg.profile.samples.size(); ++i) CHECK(neg.profile.samples[i].u < 0.0);
    CHECK(neg.profile.input.params.op == Operator::Plus);
    CHECK(residual_audit(neg.profile) < 1e-2);
    const oracle::Rk4Run ref = oracle::rk4_shoot(C1, 1.0, neg.found_delta, 6.0, 1e-4);
    REQUIRE(ref.rho);
    CHECK(*ref.rho == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("fast decay threshold in the semilinear case") {
    SolverConfig cfg;
    const SolveReport rep = find_fast_decay_delta(Lap3, 1.0, cfg);
    CHECK(rep.decay == DecayClass::Fast);
    REQUIRE(rep.bracket_lo);
    REQUIRE(rep.bracket_hi);
    CHECK((*rep.bracket_hi - *rep.bracket_lo) / rep.found_delta < 1e-10);
    REQUIRE(rep.fit_exponent);
    CHECK(*rep.fit_exponent == doctest::Approx(-1.0).epsilon(1e-3));  // -(N - 2)
    REQUIRE(rep.distance_to_stable_manifold);
    CHECK(*rep.distance_to_stable_manifold < 1e-6);

    // Slopes below the threshold are not fast and do not blow up in x.
    const DecayClass below = classify_decay(Lap3, 1.0, rep.found_delta * 0.9, cfg);
    CHECK(below != DecayClass::Fast);
    CHECK(below != DecayClass::Annular);
    CHECK(classify_decay(Lap3, 1.0, rep.found_delta * 1.1, cfg) == DecayClass::Annular);
}

TEST_CASE("no fast decay below the threshold exponent") {
    try {
        find_fast_decay_delta(C1, 1.0);
        FAIL("expected NoTransitionFound");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoTransitionFound);
    }
}

TEST_CASE("slow decay tail") {
    const ProblemParams q = with_p(C1, 6.0);
    const DecayAnalysis shot = analyze_decay(q, 1.0, 1e-3);
    CHECK(shot.decay == DecayClass::Slow);
    const PhasePoint end = shot.trajectory.points.back();
    const auto m0 = stationary_point(StationaryName::M0, q);
    CHECK(std::hypot(end.x - m0.x, end.z - m0.z) < 1e-3);
    const double t_end = end.t;
    CHECK(fit_log_slope(shot.trajectory, t_end - 2.0 * std::log(10.0), t_end) ==
          doctest::Approx(-oracle::alpha(q)).epsilon(1e-2));
}

TEST_CASE("exploring the slope set") {
    SolverConfig cfg;
    const DExploration lap = explore_D(Lap3, 1.0, log_grid(1e-2, 1e2, 40), cfg);
    REQUIRE(lap.rows.size() == 40);
    CHECK(lap.annular_components.size() == 1);
    REQUIRE(lap.delta_star_refined);
    CHECK(*lap.delta_star_refined == doctest::Approx(0.5518981171).epsilon(1e-8));
    for (const DRow& row : lap.rows) {
        CHECK_FALSE(row.failed);
        CHECK((row.decay == DecayClass::Annular) == (row.delta > *lap.delta_star_refined));
    }

    const DExploration c1 = explore_D(C1, 1.0, log_grid(1e-3, 1e3, 30), cfg, false);
    for (const DRow& row : c1.rows) CHECK(row.decay == DecayClass::Annular);
    CHECK(c1.annular_components.size() == 1);

    // The output order does not depend on the number of workers.
    SolverConfig one = cfg;
    one.threads = 1;
    SolverConfig four = cfg;
    four.threads = 4;
    const auto g = log_grid(0.1, 10.0, 12);
    const DExploration a = explore_D(Lap3, 1.0, g, one, false);
    const DExploration b = explore_D(Lap3, 1.0, g, four, false);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(a.rows[i].delta == b.rows[i].delta);
        CHECK(a.rows[i].decay == b.rows[i].decay);
        CHECK(a.rows[i].rho == b.rows[i].rho);
    }
}

TEST_CASE("numerical threshold exponent scan") {
    const PStarScan scan = estimate_p_star(C1, 1.0, {4.0, 4.5, 5.0, 5.5, 6.0, 7.0});
    REQUIRE(scan.rows.size() == 6);
    CHECK_FALSE(scan.rows.front().second);
    CHECK(scan.rows.back().second);
    REQUIRE(scan.p_star_upper);
    CHECK(*scan.p_star_upper > 4.0);
    CHECK(*scan.p_star_upper <= 6.0);
    MESSAGE("p* upper estimate for C1: " << *scan.p_star_upper);
}
