#include <cmath>

#include "doctest.h"
#include "pucci/energy.hpp"
#include "pucci/radial_ivp.hpp"

using namespace pucci;

namespace {
const ProblemParams C1{1.0, 1.5, 4, 4.0, 0.0, Operator::Plus};
}

TEST_CASE("energy examples") {
    CHECK(small_energy(1.0, 1.0, 0.0, 1.0, C1) == doctest::Approx(0.2));
    for (double delta : {0.5, 3.0}) CHECK(small_energy(1.0, 0.0, delta, 1.5, C1) == doctest::Approx(delta * delta / 2));
    CHECK(small_energy(1.0, 1.0, 1.0, 0.4, C1) == doctest::Approx(1.0));
    // Big energy carries r^{2(Ñ₋-1)+a} = r^9.
    CHECK(big_energy(2.0, 1.0, 1.0, 0.4, C1) == doctest::Approx(512.0));
    CHECK(big_energy(3.0, 0.0, 1.0, 1.0, C1) == doctest::Approx(std::pow(3.0, 9) / 2));
    ProblemParams weighted = C1;
    weighted.a = 1.0;
    CHECK(small_energy(2.0, 0.0, 2.0, 1.0, weighted) == doctest::Approx(1.0));
    CHECK(sigma_value(Sigma::lambda, C1) == 1.0);
    CHECK(sigma_value(Sigma::Lambda, C1) == 1.5);
}

TEST_CASE("energies are monotone along a solved shot") {
    for (double delta : {2.0, 16.0, 200.0}) {
        CAPTURE(delta);
        IntegratorConfig cfg;
        cfg.r_max = 1e4;
        const SolutionProfile prof = integrate_ivp({C1, 1.0, delta}, cfg);
        REQUIRE(prof.rho);
        const MonotonicityReport rep = monotonicity_audit(prof, 1e-7);
        CHECK(rep.monotone());
        CHECK(rep.bounds_hold());
        CHECK(rep.small_delta_ratio <= 1.0);
        REQUIRE(rep.tau_growth_ratio);
        CHECK(*rep.tau_growth_ratio >= 1.0);

        const auto samples = energy_samples(prof);
        REQUIRE(samples.size() == prof.samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (prof.samples[i].r < *prof.tau) CHECK(samples[i].sigma_big == Sigma::lambda);
            if (prof.samples[i].r > *prof.tau) CHECK(samples[i].sigma_big == Sigma::Lambda);
        }
    }
}

TEST_CASE("a corrupted derivative breaks monotonicity") {
    const SolutionProfile prof = integrate_ivp({C1, 1.0, 16.0});
    SolutionProfile broken = prof;
    const std::size_t k = broken.samples.size() / 4;
    broken.samples[k].du *= 1.05;
    const MonotonicityReport rep = monotonicity_audit(broken, 1e-7);
    CHECK_FALSE(rep.monotone());
    CHECK(rep.worst() > 1e-4);
}

TEST_CASE("refinement detects a coarse integration") {
    IntegratorConfig fine;
    fine.r_max = 4.0;
    const RefinementReport good = monotonicity_refinement({C1, 1.0, 16.0}, fine);
    CHECK(good.improves());
    CHECK(good.converged(1e-7));
    CHECK(good.energy_drift < 1e-9);

    IntegratorConfig coarse = fine;
    coarse.rel_tol = 1e-2;
    coarse.abs_tol = 1e-4;
    const RefinementReport bad = monotonicity_refinement({C1, 1.0, 16.0}, coarse);
    CHECK_FALSE(bad.converged(1e-7));
    CHECK(bad.energy_drift > 1e-4);
}
