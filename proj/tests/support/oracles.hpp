#pragma once

// Brute-force reference computations used by the tests. Nothing here calls
// into the library's operator, integrator or phase-plane code.

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "pucci/params.hpp"

namespace oracle {

/// Λ Σ_{e>=0} e + λ Σ_{e<0} e for Plus, roles swapped for Minus.
double pucci(const std::vector<double>& eigenvalues, double lambda, double Lambda, bool plus);

/// u'' solving  Pucci({u'', u'/r x (N-1)}) + r^a |u|^{p-1} u = 0,  found by
/// trying both signs of u''.
double second_derivative(double r, double u, double du, const pucci::ProblemParams& params);

struct State {
    double r = 0.0;
    double u = 0.0;
    double du = 0.0;
};

struct Rk4Run {
    /// States at the requested radii (in order), up to the first zero.
    std::vector<State> at;
    std::optional<double> tau;
    std::optional<double> rho;
};

/// Fixed-step classical RK4 on [inner, r_end] with step h from u = 0,
/// u' = delta. The last step before each requested radius is shortened to
/// land on it. τ and ρ come from linear interpolation of u' and u.
Rk4Run rk4_shoot(const pucci::ProblemParams& params, double inner, double delta, double r_end,
                 double h, const std::vector<double>& radii = {});

/// (ẋ, ż) obtained by the chain rule from the radial equation, with
/// r = e^t at t = 0 (the field is autonomous).
std::array<double, 2> phase_field(double x, double z, const pucci::ProblemParams& params);

using Matrix = std::array<std::array<double, 2>, 2>;
Matrix central_jacobian(double x, double z, const pucci::ProblemParams& params, double h = 1e-6);
std::array<std::complex<double>, 2> eigenvalues(const Matrix& m);

/// Slope z/x of the regular solution u(0) = 1, u'(0) = 0 at radius r_probe,
/// integrated in s = ln r from r = 1e-8 with step ds.
double regular_solution_slope(const pucci::ProblemParams& params, double r_probe = 1e-2,
                              double ds = 1e-3);

/// α, z0, Ñ± from scratch.
double alpha(const pucci::ProblemParams& params);
double ntilde(const pucci::ProblemParams& params, bool plus_version);

}  // namespace oracle
