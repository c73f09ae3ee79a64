#pragma once

#include <span>

#include "pucci/params.hpp"

namespace pucci {

// Piecewise-linear Lipschitz pieces of the radial equation. For Plus:
//   m(s) = λs (s <= 0), Λs (s > 0);   M(s) = s/λ (s <= 0), s/Λ (s > 0)
// and Minus swaps the roles of λ and Λ.

double lipschitz_m(double s, const ProblemParams& params) noexcept;
double lipschitz_M(double s, const ProblemParams& params) noexcept;

/// Pucci extremal operator evaluated on a Hessian eigenvalue list.
double pucci_eval(std::span<const double> eigenvalues, const ProblemParams& params);

/// |u|^{p-1} u, zero at u = 0.
double signed_power(double u, double p) noexcept;

/// The argument fed to M± in the radial equation:
///   -(N-1) m(u') / r - r^a |u|^{p-1} u.
/// Its zero set is where the operator switches branch (u'' = 0).
double operator_argument(double r, double u, double uprime, const ProblemParams& params);

/// u'' from the radial equation. Throws Error(InvalidInput) for r <= 0.
double radial_rhs(double r, double u, double uprime, const ProblemParams& params);

}  // namespace pucci
