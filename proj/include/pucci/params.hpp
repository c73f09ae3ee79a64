#pragma once

#include <optional>
#include <string_view>

namespace pucci {

/// Which Pucci extremal operator drives the equation.
enum class Operator { Plus, Minus };

Operator swapped(Operator op) noexcept;
std::string_view to_string(Operator op) noexcept;
std::optional<Operator> parse_operator(std::string_view text) noexcept;

/// Parameters of  M±(D²u) + |x|^a u^p = 0  with ellipticity constants
/// 0 < lambda <= Lambda.
struct ProblemParams {
    double lambda = 1.0;
    double Lambda = 1.0;
    int N = 3;
    double p = 2.0;
    double a = 0.0;
    Operator op = Operator::Plus;
};

/// Throws Error(InvalidParams) naming the first violated constraint.
void validate(const ProblemParams& params);

struct DerivedExponents {
    double Ntilde_plus = 0.0;
    double Ntilde_minus = 0.0;
    double p_pseudo = 0.0;   // (Ñ + 2a + 2) / (Ñ - 2)
    double p_serrin = 0.0;   // (Ñ + a) / (Ñ - 2)
    double p_laplace = 0.0;  // (N + 2 + 2a) / (N - 2)
    double alpha = 0.0;      // (2 + a) / (p - 1)
};

/// The operator variant picks the dimension-like number feeding p_pseudo and
/// p_serrin: Ñ₊ for Plus, Ñ₋ for Minus.
DerivedExponents derive_exponents(const ProblemParams& params);

// Convenience accessors used throughout the phase-plane code. They assume
// validated parameters.

double ntilde_plus(const ProblemParams& params) noexcept;
double ntilde_minus(const ProblemParams& params) noexcept;

/// Ñ₊ for Plus, Ñ₋ for Minus.
double effective_dimension(const ProblemParams& params) noexcept;

/// The "other" dimension-like number: Ñ₋ for Plus, Ñ₊ for Minus. Governs the
/// increasing (second quadrant) part of a shot solution.
double increasing_dimension(const ProblemParams& params) noexcept;

/// Weight dividing z in the convex branch of the phase field: Λ for Plus, λ for Minus.
double convex_weight(const ProblemParams& params) noexcept;

/// Weight dividing z in the concave branch: λ for Plus, Λ for Minus.
double concave_weight(const ProblemParams& params) noexcept;

double alpha(const ProblemParams& params) noexcept;

/// z-coordinate of the stationary point M0: α σ (Ñ - 2 - α), σ the convex weight.
/// Positive exactly when p exceeds the Serrin-type exponent.
double m0_height(const ProblemParams& params) noexcept;

}  // namespace pucci
