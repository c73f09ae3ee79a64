#include "pucci/params.hpp"

#include <cmath>
#include <sstream>

#include "pucci/error.hpp"

namespace pucci {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::InvalidInput: return "InvalidInput";
        case ErrorKind::InvalidAnnulus: return "InvalidAnnulus";
        case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
        case ErrorKind::StiffnessFailure: return "StiffnessFailure";
        case ErrorKind::BracketFailure: return "BracketFailure";
        case ErrorKind::NoTransitionFound: return "NoTransitionFound";
        case ErrorKind::PrecisionLoss: return "PrecisionLoss";
        case ErrorKind::ConfigParse: return "ConfigParse";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

Operator swapped(Operator op) noexcept {
    return op == Operator::Plus ? Operator::Minus : Operator::Plus;
}

std::string_view to_string(Operator op) noexcept {
    return op == Operator::Plus ? "plus" : "minus";
}

std::optional<Operator> parse_operator(std::string_view text) noexcept {
    if (text == "plus" || text == "+" || text == "Plus") return Operator::Plus;
    if (text == "minus" || text == "-" || text == "Minus") return Operator::Minus;
    return std::nullopt;
}

namespace {

[[noreturn]] void reject(const std::string& constraint, const ProblemParams& params) {
    std::ostringstream msg;
    msg << "invalid parameters (" << constraint << "): lambda=" << params.lambda
        << " Lambda=" << params.Lambda << " N=" << params.N << " p=" << params.p
        << " a=" << params.a << " operator=" << to_string(params.op);
    throw Error(ErrorKind::InvalidParams, msg.str());
}

}  // namespace

void validate(const ProblemParams& params) {
    if (!std::isfinite(params.lambda) || !std::isfinite(params.Lambda) ||
        !std::isfinite(params.p) || !std::isfinite(params.a)) {
        reject("all parameters must be finite", params);
    }
    if (!(params.lambda > 0.0)) reject("lambda > 0", params);
    if (!(params.lambda <= params.Lambda)) reject("lambda <= Lambda", params);
    if (params.N < 3) reject("N >= 3", params);
    if (!(params.p > 1.0)) reject("p > 1", params);
    if (!(params.a > -1.0)) reject("a > -1", params);
    if (params.op == Operator::Plus && !(ntilde_plus(params) > 2.0)) {
        reject("Ntilde_plus > 2 for the Plus operator", params);
    }
}

double ntilde_plus(const ProblemParams& params) noexcept {
    return params.lambda / params.Lambda * (params.N - 1) + 1.0;
}

double ntilde_minus(const ProblemParams& params) noexcept {
    return params.Lambda / params.lambda * (params.N - 1) + 1.0;
}

double effective_dimension(const ProblemParams& params) noexcept {
    return params.op == Operator::Plus ? ntilde_plus(params) : ntilde_minus(params);
}

double increasing_dimension(const ProblemParams& params) noexcept {
    return params.op == Operator::Plus ? ntilde_minus(params) : ntilde_plus(params);
}

double convex_weight(const ProblemParams& params) noexcept {
    return params.op == Operator::Plus ? params.Lambda : params.lambda;
}

double concave_weight(const ProblemParams& params) noexcept {
    return params.op == Operator::Plus ? params.lambda : params.Lambda;
}

double alpha(const ProblemParams& params) noexcept {
    return (2.0 + params.a) / (params.p - 1.0);
}

double m0_height(const ProblemParams& params) noexcept {
    const double al = alpha(params);
    return al * convex_weight(params) * (effective_dimension(params) - 2.0 - al);
}

DerivedExponents derive_exponents(const ProblemParams& params) {
    validate(params);
    DerivedExponents out;
    out.Ntilde_plus = ntilde_plus(params);
    out.Ntilde_minus = ntilde_minus(params);
    const double nt = effective_dimension(params);
    out.p_pseudo = (nt + 2.0 * params.a + 2.0) / (nt - 2.0);
    out.p_serrin = (nt + params.a) / (nt - 2.0);
    out.p_laplace = (params.N + 2.0 + 2.0 * params.a) / (params.N - 2.0);
    out.alpha = alpha(params);
    return out;
}

}  // namespace pucci
