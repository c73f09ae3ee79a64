#include "pucci/operators.hpp"

#include <cmath>
#include <string>

#include "pucci/error.hpp"

namespace pucci {

double lipschitz_m(double s, const ProblemParams& params) noexcept {
    const bool plus = params.op == Operator::Plus;
    if (s <= 0.0) return (plus ? params.lambda : params.Lambda) * s;
    return (plus ? params.Lambda : params.lambda) * s;
}

double lipschitz_M(double s, const ProblemParams& params) noexcept {
    const bool plus = params.op == Operator::Plus;
    if (s <= 0.0) return s / (plus ? params.lambda : params.Lambda);
    return s / (plus ? params.Lambda : params.lambda);
}

double pucci_eval(std::span<const double> eigenvalues, const ProblemParams& params) {
    if (eigenvalues.empty()) {
        throw Error(ErrorKind::InvalidInput, "pucci_eval: empty eigenvalue list");
    }
    const bool plus = params.op == Operator::Plus;
    const double w_pos = plus ? params.Lambda : params.lambda;
    const double w_neg = plus ? params.lambda : params.Lambda;
    double pos = 0.0;
    double neg = 0.0;
    for (double e : eigenvalues) {
        if (e >= 0.0) {
            pos += e;
        } else {
            neg += e;
        }
    }
    return w_pos * pos + w_neg * neg;
}

double signed_power(double u, double p) noexcept {
    if (u == 0.0) return 0.0;
    return std::pow(std::fabs(u), p - 1.0) * u;
}

double operator_argument(double r, double u, double uprime, const ProblemParams& params) {
    const double weight = params.a == 0.0 ? 1.0 : std::pow(r, params.a);
    return -(params.N - 1) * lipschitz_m(uprime, params) / r - weight * signed_power(u, params.p);
}

double radial_rhs(double r, double u, double uprime, const ProblemParams& params) {
    if (!(r > 0.0)) {
        throw Error(ErrorKind::InvalidInput,
                    "radial_rhs: radius must be positive, got " + std::to_string(r));
    }
    return lipschitz_M(operator_argument(r, u, uprime, params), params);
}

}  // namespace pucci
