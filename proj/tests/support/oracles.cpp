#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

double pucci(const std::vector<double>& eigenvalues, double lambda, double Lambda, bool plus) {
    const double up = plus ? Lambda : lambda;
    const double down = plus ? lambda : Lambda;
    double out = 0.0;
    for (double e : eigenvalues) out += e >= 0.0 ? up * e : down * e;
    return out;
}

double second_derivative(double r, double u, double du, const pucci::ProblemParams& params) {
    const bool plus = params.op == pucci::Operator::Plus;
    const double up = plus ? params.Lambda : params.lambda;
    const double down = plus ? params.lambda : params.Lambda;
    const double g = du / r;
    double rest = 0.0;
    for (int i = 0; i < params.N - 1; ++i) rest += g >= 0.0 ? up * g : down * g;
    const double source = std::pow(r, params.a) * std::pow(std::fabs(u), params.p - 1.0) * u;
    const double target = -source - rest;
    const double v_up = target / up;
    if (v_up >= 0.0) return v_up;
    return target / down;
}

namespace {

std::array<double, 2> rhs(double r, const std::array<double, 2>& y, const pucci::ProblemParams& params) {
    return {y[1], second_derivative(r, y[0], y[1], params)};
}

std::array<double, 2> rk4_step(double r, const std::array<double, 2>& y, double h,
                               const pucci::ProblemParams& params) {
    auto add = [](const std::array<double, 2>& a, const std::array<double, 2>& b, double s) {
        return std::array<double, 2>{a[0] + s * b[0], a[1] + s * b[1]};
    };
    const auto k1 = rhs(r, y, params);
    const auto k2 = rhs(r + h / 2, add(y, k1, h / 2), params);
    const auto k3 = rhs(r + h / 2, add(y, k2, h / 2), params);
    const auto k4 = rhs(r + h, add(y, k3, h), params);
    return {y[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            y[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

}  // namespace

Rk4Run rk4_shoot(const pucci::ProblemParams& params, double inner, double delta, double r_end,
                 double h, const std::vector<double>& radii) {
    Rk4Run out;
    double r = inner;
    std::array<double, 2> y{0.0, delta};
    std::size_t next = 0;
    while (r < r_end) {
        double step = std::min(h, r_end - r);
        if (next < radii.size() && radii[next] > r && radii[next] - r < step) step = radii[next] - r;
        const auto y1 = rk4_step(r, y, step, params);
        const double r1 = r + step;
        if (!out.tau && (y[1] > 0.0) != (y1[1] > 0.0)) {
            out.tau = r + step * y[1] / (y[1] - y1[1]);
        }
        if (r > inner && (y[0] > 0.0) != (y1[0] > 0.0)) {
            out.rho = r + step * y[0] / (y[0] - y1[0]);
            return out;
        }
        r = r1;
        y = y1;
        while (next < radii.size() && std::fabs(radii[next] - r) <= 1e-12 * r) {
            out.at.push_back({r, y[0], y[1]});
            ++next;
        }
    }
    return out;
}

std::array<double, 2> phase_field(double x, double z, const pucci::ProblemParams& params) {
    // At r = 1: u = z^{1/(p-1)}, u' = -x u.
    const double u = std::pow(z, 1.0 / (params.p - 1.0));
    const double du = -x * u;
    const double d2 = second_derivative(1.0, u, du, params);
    // x = -r u'/u  =>  dx/dt = r dx/dr = -r u'/u - r^2 u''/u + r^2 u'^2/u^2.
    const double xdot = -du / u - d2 / u + (du / u) * (du / u);
    const double zdot = z * (2.0 + params.a - (params.p - 1.0) * x);
    return {xdot, zdot};
}

Matrix central_jacobian(double x, double z, const pucci::ProblemParams& params, double h) {
    // The chain rule needs u > 0, so points on the x axis are probed from just above it.
    const double zb = std::max(z, h);
    const auto a = phase_field(x + h, zb, params);
    const auto b = phase_field(x - h, zb, params);
    const auto c = phase_field(x, zb + h / 2, params);
    const auto d = phase_field(x, zb - h / 2, params);
    return {{{(a[0] - b[0]) / (2 * h), (c[0] - d[0]) / h}, {(a[1] - b[1]) / (2 * h), (c[1] - d[1]) / h}}};
}

std::array<std::complex<double>, 2> eigenvalues(const Matrix& m) {
    const double tr = m[0][0] + m[1][1];
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const std::complex<double> s = std::sqrt(std::complex<double>(tr * tr - 4 * det));
    return {(tr - s) / 2.0, (tr + s) / 2.0};
}

double regular_solution_slope(const pucci::ProblemParams& params, double r_probe, double ds) {
    // y = (u, u'), d/ds = r d/dr.
    double s = std::log(1e-8);
    const double s_end = std::log(r_probe);
    std::array<double, 2> y{1.0, 0.0};
    auto f = [&](double sv, const std::array<double, 2>& v) {
        const double r = std::exp(sv);
        return std::array<double, 2>{r * v[1], r * second_derivative(r, v[0], v[1], params)};
    };
    while (s < s_end) {
        const double h = std::min(ds, s_end - s);
        const auto k1 = f(s, y);
        const auto k2 = f(s + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
        const auto k3 = f(s + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
        const auto k4 = f(s + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
        y[0] += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
        y[1] += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
        s += h;
    }
    const double r = r_probe;
    const double x = -r * y[1] / y[0];
    const double z = std::pow(r, 2.0 + params.a) * std::pow(y[0], params.p - 1.0);
    return z / x;
}

double alpha(const pucci::ProblemParams& params) { return (2.0 + params.a) / (params.p - 1.0); }

double ntilde(const pucci::ProblemParams& params, bool plus_version) {
    const double ratio = plus_version ? params.lambda / params.Lambda : params.Lambda / params.lambda;
    return ratio * (params.N - 1) + 1.0;
}

}  // namespace oracle
