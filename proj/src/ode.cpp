#include "pucci/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pucci/error.hpp"

namespace pucci::ode {

namespace {

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

Vec2 axpy(const Vec2& y, double h, const Vec2& k) noexcept {
    return {y[0] + h * k[0], y[1] + h * k[1]};
}

double error_norm(const Vec2& err, const Vec2& y0, const Vec2& y1, const Options& opt) noexcept {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sc = opt.abs_tol + opt.rel_tol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
        const double q = err[i] / sc;
        acc += q * q;
    }
    return std::sqrt(acc / 2.0);
}

bool finite(const Vec2& v) noexcept { return std::isfinite(v[0]) && std::isfinite(v[1]); }

int sign_of(double v) noexcept { return (v > 0.0) - (v < 0.0); }

double initial_step(const Rhs& rhs, double t0, const Vec2& y0, const Vec2& f0, double span,
                    const Options& opt) {
    double d0 = 0.0, d1 = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sc = opt.abs_tol + opt.rel_tol * std::fabs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / 2.0);
    d1 = std::sqrt(d1 / 2.0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, std::fabs(span));
    const double dir = span >= 0.0 ? 1.0 : -1.0;
    const Vec2 y1 = axpy(y0, dir * h0, f0);
    const Vec2 f1 = rhs(t0 + dir * h0, y1);
    double d2 = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sc = opt.abs_tol + opt.rel_tol * std::fabs(y0[i]);
        const double q = (f1[i] - f0[i]) / sc;
        d2 += q * q;
    }
    d2 = std::sqrt(d2 / 2.0) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 =
        dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, std::fabs(span), opt.max_step});
}

}  // namespace

StepResult dopri_step(const Rhs& rhs, double t, const Vec2& y, const Vec2& f, double h) {
    const Vec2& k1 = f;
    const Vec2 k2 = rhs(t + c2 * h, axpy(y, h * a21, k1));
    const Vec2 k3 = rhs(t + c3 * h, {y[0] + h * (a31 * k1[0] + a32 * k2[0]),
                                     y[1] + h * (a31 * k1[1] + a32 * k2[1])});
    const Vec2 k4 = rhs(t + c4 * h, {y[0] + h * (a41 * k1[0] + a42 * k2[0] + a43 * k3[0]),
                                     y[1] + h * (a41 * k1[1] + a42 * k2[1] + a43 * k3[1])});
    const Vec2 k5 = rhs(
        t + c5 * h,
        {y[0] + h * (a51 * k1[0] + a52 * k2[0] + a53 * k3[0] + a54 * k4[0]),
         y[1] + h * (a51 * k1[1] + a52 * k2[1] + a53 * k3[1] + a54 * k4[1])});
    const Vec2 k6 = rhs(
        t + h,
        {y[0] + h * (a61 * k1[0] + a62 * k2[0] + a63 * k3[0] + a64 * k4[0] + a65 * k5[0]),
         y[1] + h * (a61 * k1[1] + a62 * k2[1] + a63 * k3[1] + a64 * k4[1] + a65 * k5[1])});
    StepResult out;
    for (int i = 0; i < 2; ++i) {
        out.y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                a76 * k6[i]);
    }
    out.f1 = rhs(t + h, out.y1);
    for (int i = 0; i < 2; ++i) {
        out.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * out.f1[i]);
    }
    return out;
}

Vec2 hermite(double t0, const Vec2& y0, const Vec2& f0, double t1, const Vec2& y1,
             const Vec2& f1, double t) noexcept {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    Vec2 out;
    for (int i = 0; i < 2; ++i) {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    return out;
}

namespace {

// Locates the crossing of event `g` inside an accepted step. A bisection on
// the Hermite interpolant brackets it; the bracket is then polished with
// Illinois false position on the exact one-step map h -> g(step(h)).
// Returns the step length that lands on the new-sign side of the crossing.
double locate_crossing(const Rhs& rhs, const EventFn& g, double t, const Vec2& y, const Vec2& f,
                       double h_full, const Vec2& y1, const Vec2& f1, int old_sign,
                       double event_tol) {
    double lo = 0.0;
    double hi = h_full;
    while (std::fabs(hi - lo) > event_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const Vec2 ym = hermite(t, y, f, t + h_full, y1, f1, t + mid);
        if (sign_of(g(t + mid, ym)) == old_sign) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    auto phi = [&](double h) {
        if (h == 0.0) return g(t, y);
        return g(t + h, dopri_step(rhs, t, y, f, h).y1);
    };

    double ga = phi(lo);
    double gb = phi(hi);
    if (sign_of(ga) != old_sign && ga != 0.0) {
        lo = 0.0;
        ga = phi(lo);
    }
    if (sign_of(gb) == old_sign || gb == 0.0) {
        hi = h_full;
        gb = phi(hi);
    }
    if (sign_of(ga) != old_sign || sign_of(gb) == old_sign) return hi;

    int side = 0;
    for (int iter = 0; iter < 100 && std::fabs(hi - lo) > event_tol; ++iter) {
        double c = (lo * gb - hi * ga) / (gb - ga);
        if (!(c > std::min(lo, hi) && c < std::max(lo, hi))) c = 0.5 * (lo + hi);
        const double gc = phi(c);
        if (gc == 0.0) {
            // Exactly on the surface: nudge to the new side.
            return c + (hi - lo > 0 ? 1.0 : -1.0) * std::min(event_tol, std::fabs(hi - c));
        }
        if (sign_of(gc) == old_sign) {
            lo = c;
            ga = gc;
            if (side == -1) gb *= 0.5;
            side = -1;
        } else {
            hi = c;
            gb = gc;
            if (side == 1) ga *= 0.5;
            side = 1;
        }
    }
    return hi;
}

}  // namespace

Result integrate(const Rhs& rhs, double t0, const Vec2& y0, double t_end, const Options& opt,
                 std::span<const Event> events) {
    Result out;
    out.t.push_back(t0);
    out.y.push_back(y0);
    if (t_end == t0) return out;

    const double dir = t_end > t0 ? 1.0 : -1.0;
    double t = t0;
    Vec2 y = y0;
    Vec2 f = rhs(t, y);
    if (!finite(f)) {
        throw IntegrationError(ErrorKind::StiffnessFailure, "non-finite rhs at start", t, y);
    }

    std::vector<int> last_sign(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) last_sign[i] = sign_of(events[i].g(t, y));

    double h = opt.initial_step > 0.0 ? opt.initial_step
                                      : initial_step(rhs, t, y, f, t_end - t0, opt);
    h = std::min(h, opt.max_step);
    double err_old = 1e-4;
    bool last_rejected = false;

    while (dir * (t_end - t) > 0.0) {
        if (out.steps >= opt.max_steps) {
            std::ostringstream msg;
            msg << "step limit " << opt.max_steps << " exceeded at t=" << t;
            throw IntegrationError(ErrorKind::StepLimitExceeded, msg.str(), t, y);
        }
        const double min_h = 16.0 * std::numeric_limits<double>::epsilon() *
                             std::max(1.0, std::fabs(t));
        if (h < min_h) {
            std::ostringstream msg;
            msg << "step size underflow (h=" << h << ") at t=" << t;
            throw IntegrationError(ErrorKind::StiffnessFailure, msg.str(), t, y);
        }

        bool hits_end = false;
        double step = h;
        if (step >= dir * (t_end - t)) {
            step = dir * (t_end - t);
            hits_end = true;
        }
        const StepResult trial = dopri_step(rhs, t, y, f, dir * step);
        double err = error_norm(trial.err, y, trial.y1, opt);
        if (!std::isfinite(err) || !finite(trial.y1) || !finite(trial.f1)) {
            err = std::numeric_limits<double>::infinity();
        }

        if (err > 1.0) {
            ++out.rejected;
            const double shrink =
                std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            h = step * shrink;
            last_rejected = true;
            continue;
        }

        ++out.steps;
        double fac = std::pow(err, 0.17) / std::pow(err_old, 0.04) / 0.9;
        fac = std::clamp(fac, 0.2, 10.0);
        double h_next = std::min(step / fac, opt.max_step);
        if (last_rejected) h_next = std::min(h_next, step);
        err_old = std::max(err, 1e-4);
        last_rejected = false;

        const double t1 = hits_end ? t_end : t + dir * step;

        // Earliest sign change among the events.
        std::size_t chosen = events.size();
        double chosen_dt = 0.0;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const int s1 = sign_of(events[i].g(t1, trial.y1));
            if (last_sign[i] == 0 || s1 == 0 || s1 == last_sign[i]) continue;
            if (events[i].direction != 0 && s1 != events[i].direction) continue;
            const double dt = locate_crossing(rhs, events[i].g, t, y, f, t1 - t, trial.y1,
                                              trial.f1, last_sign[i], opt.event_tol);
            if (chosen == events.size() || std::fabs(dt) < std::fabs(chosen_dt)) {
                chosen = i;
                chosen_dt = dt;
            }
        }

        if (chosen == events.size()) {
            t = t1;
            y = trial.y1;
            f = trial.f1;
            out.t.push_back(t);
            out.y.push_back(y);
            for (std::size_t i = 0; i < events.size(); ++i) {
                const int s = sign_of(events[i].g(t, y));
                if (s != 0) last_sign[i] = s;
            }
            h = h_next;
            continue;
        }

        const double t_hit = t + chosen_dt;
        const StepResult landed = dopri_step(rhs, t, y, f, chosen_dt);
        const int old_sign = last_sign[chosen];
        t = t_hit;
        y = landed.y1;
        f = rhs(t, y);
        out.t.push_back(t);
        out.y.push_back(y);
        out.hits.push_back({chosen, t, y});
        bool stop = events[chosen].terminal;
        for (std::size_t i = 0; i < events.size(); ++i) {
            if (i == chosen) continue;
            const int s = sign_of(events[i].g(t, y));
            // Other events crossing at the same point (zero or flipped here).
            const int target = s == 0 ? -last_sign[i] : s;
            if (last_sign[i] != 0 && target != last_sign[i] &&
                (events[i].direction == 0 || events[i].direction == target)) {
                out.hits.push_back({i, t, y});
                last_sign[i] = target;
                stop = stop || events[i].terminal;
                continue;
            }
            if (s != 0) last_sign[i] = s;
        }
        last_sign[chosen] = -old_sign;
        if (stop) {
            out.status = Status::Terminated;
            return out;
        }
        h = h_next;
    }
    return out;
}

}  // namespace pucci::ode
