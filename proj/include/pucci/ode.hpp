#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace pucci::ode {

using Vec2 = std::array<double, 2>;
using Rhs = std::function<Vec2(double, const Vec2&)>;
using EventFn = std::function<double(double, const Vec2&)>;

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long max_steps = 5'000'000;
    /// Localization tolerance for events, in the independent variable.
    double event_tol = 1e-12;
    /// 0 selects the starting step automatically.
    double initial_step = 0.0;
    double max_step = std::numeric_limits<double>::infinity();
};

/// A scalar event function. A crossing is a strict sign change of g between
/// accepted states; the step is cut so that the integration lands on the
/// crossing, which keeps the order of the method across kinks of the rhs.
struct Event {
    EventFn g;
    bool terminal = false;
    /// 0 reports every crossing; +1 only - to +; -1 only + to -.
    int direction = 0;
};

struct EventHit {
    std::size_t index = 0;
    double t = 0.0;
    Vec2 y{};
};

enum class Status { ReachedEnd, Terminated };

struct Result {
    std::vector<double> t;
    std::vector<Vec2> y;
    std::vector<EventHit> hits;
    Status status = Status::ReachedEnd;
    long steps = 0;
    long rejected = 0;
};

/// One Dormand–Prince 5(4) step. `f` is rhs(t, y); the returned `f1` is
/// rhs(t + h, y1) (first-same-as-last).
struct StepResult {
    Vec2 y1{};
    Vec2 f1{};
    Vec2 err{};
};
StepResult dopri_step(const Rhs& rhs, double t, const Vec2& y, const Vec2& f, double h);

/// Cubic Hermite interpolant on [t0, t1] evaluated at t.
Vec2 hermite(double t0, const Vec2& y0, const Vec2& f0, double t1, const Vec2& y1,
             const Vec2& f1, double t) noexcept;

/// Adaptive Dormand–Prince 5(4) with PI step control and event location.
/// Integrates from t0 towards t_end (either direction). Throws
/// IntegrationError on step-limit exhaustion or step-size underflow.
Result integrate(const Rhs& rhs, double t0, const Vec2& y0, double t_end, const Options& options,
                 std::span<const Event> events = {});

}  // namespace pucci::ode
