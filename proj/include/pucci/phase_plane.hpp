#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pucci/params.hpp"
#include "pucci/radial_ivp.hpp"

namespace pucci {

// Phase variables of a positive radial solution:
//   x = -r u'/u,  z = r^{2+a} u^{p-1},  t = ln r.

struct PhasePoint {
    double x = 0.0;
    double z = 0.0;
    double t = 0.0;
};

enum class Quadrant { First, Second, Axis };
Quadrant quadrant_of(double x) noexcept;

/// R+ is the concave side of the line ℓ (above it), R- the convex side.
enum class Region { Concave, Convex, OnLine, SecondQuadrant, ZAxis };
Region region_of(double x, double z, const ProblemParams& params) noexcept;
std::string_view to_string(Region region) noexcept;

enum class StationaryName { O, A0, M0 };
std::string_view to_string(StationaryName name) noexcept;

enum class Termination {
    None,
    ConvergedToStationary,
    BlowupBackward2Q,  // x -> -infinity
    BlowupForwardX,    // x -> +infinity
    SectionBudget,
    HorizonReached,
};
std::string_view to_string(Termination termination) noexcept;

struct PhaseTrajectory {
    std::vector<PhasePoint> points;
    Termination termination = Termination::None;
    std::optional<StationaryName> converged_to;
    /// Extrapolated time of the x blow-up (t + 1/x at the last point).
    std::optional<double> blowup_time;
    ProblemParams params;
};

enum class Stability { Saddle, Source, Sink, Center, Degenerate };
std::string_view to_string(Stability stability) noexcept;

struct StationaryPoint {
    StationaryName name = StationaryName::O;
    double x = 0.0;
    double z = 0.0;
    std::array<std::complex<double>, 2> eigenvalues{};
    Stability classification = Stability::Saddle;
    /// Slopes dz/dx of real eigendirections, ordered as the eigenvalues.
    std::vector<double> directions;
    bool in_closed_first_quadrant = true;
};

struct Geometry {
    double ell_slope = 0.0;   // ℓ: z = ell_slope * x
    double pi1_linear = 0.0;  // π1: z = pi1_linear * x - pi1_quadratic * x^2
    double pi1_quadratic = 0.0;
    double pi2_x = 0.0;       // π2: x = α
    double tangency_x = 0.0;  // P, where the flow is parallel to ℓ
    double tangency_z = 0.0;
    double box_x = 0.0;       // a-priori box (0, box_x) x (0, box_z)
    double box_z = 0.0;
};

/// ẋ = x(x+1) - M(-(N-1) m(-x) - z),  ż = z(x + 2 + a - p x).
/// Covers 1Q, 2Q and the z axis with one formula.
std::array<double, 2> vector_field(double x, double z, const ProblemParams& params) noexcept;
std::array<double, 2> vector_field(const PhasePoint& point, const ProblemParams& params) noexcept;

/// The same field written region by region as x(x - D + 2) + z/w; used to
/// cross-check the operator form.
std::array<double, 2> vector_field_branch(double x, double z, const ProblemParams& params) noexcept;

/// Jacobian of the branch form valid in `region` (Convex, Concave or SecondQuadrant).
std::array<std::array<double, 2>, 2> branch_jacobian(double x, double z, Region region,
                                                     const ProblemParams& params) noexcept;

std::array<std::complex<double>, 2> eigenvalues_2x2(const std::array<std::array<double, 2>, 2>& m);

/// Central differences of vector_field with step h.
std::array<std::array<double, 2>, 2> numeric_jacobian(double x, double z, const ProblemParams& params,
                                                      double h = 1e-6);

/// Reads the type off the real parts; |Re| <= tol counts as zero (Center for a
/// complex pair, Degenerate otherwise).
Stability classify_by_signs(const std::array<std::complex<double>, 2>& eigenvalues, double tol);

/// O, A0 and M0 (M0 is listed even when it leaves the first quadrant).
std::vector<StationaryPoint> stationary_points(const ProblemParams& params);
StationaryPoint stationary_point(StationaryName name, const ProblemParams& params);

Geometry geometry(const ProblemParams& params);

/// Maps the samples with u > 0; a zero at either end of the profile is dropped.
PhaseTrajectory to_phase(const SolutionProfile& profile);
SolutionProfile from_phase(const PhaseTrajectory& trajectory);

struct PhaseConfig {
    double rel_tol = 1e-11;
    double abs_tol = 1e-13;
    long max_steps = 2'000'000;
    double event_tol = 1e-13;
    /// |x| beyond which the trajectory is declared to blow up.
    double x_escape = 1e3;
    /// Radius of the ball around a stationary point counted as convergence.
    double converge_tol = 1e-4;
    /// Which stationary points stop the integration (O, A0, M0). A stop only
    /// fires on entering the ball, so a trajectory may start inside it.
    std::array<bool, 3> stop_at{true, true, true};
    /// Count crossings of x = α (recorded in section_hits).
    bool track_section = false;
    /// Stop after this many crossings of x = α in `section_direction`
    /// (sign of ẋ; 0 = no limit).
    int section_budget = 0;
    int section_direction = 1;
    /// Offset of manifold seeds from the stationary point, before scaling by max(1, Ñ-2).
    double manifold_eps = 1e-6;
};

struct PhaseRun {
    PhaseTrajectory trajectory;
    /// Points where x = α was crossed, with the sign of ẋ there.
    std::vector<PhasePoint> section_hits;
    std::vector<int> section_directions;
};

/// Integrates the phase field from `start` to `t_end` (either direction),
/// aligning steps with x = 0 and ℓ where the field is not smooth.
PhaseRun integrate_phase(const ProblemParams& params, const PhasePoint& start, double t_end,
                         const PhaseConfig& config = {});

/// Slope of the unstable direction of O. The direction lies in the concave
/// region, where the linearization gives w (N + a) with w the concave weight.
double unstable_slope_O(const ProblemParams& params) noexcept;

/// A in the stable line z = -A (x - (Ñ - 2)) at A0.
double stable_slope_A0(const ProblemParams& params) noexcept;

struct ManifoldRun {
    PhaseTrajectory trajectory;
    double eps = 0.0;
    /// Distance at the probe time between runs seeded at eps and eps/2.
    double halving_gap = 0.0;
    /// z where the trajectory crosses x = 0, when it does.
    std::optional<double> axis_crossing_z;
    std::optional<double> axis_crossing_t;
};

/// Γp: forward from O along the unstable direction, to t_end.
ManifoldRun unstable_manifold_O(const ProblemParams& params, double t_end,
                                const PhaseConfig& config = {});

/// Υp: backward from A0 along the stable line, down to t_end (< 0).
/// Requires p > p_serrin. Throws PrecisionLoss when the run turns
/// non-finite or the eps-halving check disagrees before the z axis.
ManifoldRun stable_manifold_A0(const ProblemParams& params, double t_end,
                               const PhaseConfig& config = {});

struct BoundReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_excess = 0.0;
    std::optional<PhasePoint> worst_point;
    std::vector<std::string> notes;

    bool ok() const noexcept { return violations == 0; }
};

/// Checks, on the 2Q samples of a trajectory, ẋ > 0, ż > 0 and
///   x(t) <= -K / (c0 e^{K (t - t0)} - 1),  c0 = 1 - K / x(t0),  K = Ñ_inc - 2,
/// for every pair of samples t <= t0.
BoundReport blowup_bound_2Q(const PhaseTrajectory& trajectory, double rel_tol = 1e-8);

struct BoxReport {
    double box_x = 0.0;
    double box_z = 0.0;
    double max_x = 0.0;
    double min_x = 0.0;
    double max_z = 0.0;
    bool inside = true;
    std::optional<PhasePoint> first_exit;
};

BoxReport apriori_box_check(const PhaseTrajectory& trajectory, const ProblemParams& params);

/// Samples points on ℓ, the axes, π1 and π2 and checks the flow direction
/// on each. `budget` is the total number of sampled points.
BoundReport flow_direction_audit(const ProblemParams& params, std::size_t budget,
                                 std::uint64_t seed = 1);

struct PoincareReport {
    double seed_z = 0.0;
    double z0 = 0.0;
    /// z at successive crossings of x = α in the seed's direction.
    std::vector<double> returns;
    Termination termination = Termination::None;
    bool budget_exhausted = false;

    /// |z_k - z0| for the seed and each return.
    std::vector<double> distances() const;
    bool strictly_increasing() const;
    bool strictly_decreasing() const;
};

/// Return map on the section x = α, seeded at (α, seed_z), for `returns` loops.
PoincareReport poincare_return(const ProblemParams& params, double seed_z, int returns,
                               double t_budget = 1e3, const PhaseConfig& config = {});

}  // namespace pucci
