#pragma once

#include <string>
#include <vector>

#include "pucci/phase_plane.hpp"

namespace pucci::io {

enum class CurveRole { UnstableO, StableA0, Fan, Closed };
std::string_view to_string(CurveRole role) noexcept;

struct PortraitCurve {
    CurveRole role = CurveRole::Fan;
    std::string name;
    std::vector<PhasePoint> points;
    Termination termination = Termination::None;
};

struct PortraitOptions {
    int fan = 12;
    double t_end = 40.0;
    double manifold_t = 60.0;
    /// Relative offset above M0 of the closed orbit drawn at the center exponent.
    double closed_offset = 0.5;
    PhaseConfig phase;
};

struct Portrait {
    ProblemParams params;
    Geometry geometry;
    std::vector<StationaryPoint> stationary;
    std::vector<PortraitCurve> curves;
    /// Failures of optional curves (for example a manifold run losing precision).
    std::vector<std::string> notes;
    double x_min = 0.0, x_max = 0.0, z_max = 0.0;
};

/// Stationary points, Γp, Υp (for p above the Serrin-type exponent), a fan
/// of trajectories through the z axis and, at the center exponent, one
/// closed orbit around M0.
Portrait build_portrait(const ProblemParams& params, const PortraitOptions& options);

/// Static SVG drawing of the portrait with ℓ, π1, π2, P and the a-priori box.
std::string render_svg(const Portrait& portrait);

}  // namespace pucci::io
