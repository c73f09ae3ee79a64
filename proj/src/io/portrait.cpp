#include "pucci/io/portrait.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pucci/error.hpp"
#include "pucci/io/tables.hpp"

namespace pucci::io {

std::string_view to_string(CurveRole role) noexcept {
    switch (role) {
        case CurveRole::UnstableO: return "unstable_O";
        case CurveRole::StableA0: return "stable_A0";
        case CurveRole::Fan: return "fan";
        case CurveRole::Closed: return "closed";
    }
    return "unknown";
}

Portrait build_portrait(const ProblemParams& params, const PortraitOptions& options) {
    validate(params);
    Portrait out;
    out.params = params;
    out.geometry = geometry(params);
    out.stationary = stationary_points(params);
    const DerivedExponents ex = derive_exponents(params);
    const double z0 = m0_height(params);

    try {
        const ManifoldRun gamma = unstable_manifold_O(params, options.manifold_t, options.phase);
        out.curves.push_back({CurveRole::UnstableO, "Gamma_p", gamma.trajectory.points,
                              gamma.trajectory.termination});
    } catch (const Error& e) {
        out.notes.push_back(std::string("Gamma_p: ") + e.what());
    }
    if (params.p > ex.p_serrin) {
        try {
            const ManifoldRun ups = stable_manifold_A0(params, -options.manifold_t, options.phase);
            std::vector<PhasePoint> pts(ups.trajectory.points.rbegin(), ups.trajectory.points.rend());
            out.curves.push_back({CurveRole::StableA0, "Upsilon_p", std::move(pts),
                                  ups.trajectory.termination});
        } catch (const Error& e) {
            out.notes.push_back(std::string("Upsilon_p: ") + e.what());
        }
    }

    const double z_top = 1.2 * std::max(out.geometry.box_z, z0);
    for (int k = 1; k <= options.fan; ++k) {
        const PhasePoint seed{0.0, z_top * k / (options.fan + 1), 0.0};
        std::string name = "fan_" + std::to_string(k);
        try {
            const PhaseRun back = integrate_phase(params, seed, -options.t_end, options.phase);
            const PhaseRun fwd = integrate_phase(params, seed, options.t_end, options.phase);
            std::vector<PhasePoint> pts(back.trajectory.points.rbegin(), back.trajectory.points.rend());
            pts.insert(pts.end(), fwd.trajectory.points.begin() + 1, fwd.trajectory.points.end());
            out.curves.push_back({CurveRole::Fan, std::move(name), std::move(pts), fwd.trajectory.termination});
        } catch (const Error& e) {
            out.notes.push_back(name + ": " + e.what());
        }
    }

    const StationaryPoint m0 = stationary_point(StationaryName::M0, params);
    if (m0.classification == Stability::Center) {
        PhaseConfig cfg = options.phase;
        cfg.track_section = true;
        cfg.section_direction = 1;
        cfg.section_budget = 1;
        cfg.stop_at = {false, false, false};
        const PhaseRun loop =
            integrate_phase(params, {m0.x, z0 * (1.0 + options.closed_offset), 0.0}, 1e3, cfg);
        out.curves.push_back({CurveRole::Closed, "closed_orbit", loop.trajectory.points,
                              loop.trajectory.termination});
    }

    const double right = std::max({out.geometry.box_x, out.geometry.pi2_x, 1.0});
    out.x_min = -0.75 * right;
    out.x_max = 1.5 * right;
    out.z_max = 1.4 * std::max({out.geometry.box_z, z0, out.geometry.tangency_z});
    return out;
}

namespace {

struct Frame {
    double x_min, x_max, z_max;
    double width = 800.0, height = 600.0, margin = 60.0;

    double px(double x) const { return margin + (x - x_min) / (x_max - x_min) * (width - 2 * margin); }
    double pz(double z) const { return height - margin - z / z_max * (height - 2 * margin); }
    bool near(double x, double z) const {
        const double dx = x_max - x_min;
        return x > x_min - dx && x < x_max + dx && z > -z_max && z < 2.0 * z_max;
    }
};

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Polyline pieces made of points near the viewport; the clip path trims the rest.
void polyline(std::ostringstream& svg, const Frame& f, const std::vector<PhasePoint>& pts,
              const std::string& style) {
    std::string piece;
    std::size_t count = 0;
    auto flush = [&]() {
        if (count >= 2) svg << "<polyline points=\"" << piece << "\" " << style << "/>\n";
        piece.clear();
        count = 0;
    };
    for (const PhasePoint& pt : pts) {
        if (!std::isfinite(pt.x) || !std::isfinite(pt.z) || !f.near(pt.x, pt.z)) {
            flush();
            continue;
        }
        if (count) piece += ' ';
        piece += fixed(f.px(pt.x)) + "," + fixed(f.pz(pt.z));
        ++count;
    }
    flush();
}

std::vector<PhasePoint> sample_curve(double x0, double x1, int n, auto z_of) {
    std::vector<PhasePoint> pts;
    for (int i = 0; i <= n; ++i) {
        const double x = x0 + (x1 - x0) * i / n;
        pts.push_back({x, z_of(x), 0.0});
    }
    return pts;
}

}  // namespace

std::string render_svg(const Portrait& portrait) {
    const Frame f{portrait.x_min, portrait.x_max, portrait.z_max};
    const Geometry& g = portrait.geometry;
    const ProblemParams& params = portrait.params;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    svg << "<defs><clipPath id=\"plot\"><rect x=\"60\" y=\"60\" width=\"680\" height=\"480\"/></clipPath></defs>\n";
    svg << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    svg << "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
        << "operator=" << to_string(params.op) << " lambda=" << format_number(params.lambda)
        << " Lambda=" << format_number(params.Lambda) << " N=" << params.N
        << " p=" << format_number(params.p) << " a=" << format_number(params.a) << "</text>\n";

    svg << "<g clip-path=\"url(#plot)\">\n";
    // Axes.
    svg << "<line x1=\"" << fixed(f.px(f.x_min)) << "\" y1=\"" << fixed(f.pz(0)) << "\" x2=\""
        << fixed(f.px(f.x_max)) << "\" y2=\"" << fixed(f.pz(0)) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fixed(f.px(0)) << "\" y1=\"" << fixed(f.pz(0)) << "\" x2=\"" << fixed(f.px(0))
        << "\" y2=\"" << fixed(f.pz(f.z_max)) << "\" stroke=\"black\"/>\n";

    // A-priori box.
    svg << "<rect x=\"" << fixed(f.px(0)) << "\" y=\"" << fixed(f.pz(g.box_z)) << "\" width=\""
        << fixed(f.px(g.box_x) - f.px(0)) << "\" height=\"" << fixed(f.pz(0) - f.pz(g.box_z))
        << "\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"6,4\"/>\n";

    // ℓ, π1, π2.
    polyline(svg, f, sample_curve(0.0, f.x_max, 2, [&](double x) { return g.ell_slope * x; }),
             "fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.5\"");
    // π1 only meets the first quadrant below ℓ, on the convex branch.
    polyline(svg, f, sample_curve(0.0, g.box_x, 400, [&](double x) {
                 return g.pi1_linear * x - g.pi1_quadratic * x * x;
             }),
             "fill=\"none\" stroke=\"#9467bd\" stroke-dasharray=\"4,3\"");
    svg << "<line x1=\"" << fixed(f.px(g.pi2_x)) << "\" y1=\"" << fixed(f.pz(0)) << "\" x2=\""
        << fixed(f.px(g.pi2_x)) << "\" y2=\"" << fixed(f.pz(f.z_max))
        << "\" stroke=\"#8c564b\" stroke-dasharray=\"4,3\"/>\n";

    for (const PortraitCurve& c : portrait.curves) {
        std::string style;
        switch (c.role) {
            case CurveRole::UnstableO: style = "fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\""; break;
            case CurveRole::StableA0: style = "fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\""; break;
            case CurveRole::Fan: style = "fill=\"none\" stroke=\"#7f7f7f\" stroke-width=\"0.8\""; break;
            case CurveRole::Closed: style = "fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"1.5\""; break;
        }
        polyline(svg, f, c.points, style);
    }
    svg << "</g>\n";

    svg << "<circle cx=\"" << fixed(f.px(g.tangency_x)) << "\" cy=\"" << fixed(f.pz(g.tangency_z))
        << "\" r=\"3\" fill=\"#2ca02c\"/>\n";
    svg << "<text x=\"" << fixed(f.px(g.tangency_x) + 6) << "\" y=\"" << fixed(f.pz(g.tangency_z) - 6)
        << "\" font-family=\"sans-serif\" font-size=\"12\">P</text>\n";
    for (const StationaryPoint& sp : portrait.stationary) {
        if (!sp.in_closed_first_quadrant) continue;
        svg << "<circle cx=\"" << fixed(f.px(sp.x)) << "\" cy=\"" << fixed(f.pz(sp.z))
            << "\" r=\"4\" fill=\"black\"/>\n";
        svg << "<text x=\"" << fixed(f.px(sp.x) + 6) << "\" y=\"" << fixed(f.pz(sp.z) - 6)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << to_string(sp.name) << " "
            << to_string(sp.classification) << "</text>\n";
    }

    const char* legend[][2] = {{"#d62728", "Gamma_p"},      {"#1f77b4", "Upsilon_p"},
                               {"#2ca02c", "concavity line"}, {"#9467bd", "x nullcline"},
                               {"#8c564b", "z nullcline"},    {"#999999", "a-priori box"},
                               {"#ff7f0e", "closed orbit"},   {"#7f7f7f", "trajectories"}};
    for (std::size_t i = 0; i < std::size(legend); ++i) {
        const double y = 80.0 + 16.0 * static_cast<double>(i);
        svg << "<line x1=\"620\" y1=\"" << fixed(y) << "\" x2=\"640\" y2=\"" << fixed(y) << "\" stroke=\""
            << legend[i][0] << "\" stroke-width=\"2\"/>";
        svg << "<text x=\"646\" y=\"" << fixed(y + 4) << "\" font-family=\"sans-serif\" font-size=\"11\">"
            << legend[i][1] << "</text>\n";
    }
    svg << "<text x=\"740\" y=\"" << fixed(f.pz(0) + 20) << "\" font-family=\"sans-serif\" font-size=\"12\">x</text>\n";
    svg << "<text x=\"" << fixed(f.px(0) - 14) << "\" y=\"70\" font-family=\"sans-serif\" font-size=\"12\">z</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace pucci::io
