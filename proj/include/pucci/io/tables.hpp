#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pucci/phase_plane.hpp"
#include "pucci/radial_ivp.hpp"
#include "pucci/shooting.hpp"

namespace pucci::io {

/// Shortest text that reads back to the same double ("inf", "-inf", "nan"
/// for non-finite values).
std::string format_number(double value);

/// Comma-separated table with a fixed header; cells are written as given.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    void write(std::ostream& out) const;
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// r, u, uprime, x, z, small_energy, big_energy. x and z are taken from |u|,
/// so negative solutions map to the phase plane of the swapped problem.
CsvTable profile_table(const SolutionProfile& profile);

/// t, x, z, region.
CsvTable trajectory_table(const PhaseTrajectory& trajectory);

/// name, x, z, re1, im1, re2, im2, classification, in_first_quadrant.
CsvTable stationary_table(const std::vector<StationaryPoint>& points);

/// delta, rho, decay, failed, error.
CsvTable sweep_table(const DExploration& exploration);

/// Writes `content` to dir/name, creating dir. Throws Error(Io).
void write_file(const std::filesystem::path& dir, std::string_view name, std::string_view content);

}  // namespace pucci::io
