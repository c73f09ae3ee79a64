#include "pucci/io/tables.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "pucci/energy.hpp"
#include "pucci/error.hpp"

namespace pucci::io {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0.0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw Error(ErrorKind::Io, "number formatting failed");
    return std::string(buf, ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) {
        throw Error(ErrorKind::InvalidInput, "row width does not match the table header");
    }
    rows_.push_back(std::move(cells));
}

void CsvTable::write(std::ostream& out) const {
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    line(header_);
    for (const auto& row : rows_) line(row);
}

std::string CsvTable::str() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

CsvTable profile_table(const SolutionProfile& profile) {
    CsvTable table({"r", "u", "uprime", "x", "z", "small_energy", "big_energy"});
    const ProblemParams& params = profile.input.params;
    const std::vector<EnergySample> energies = energy_samples(profile);
    for (std::size_t i = 0; i < profile.samples.size(); ++i) {
        const RadialSample& s = profile.samples[i];
        const double x = s.u != 0.0 ? -s.r * s.du / s.u : (s.du < 0.0 ? INFINITY : -INFINITY);
        const double z = std::pow(s.r, 2.0 + params.a) * std::pow(std::fabs(s.u), params.p - 1.0);
        table.add_row({format_number(s.r), format_number(s.u), format_number(s.du), format_number(x),
                       format_number(z), format_number(energies[i].small_energy),
                       format_number(energies[i].big_energy)});
    }
    return table;
}

CsvTable trajectory_table(const PhaseTrajectory& trajectory) {
    CsvTable table({"t", "x", "z", "region"});
    for (const PhasePoint& pt : trajectory.points) {
        table.add_row({format_number(pt.t), format_number(pt.x), format_number(pt.z),
                       std::string(to_string(region_of(pt.x, pt.z, trajectory.params)))});
    }
    return table;
}

CsvTable stationary_table(const std::vector<StationaryPoint>& points) {
    CsvTable table({"name", "x", "z", "re1", "im1", "re2", "im2", "classification", "in_first_quadrant"});
    for (const StationaryPoint& sp : points) {
        table.add_row({std::string(to_string(sp.name)), format_number(sp.x), format_number(sp.z),
                       format_number(sp.eigenvalues[0].real()), format_number(sp.eigenvalues[0].imag()),
                       format_number(sp.eigenvalues[1].real()), format_number(sp.eigenvalues[1].imag()),
                       std::string(to_string(sp.classification)),
                       sp.in_closed_first_quadrant ? "true" : "false"});
    }
    return table;
}

CsvTable sweep_table(const DExploration& exploration) {
    CsvTable table({"delta", "rho", "decay", "failed", "error"});
    for (const DRow& row : exploration.rows) {
        std::string err = row.error;
        for (char& c : err) {
            if (c == ',' || c == '\n') c = ' ';
        }
        table.add_row({format_number(row.delta), row.rho ? format_number(*row.rho) : "",
                       std::string(to_string(row.decay)), row.failed ? "true" : "false", err});
    }
    return table;
}

void write_file(const std::filesystem::path& dir, std::string_view name, std::string_view content) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
    const std::filesystem::path path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace pucci::io
