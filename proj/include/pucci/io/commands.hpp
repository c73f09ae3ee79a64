#pragma once

#include <ostream>

#include "pucci/io/config.hpp"

namespace pucci::io {

/// Exit statuses shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // solver failure or failed check
inline constexpr int kExitUsage = 2;    // bad configuration or I/O

/// Each command writes its bundle into config.out_dir, prints a short report
/// on `out` and diagnostics on `err`, and returns an exit status.
int cmd_solve_annulus(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_solve_exterior(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_phase_portrait(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_check_invariants(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace pucci::io
