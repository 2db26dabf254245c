#pragma once

// Run orchestration for the command-line tool: executes a configured
// simulation with CSV/VTK outputs, and backs the convergence, estimate and
// material-check subcommands. Every function returns a process exit code
// and reports through the given stream, keeping the CLI shell thin.

#include <iosfwd>
#include <string>
#include <vector>

#include "velast/config.hpp"

namespace velast {

// Fixed CSV column order of the time series.
inline constexpr const char* kCsvHeader =
    "t,pressure,volume,volume_drift,min_det,kinetic,strain,fp_iters,"
    "pressure_consistency";

// Runs the scenario: time series CSV appended and flushed row by row
// (a crash leaves a valid prefix), VTK snapshots every snapshot_every
// accepted rows (0 disables; row 0 is the initial state). Exit codes:
// 0 the run reached t_end, 2 finite-time blow-up (dt floor exhausted),
// 3 loss of local invertibility, 1 any configuration/compatibility/IO
// error (reported with the offending path).
int run_scenario(const RunConfig& cfg, std::ostream& log);

// Writes the time-stepping convergence table for the manufactured linear
// solution on `levels` meshes (n = 8, 16, 32, ...) as CSV to the log,
// including observed velocity orders. Returns 0.
int run_mms(int levels, std::ostream& log);

// Desk-scale estimate probes: "holder", "basic", "lipschitz", "cofactor"
// or "all". Scaling reports are written as CSV files under out_dir; the
// PASS/FAIL summary goes to the log. An empty T_list selects per-probe
// defaults. Returns 0 when every check passes, 1 otherwise.
int run_estlab(const std::string& probe, const std::vector<double>& T_list,
               const std::string& out_dir, std::ostream& log);

// Finite-difference consistency suite for one material model ("stvk",
// "fung", "ogden"): stress vs energy gradient and stress derivative vs
// stress differences, over randomized small strains. Returns 0/1.
int run_checkmat(const std::string& model, std::ostream& log);

}  // namespace velast
