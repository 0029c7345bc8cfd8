#pragma once

#include "pkns/checkpoint.hpp"
#include "pkns/config.hpp"
#include "pkns/diagnostics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pkns {

//============================================================
// Time-stepping loops shared by the command line tool and the tests:
// adaptive step selection, rejection with halving when positivity is
// lost, diagnostics on a fixed step cadence and artifact output.
//============================================================

enum class RunStatus { Completed, BlowupSuspected, NumericalFailure };

const char* run_status_name(RunStatus status);
int exit_code_for(RunStatus status);

struct RunResult {
    RunStatus status = RunStatus::Completed;
    std::string message;
    std::string mode;
    double t_stop = 0.0;
    long steps = 0;
    long rejected_steps = 0;
    long truncated_records = 0; // records whose support reached the outer boundary
    std::optional<double> t_star;              // concentration-time bound (radial)
    std::optional<double> second_moment_slope; // dV/dt fit (radial)
    std::optional<double> decay_slope; // d log(|n|_2^2+|w|_2^2)/d log(1+2t) (selfsim)
    std::optional<double> final_V;     // last second moment (radial, selfsim)
    std::vector<DiagnosticsRecord> records;
    Checkpoint final_state;
};

TorusState build_torus_ic(const RunConfig& config);
RadialState build_radial_ic(const RunConfig& config);
SelfSimState build_selfsim_ic(const RunConfig& config);

// Runs the configured simulation to t_end (a rescaled-time horizon in
// selfsim mode) without touching the filesystem.
RunResult run_simulation(const RunConfig& config);

// Same, then writes diagnostics.csv, summary.json and state.pkns into
// config.out_dir when it is set.
RunResult run_and_write(const RunConfig& config);

// Continues a saved state. The config supplies the horizon and step
// control; its grid (when present) must match the checkpoint.
RunResult resume_simulation(const std::string& checkpoint_path, const RunConfig& config);

std::string summary_json(const RunConfig& config, const RunResult& result);
void write_artifacts(const RunConfig& config, const RunResult& result);

} // namespace pkns
