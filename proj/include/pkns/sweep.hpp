#pragma once

#include "pkns/driver.hpp"

#include <string>
#include <vector>

namespace pkns {

//============================================================
// Parameter sweeps over independent runs, and bisection of the
// global-existence / blow-up boundary in one parameter. A run counts as
// blow-up when it stops early with a suspected blow-up; a numerical
// failure is grouped with blow-up rather than with global existence.
//============================================================

struct SweepRow {
    double value = 0.0;
    RunStatus status = RunStatus::Completed;
    bool blowup = false;
    double t_stop = 0.0;
    long steps = 0;
    double final_linf = 0.0;
    std::optional<double> t_star;
};

struct SweepResult {
    std::string param;
    std::vector<SweepRow> rows;
};

// One run per value with the parameter applied on top of the base
// config, distributed over a small worker pool. When base.out_dir is
// set each run writes into out_dir/<param>=<value>/ and the table goes
// to out_dir/sweep.csv.
SweepResult run_sweep(const RunConfig& base, const std::string& param,
                      const std::vector<double>& values, int threads);

std::string sweep_csv(const SweepResult& sweep);

struct BisectIteration {
    double value = 0.0;
    bool blowup = false;
};

struct BisectResult {
    std::string param;
    double lo = 0.0; // largest value seen without blow-up
    double hi = 0.0; // smallest value seen with blow-up
    std::vector<BisectIteration> iterations;
};

// Shrinks [lo, hi] to width tol by classifying midpoints; lo is taken
// as non-blow-up and hi as blow-up without re-running the endpoints.
BisectResult run_bisect(const RunConfig& base, const std::string& param, double lo, double hi,
                        double tol);

std::string bisect_csv(const BisectResult& result);

} // namespace pkns
