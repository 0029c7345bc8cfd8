#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pkns {

//============================================================
// Fast self-contained invariant checks, one suite per module. Each item
// reports the measured defect and the threshold it must stay under, so
// a failure is directly actionable from the output line.
//============================================================

struct CheckItem {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

CheckItem make_check(std::string name, double measured, double threshold);

std::vector<CheckItem> check_spectral();
std::vector<CheckItem> check_torus();
std::vector<CheckItem> check_radial();
std::vector<CheckItem> check_selfsim();
std::vector<CheckItem> check_diagnostics();

// Dispatch by suite name; "all" concatenates every suite. Throws
// ConfigError for unknown names.
std::vector<CheckItem> check_suite(const std::string& name);

// Prints one PASS/FAIL line per item; returns the number of failures.
int report_checks(const std::vector<CheckItem>& items, std::ostream& out);

} // namespace pkns
