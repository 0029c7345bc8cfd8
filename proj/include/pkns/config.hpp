#pragma once

#include <cstdint>
#include <string>

namespace pkns {

//============================================================
// Run configuration, parsed from INI-style files:
//
//   [run]   mode, t_end, cfl, dt_max, dt_min, diag_every, delta, out_dir
//   [grid]  n_points (torus) or r_max, n_r (radial / selfsim)
//   [ic]    kind, mass, width, amplitude, seed, file
//
// Numeric values accept a "pi" suffix ("4pi", "0.5pi"), multiplied in
// binary so no decimal expansion of pi enters the file. Unknown keys,
// duplicate keys and malformed lines raise ConfigError with the line
// number. In selfsim mode t_end is the rescaled-time horizon.
//============================================================

struct IcConfig {
    std::string kind = "gaussian"; // gaussian | random | shear | file
    double mass = 0.0;
    double width = 1.0;
    double amplitude = 0.0;
    int modes = 8; // band limit of the random kind
    std::uint64_t seed = 1;
    std::string file;
};

struct RunConfig {
    std::string mode; // torus | radial | selfsim
    int n_points = 0;
    double r_max = 0.0;
    int n_r = 0;
    double t_end = 0.0;
    double cfl = 0.5;
    double dt_max = 1e-2;
    double dt_min = 1e-10;
    int diag_every = 10;
    double delta = 0.01;
    IcConfig ic;
    std::string out_dir;
    int threads = 1;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Scalar literal with optional "pi" suffix; throws ConfigError.
double parse_number(const std::string& token);

// Overrides one sweepable key ("mass", "width", "amplitude", "seed",
// "delta", "t_end", "cfl", "dt_max"); throws ConfigError for others.
void apply_param(RunConfig& config, const std::string& name, double value);

} // namespace pkns
