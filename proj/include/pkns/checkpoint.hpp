#pragma once

#include "pkns/radial.hpp"
#include "pkns/selfsim.hpp"
#include "pkns/torus.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pkns {

//============================================================
// Binary state snapshots.
//
// Layout (little-endian):
//   "PKNS"  magic
//   u8      format version (1)
//   u8      mode: 0 torus, 1 radial, 2 selfsim
//   f64     time (rescaled time in selfsim mode)
//   f64     r_max               [radial, selfsim]
//   u8      number of dimensions
//   u64[]   dimensions of one field
//   u8      number of fields
//   f64[]   field payloads, back to back
//
// Torus fields are the spectral coefficients of n, u1, u2 with
// dimensions (n, n/2+1, 2), the trailing axis holding re/im. Storing
// the spectral side keeps save -> load -> save byte-identical; the
// physical arrays would pick up one transform round trip. Radial and
// selfsim fields are the cell densities (n, omega) on (n_r,).
//
// Any structural defect (bad magic, version, sizes, trailing bytes)
// raises FormatError.
//============================================================

inline constexpr std::uint8_t kModeTorus = 0;
inline constexpr std::uint8_t kModeRadial = 1;
inline constexpr std::uint8_t kModeSelfSim = 2;

struct Checkpoint {
    std::uint8_t mode = 0;
    double time = 0.0;
    double r_max = 0.0;
    std::vector<std::uint64_t> dims;
    std::vector<std::vector<double>> fields;
};

Checkpoint make_checkpoint(const TorusState& state);
Checkpoint make_checkpoint(const RadialState& state);
Checkpoint make_checkpoint(const SelfSimState& state);

TorusState torus_from_checkpoint(const Checkpoint& cp);
RadialState radial_from_checkpoint(const Checkpoint& cp);
SelfSimState selfsim_from_checkpoint(const Checkpoint& cp);

std::string serialize_checkpoint(const Checkpoint& cp);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void write_checkpoint_file(const std::string& path, const Checkpoint& cp);
Checkpoint read_checkpoint_file(const std::string& path);

} // namespace pkns
