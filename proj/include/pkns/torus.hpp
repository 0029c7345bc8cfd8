#pragma once

#include "pkns/spectral.hpp"

namespace pkns {

//============================================================
// Coupled cell-density / incompressible-flow solver on the unit torus:
//
//   dt n + u.grad n + div(n grad c) = Lap n,   -Lap c = n - mean(n)
//   dt u + (u.grad) u + grad p      = Lap u + n grad c,   div u = 0
//
// Fields live in spectral space; nonlinear terms are formed on the grid
// and dealiased with the two-thirds rule. Time stepping treats diffusion
// exactly through an integrating factor and the rest with a two-stage
// second-order scheme.
//============================================================

struct TorusState {
    double t = 0.0;
    SpectralScalar n;
    SpectralVector u;
};

struct StepControl {
    double cfl = 0.5;
    double dt_max = 1e-2;
    double dt_min = 1e-10;
};

// Test hooks to drop individual couplings.
struct TorusRhsTerms {
    bool advection = true;
    bool chemotaxis = true;
};

struct TorusTendency {
    SpectralScalar dn;
    SpectralVector du;
};

// Grid maxima gathered while forming the tendency; used for step selection.
struct TorusRhsInfo {
    double max_u = 0.0;
    double max_grad_c = 0.0;
};

// Nonlinear (non-diffusive) tendencies. Both tendencies are exactly
// mean-free, so the total mass and the zero velocity mode are preserved
// verbatim by any step built on top of them.
TorusTendency rhs_torus(const TorusState& state, const TorusRhsTerms& terms = {},
                        TorusRhsInfo* info = nullptr);

// One step of the integrating-factor two-stage scheme. Throws
// PositivityLoss when min n < -1e-6 * ||n||_inf after the step.
// The precomputed first-stage tendency may be passed to avoid
// evaluating it twice when the caller already has it.
TorusState step_imex(const TorusState& state, double dt, const TorusRhsTerms& terms = {},
                     const TorusTendency* stage1 = nullptr);

struct DtChoice {
    double dt = 0.0;
    bool blowup_suspected = false;
};

// dt = min(dt_max, cfl * h / (max|u| + max|grad c| + eps)); flags
// blow-up suspicion instead of returning a dt below dt_min.
DtChoice adaptive_dt(const TorusState& state, const StepControl& control);
DtChoice adaptive_dt_from_info(const TorusRhsInfo& info, double h, const StepControl& control);

} // namespace pkns
