#pragma once

#include "pkns/radial.hpp"

namespace pkns {

//============================================================
// Radial solver in self-similar variables. With R(t) = sqrt(1+2t),
// tau = log R, X = x/R and n(t,x) = N(tau, X)/R^2, w = Omega/R^2:
//
//   dtau N = Lap N + div(X N) - div(N grad C),   -Lap C = N
//   dtau Omega = Lap Omega + div(X Omega)
//
// The confining drift div(X .) keeps profiles bounded; the diffuse
// spreading of the original variables becomes relaxation toward a
// stationary profile here. Discretization mirrors the radial solver:
// finite volumes, implicit diffusion, explicit drift and flux.
//============================================================

struct SelfSimState {
    double tau = 0.0;
    RadialGrid grid; // grid in the rescaled radius X
    Eigen::ArrayXd N;
    Eigen::ArrayXd Omega;
};

double scale_R(double t);
double tau_of_t(double t);
double t_of_tau(double tau);

// Change of variables by conservative rebinning: cumulative mass and
// circulation are interpolated at the mapped faces and differenced, so
// the totals carry over exactly whenever the target domain covers the
// data. Throws InterpolationRange when R * X_max exceeds r_max (or the
// reverse for from_selfsim).
SelfSimState to_selfsim(const RadialState& state, const RadialGrid& x_grid);
RadialState from_selfsim(const SelfSimState& state, const RadialGrid& r_grid);

struct SelfSimRhsTerms {
    bool chemotaxis = true;
    bool drift = true;
};

struct SelfSimTendency {
    Eigen::ArrayXd dN;
    Eigen::ArrayXd dOmega;
};

RadialGrid make_selfsim_grid(double x_max, int n_r);

SelfSimTendency rhs_selfsim(const SelfSimState& state, const SelfSimRhsTerms& terms = {});

// Strang arrangement: explicit half step of drift + flux, Crank-Nicolson
// diffusion, explicit half step. Throws PositivityLoss on undershoot.
SelfSimState step_selfsim(const SelfSimState& state, double dt,
                          const SelfSimRhsTerms& terms = {});

// Free energy in self-similar variables:
//   int N log N - N C / 2 + N |X|^2 / 2 - Psi Omega / 2,
// with C anchored like the radial chemical and the stream function Psi
// anchored by its far-field circulation logarithm.
double energy_selfsim(const SelfSimState& state);

DtChoice adaptive_dt_selfsim(const SelfSimState& state, const StepControl& control);

} // namespace pkns
