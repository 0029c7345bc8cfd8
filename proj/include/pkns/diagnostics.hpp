#pragma once

#include <array>
#include <vector>

#include "pkns/selfsim.hpp"

namespace pkns {

//============================================================
// Scalar functionals recorded along runs: masses, norms, entropy split,
// free energies, dissipation rates and the discrete energy-balance
// residual. One record per sample; the CSV schema follows the field
// order below exactly.
//============================================================

struct DiagnosticsRecord {
    double t = 0.0;   // tau in self-similar mode
    double dt = 0.0;
    double mass = 0.0;
    double mean_u1 = 0.0;
    double mean_u2 = 0.0;
    double L2_n = 0.0;
    double Linf_n = 0.0;
    double L2_u = 0.0;
    double L2_omega = 0.0;
    double V = 0.0;        // second moment (plane modes)
    double S = 0.0;
    double S_plus = 0.0;
    double S_minus = 0.0;
    double E = 0.0;        // regime-appropriate free energy
    double E_gamma = 0.0;  // modified free energy (plane radial only)
    double D_n = 0.0;
    double D_u = 0.0;
    double E_residual = 0.0;
    double loghls = 0.0;   // radial modes only

    std::array<double, 19> values() const {
        return {t,  dt, mass,    mean_u1, mean_u2, L2_n,    Linf_n,
                L2_u, L2_omega, V, S,     S_plus,  S_minus, E,
                E_gamma, D_n, D_u, E_residual, loghls};
    }
};

inline constexpr std::array<const char*, 19> kDiagnosticsColumns = {
    "t",   "dt",  "mass",    "mean_u1", "mean_u2", "L2_n",    "Linf_n",
    "L2_u", "L2_omega", "V", "S",       "S_plus",  "S_minus", "E",
    "E_gamma", "D_n", "D_u", "E_residual", "loghls"};

//------------------------------------------------------------
// Regularized entropy density. Below the splice point eta the logarithm
// is replaced by its second-order Taylor polynomial, which keeps the
/// integrand bounded: Gamma(0) = log eta - 3/2 is the global minimum.
//------------------------------------------------------------
struct GammaParams {
    double delta = 0.0;
    double mass = 0.0;
    double eta = 0.0; // min(1, delta/mass)
};

GammaParams make_gamma_params(double delta, double mass);

double gamma_fn(double n, const GammaParams& params);
double gamma_fn_d1(double n, const GammaParams& params);
double gamma_fn_d2(double n, const GammaParams& params);

struct EntropySplit {
    double S = 0.0;
    double S_plus = 0.0;
    double S_minus = 0.0; // S = S_plus - S_minus
};

EntropySplit entropy_split_torus(const SpectralScalar& n);
EntropySplit entropy_split_radial(const Eigen::ArrayXd& n, const RadialGrid& grid);

// int n log n - (n - mean n) c / 2 + |u|^2 / 2 over the torus.
double free_energy_torus(const TorusState& state);

// int n log n - n c / 2 + |u|^2 / 2 over the plane, radial quadrature.
double free_energy_plane_radial(const RadialState& state);

// Free energy with gamma_fn in place of the logarithm; coincides with
// free_energy_plane_radial when min n >= eta.
double modified_free_energy(const RadialState& state, const GammaParams& params);

struct Dissipation {
    double d_n = 0.0;
    double d_u = 0.0;
};

// Entropy production int n |grad log n - grad c|^2 evaluated in the
// stable form |grad n / sqrt(n) - sqrt(n) grad c|^2, with cells below
// 1e-14 * ||n||_inf contributing zero, plus the viscous rate.
Dissipation dissipation_torus(const TorusState& state);
Dissipation dissipation_radial(const RadialState& state);
// Self-similar rates; the vorticity part int Omega^2 is reduced by its
// equilibrium value pi G_inf^2 set by the conserved total circulation.
Dissipation dissipation_selfsim(const SelfSimState& state);

// Entropy production of n against an externally supplied potential.
double entropy_dissipation_torus(const SpectralScalar& n, const SpectralScalar& c);

struct SMinusBound {
    double lhs = 0.0; // S_minus
    double rhs = 0.0; // V/2 + log(2 pi) M + 1/e
};

SMinusBound s_minus_bound_check(const Eigen::ArrayXd& n, const RadialGrid& grid);

// int n log n + (2/M) int int n(x) n(y) log|x-y|, radial form with the
// angular average log max(r, s); prefix sums keep it O(n_r).
double loghls_functional(const Eigen::ArrayXd& n, const RadialGrid& grid);

DiagnosticsRecord diagnose_torus(const TorusState& state, double dt);
DiagnosticsRecord diagnose_radial(const RadialState& state, double dt,
                                  const GammaParams& params);
DiagnosticsRecord diagnose_selfsim(const SelfSimState& state, double dt);

// Central-difference residual dE/dt + interval-averaged (D_n + D_u); the
// first and last records keep residual zero.
void fill_energy_residuals(std::vector<DiagnosticsRecord>& records);

} // namespace pkns
