#pragma once

#include <complex>

#include "pkns/fft.hpp"

namespace pkns {

//============================================================
// Fourier representation of fields on the unit torus [0,1)^2.
//
//  * n points per axis, power of two, at least 8.
//  * Mode m carries wavenumber 2*pi*m with m in [-n/2, n/2).
//  * Real fields are stored as the half spectrum produced by the
//    real-to-complex transform, so Hermitian symmetry holds by
//    construction and coefficient (0,0) is the mean of the field.
//============================================================

struct TorusGrid {
    int n = 0;

    double h() const { return 1.0 / n; }
    int cols() const { return n / 2 + 1; }
    // Integer mode of a stored row index (wrapped order).
    int row_mode(int row) const { return row < n / 2 ? row : row - n; }
    double wavenumber(int m) const;

    bool operator==(const TorusGrid&) const = default;
};

// Throws ConfigError unless n is a power of two and n >= 8.
TorusGrid make_torus_grid(int n);

struct SpectralScalar {
    TorusGrid grid;
    ComplexField coef;
};

struct SpectralVector {
    SpectralScalar c1;
    SpectralScalar c2;
};

SpectralScalar zero_scalar(const TorusGrid& grid);
SpectralVector zero_vector(const TorusGrid& grid);

// Transforms (pure, deterministic for a fixed grid size).
SpectralScalar to_spectral(const TorusGrid& grid, const RealField& f);
RealField to_physical(const SpectralScalar& s);

// Accessors for the full-spectrum coefficient of mode (m1, m2); set_mode
// also writes the conjugate partner so the field stays real-valued.
std::complex<double> mode(const SpectralScalar& s, int m1, int m2);
void set_mode(SpectralScalar& s, int m1, int m2, std::complex<double> value);

double mean(const SpectralScalar& s);
double l2_norm(const SpectralScalar& s);
double l2_norm(const SpectralVector& u);
// sum over modes of |k|^2 |f(k)|^2, the squared H^1 seminorm.
double h1_seminorm_sq(const SpectralScalar& s);
double h1_seminorm_sq(const SpectralVector& u);

// Solves -Lap c = f with the zero mode of c set to zero.
SpectralScalar poisson_solve_zero_mean(const SpectralScalar& f);

// Mode-wise projection onto divergence-free fields, (I - k k^T/|k|^2);
// annihilates the Nyquist band, which has no consistent odd derivative,
// so div(leray_project(u)) vanishes identically.
SpectralVector leray_project(const SpectralVector& u);

// Velocity with the given vorticity: u = grad^perp (Lap^-1 omega), with
// the Nyquist band of omega ignored like in leray_project.
// Throws NonzeroMeanVorticity when |omega(0,0)| > 1e-12 * ||omega||_2.
SpectralVector biot_savart(const SpectralScalar& omega);

// Multiplication by i*k_axis; axis is 0 or 1. The Nyquist mode of the
// differentiated axis is zeroed, as its odd derivative has no real
// representation on the grid.
SpectralScalar spectral_derivative(const SpectralScalar& f, int axis);

SpectralVector gradient(const SpectralScalar& f);
SpectralScalar divergence(const SpectralVector& u);
// Scalar curl d1 u2 - d2 u1.
SpectralScalar curl(const SpectralVector& u);

// Two-thirds rule: zeroes every mode with 3*|m| > n on either axis.
void dealias_inplace(SpectralScalar& s);
SpectralScalar dealias(const SpectralScalar& s);

} // namespace pkns
