#include "pkns/spectral.hpp"

#include <cmath>
#include <numbers>

#include "pkns/errors.hpp"

namespace pkns {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int wrap_row(int n, int m) { return m >= 0 ? m : m + n; }

// Parseval weight of a stored column: interior columns carry their
// conjugate mirror, the m2 = 0 and m2 = n/2 columns do not.
double col_weight(int n, int col) { return (col == 0 || col == n / 2) ? 1.0 : 2.0; }

} // namespace

double TorusGrid::wavenumber(int m) const { return kTwoPi * m; }

TorusGrid make_torus_grid(int n) {
    if (n < 8 || !power_of_two(n)) {
        throw ConfigError("grid size must be a power of two >= 8, got " + std::to_string(n));
    }
    return TorusGrid{n};
}

SpectralScalar zero_scalar(const TorusGrid& grid) {
    return SpectralScalar{grid, ComplexField::Zero(grid.n, grid.cols())};
}

SpectralVector zero_vector(const TorusGrid& grid) {
    return SpectralVector{zero_scalar(grid), zero_scalar(grid)};
}

SpectralScalar to_spectral(const TorusGrid& grid, const RealField& f) {
    return SpectralScalar{grid, Fft2D::for_size(grid.n).forward(f)};
}

RealField to_physical(const SpectralScalar& s) {
    return Fft2D::for_size(s.grid.n).inverse(s.coef);
}

std::complex<double> mode(const SpectralScalar& s, int m1, int m2) {
    const int n = s.grid.n;
    if (m2 < 0 && m2 != -n / 2) {
        return std::conj(mode(s, -m1, -m2));
    }
    const int col = (m2 == -n / 2) ? n / 2 : m2;
    return s.coef(wrap_row(n, m1), col);
}

void set_mode(SpectralScalar& s, int m1, int m2, std::complex<double> value) {
    const int n = s.grid.n;
    if (m2 < 0 && m2 != -n / 2) {
        set_mode(s, -m1, -m2, std::conj(value));
        return;
    }
    const int col = (m2 == -n / 2) ? n / 2 : m2;
    const int row = wrap_row(n, m1);
    s.coef(row, col) = value;
    if (col == 0 || col == n / 2) {
        const int partner = (n - row) % n;
        if (partner != row) {
            s.coef(partner, col) = std::conj(value);
        }
    }
}

double mean(const SpectralScalar& s) { return s.coef(0, 0).real(); }

double l2_norm(const SpectralScalar& s) {
    const int n = s.grid.n;
    double sum = 0.0;
    for (int col = 0; col < s.grid.cols(); ++col) {
        const double w = col_weight(n, col);
        for (int row = 0; row < n; ++row) {
            sum += w * std::norm(s.coef(row, col));
        }
    }
    return std::sqrt(sum);
}

double l2_norm(const SpectralVector& u) {
    const double a = l2_norm(u.c1);
    const double b = l2_norm(u.c2);
    return std::sqrt(a * a + b * b);
}

double h1_seminorm_sq(const SpectralScalar& s) {
    const int n = s.grid.n;
    double sum = 0.0;
    for (int col = 0; col < s.grid.cols(); ++col) {
        const double k2 = s.grid.wavenumber(col);
        const double w = col_weight(n, col);
        for (int row = 0; row < n; ++row) {
            const double k1 = s.grid.wavenumber(s.grid.row_mode(row));
            sum += w * (k1 * k1 + k2 * k2) * std::norm(s.coef(row, col));
        }
    }
    return sum;
}

double h1_seminorm_sq(const SpectralVector& u) {
    return h1_seminorm_sq(u.c1) + h1_seminorm_sq(u.c2);
}

SpectralScalar poisson_solve_zero_mean(const SpectralScalar& f) {
    SpectralScalar c = f;
    const int n = f.grid.n;
    for (int col = 0; col < f.grid.cols(); ++col) {
        const double k2 = f.grid.wavenumber(col);
        for (int row = 0; row < n; ++row) {
            const double k1 = f.grid.wavenumber(f.grid.row_mode(row));
            const double ksq = k1 * k1 + k2 * k2;
            c.coef(row, col) = (ksq == 0.0) ? 0.0 : f.coef(row, col) / ksq;
        }
    }
    return c;
}

SpectralVector leray_project(const SpectralVector& u) {
    SpectralVector p = u;
    const int n = u.c1.grid.n;
    for (int col = 0; col < u.c1.grid.cols(); ++col) {
        const double k2 = u.c1.grid.wavenumber(col);
        for (int row = 0; row < n; ++row) {
            if (row == n / 2 || col == n / 2) {
                // The Nyquist band has no consistent odd derivative, so it
                // cannot take part in a divergence-free decomposition.
                p.c1.coef(row, col) = 0.0;
                p.c2.coef(row, col) = 0.0;
                continue;
            }
            const double k1 = u.c1.grid.wavenumber(u.c1.grid.row_mode(row));
            const double ksq = k1 * k1 + k2 * k2;
            if (ksq == 0.0) {
                continue;
            }
            const std::complex<double> kdotu =
                (k1 * u.c1.coef(row, col) + k2 * u.c2.coef(row, col)) / ksq;
            p.c1.coef(row, col) -= k1 * kdotu;
            p.c2.coef(row, col) -= k2 * kdotu;
        }
    }
    return p;
}

SpectralVector biot_savart(const SpectralScalar& omega) {
    const double mean_mag = std::abs(omega.coef(0, 0));
    if (mean_mag > 1e-12 * l2_norm(omega)) {
        throw NonzeroMeanVorticity(
            "vorticity mean " + std::to_string(mean_mag) + " is not negligible");
    }
    SpectralVector u = zero_vector(omega.grid);
    const int n = omega.grid.n;
    const std::complex<double> I(0.0, 1.0);
    for (int col = 0; col < omega.grid.cols(); ++col) {
        const double k2 = omega.grid.wavenumber(col);
        for (int row = 0; row < n; ++row) {
            if (row == n / 2 || col == n / 2) {
                continue; // Nyquist band, see leray_project
            }
            const double k1 = omega.grid.wavenumber(omega.grid.row_mode(row));
            const double ksq = k1 * k1 + k2 * k2;
            if (ksq == 0.0) {
                continue;
            }
            // psi = -omega/|k|^2 and u = (-d2 psi, d1 psi)
            const std::complex<double> w = omega.coef(row, col) / ksq;
            u.c1.coef(row, col) = I * k2 * w;
            u.c2.coef(row, col) = -I * k1 * w;
        }
    }
    return u;
}

SpectralScalar spectral_derivative(const SpectralScalar& f, int axis) {
    SpectralScalar d = f;
    const int n = f.grid.n;
    const std::complex<double> I(0.0, 1.0);
    for (int col = 0; col < f.grid.cols(); ++col) {
        for (int row = 0; row < n; ++row) {
            const int m = (axis == 0) ? f.grid.row_mode(row) : col;
            const bool nyquist = (axis == 0) ? (row == n / 2) : (col == n / 2);
            d.coef(row, col) = nyquist ? 0.0 : I * f.grid.wavenumber(m) * f.coef(row, col);
        }
    }
    return d;
}

SpectralVector gradient(const SpectralScalar& f) {
    return SpectralVector{spectral_derivative(f, 0), spectral_derivative(f, 1)};
}

SpectralScalar divergence(const SpectralVector& u) {
    SpectralScalar d = spectral_derivative(u.c1, 0);
    d.coef += spectral_derivative(u.c2, 1).coef;
    return d;
}

SpectralScalar curl(const SpectralVector& u) {
    SpectralScalar w = spectral_derivative(u.c2, 0);
    w.coef -= spectral_derivative(u.c1, 1).coef;
    return w;
}

void dealias_inplace(SpectralScalar& s) {
    const int n = s.grid.n;
    for (int col = 0; col < s.grid.cols(); ++col) {
        const bool kill_col = 3 * col > n;
        for (int row = 0; row < n; ++row) {
            if (kill_col || 3 * std::abs(s.grid.row_mode(row)) > n) {
                s.coef(row, col) = 0.0;
            }
        }
    }
}

SpectralScalar dealias(const SpectralScalar& s) {
    SpectralScalar out = s;
    dealias_inplace(out);
    return out;
}

} // namespace pkns
