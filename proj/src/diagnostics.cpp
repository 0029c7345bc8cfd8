#include "pkns/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "pkns/errors.hpp"

namespace pkns {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

EntropySplit split_from_samples(const Eigen::ArrayXd& values, const Eigen::ArrayXd& weights) {
    EntropySplit out;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double contrib = xlogx(values[i]) * weights[i];
        if (contrib >= 0.0) {
            out.S_plus += contrib;
        } else {
            out.S_minus -= contrib;
        }
    }
    out.S = out.S_plus - out.S_minus;
    return out;
}

// int (n - mean n) c dx = sum_{k != 0} |n_k|^2 / |k|^2 by Parseval.
double interaction_torus(const SpectralScalar& n) {
    const int N = n.grid.n;
    double sum = 0.0;
    for (int col = 0; col < n.grid.cols(); ++col) {
        const double k2 = n.grid.wavenumber(col);
        const double w = (col == 0 || col == N / 2) ? 1.0 : 2.0;
        for (int row = 0; row < N; ++row) {
            const double k1 = n.grid.wavenumber(n.grid.row_mode(row));
            const double ksq = k1 * k1 + k2 * k2;
            if (ksq > 0.0) {
                sum += w * std::norm(n.coef(row, col)) / ksq;
            }
        }
    }
    return sum;
}

} // namespace

GammaParams make_gamma_params(double delta, double mass) {
    GammaParams p;
    p.delta = delta;
    p.mass = mass;
    p.eta = (mass > 0.0) ? std::min(1.0, delta / mass) : 1.0;
    return p;
}

double gamma_fn(double n, const GammaParams& p) {
    const double eta = p.eta;
    if (n >= eta) {
        return std::log(n);
    }
    const double d = n - eta;
    return std::log(eta) + d / eta - 0.5 * d * d / (eta * eta);
}

double gamma_fn_d1(double n, const GammaParams& p) {
    const double eta = p.eta;
    if (n >= eta) {
        return 1.0 / n;
    }
    return 1.0 / eta - (n - eta) / (eta * eta);
}

double gamma_fn_d2(double n, const GammaParams& p) {
    const double eta = p.eta;
    if (n >= eta) {
        return -1.0 / (n * n);
    }
    return -1.0 / (eta * eta);
}

EntropySplit entropy_split_torus(const SpectralScalar& n) {
    const RealField phys = to_physical(n);
    const double w = 1.0 / (static_cast<double>(n.grid.n) * n.grid.n);
    EntropySplit out;
    for (Eigen::Index i = 0; i < phys.size(); ++i) {
        const double contrib = xlogx(phys.data()[i]) * w;
        if (contrib >= 0.0) {
            out.S_plus += contrib;
        } else {
            out.S_minus -= contrib;
        }
    }
    out.S = out.S_plus - out.S_minus;
    return out;
}

EntropySplit entropy_split_radial(const Eigen::ArrayXd& n, const RadialGrid& grid) {
    Eigen::ArrayXd weights(grid.n_r);
    for (int j = 0; j < grid.n_r; ++j) {
        weights[j] = kTwoPi * grid.r_center(j) * grid.h();
    }
    return split_from_samples(n, weights);
}

double free_energy_torus(const TorusState& state) {
    const RealField n_phys = to_physical(state.n);
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < n_phys.size(); ++i) {
        entropy += xlogx(n_phys.data()[i]);
    }
    entropy /= static_cast<double>(n_phys.size());
    const double kinetic = 0.5 * l2_norm(state.u) * l2_norm(state.u);
    return entropy - 0.5 * interaction_torus(state.n) + kinetic;
}

double free_energy_plane_radial(const RadialState& state) {
    const RadialGrid& grid = state.grid;
    const Eigen::ArrayXd c = chemical_potential_radial(state.n, grid);
    const Eigen::ArrayXd u = azimuthal_velocity(state.omega, grid);
    double e = 0.0;
    for (int j = 0; j < grid.n_r; ++j) {
        e += (xlogx(state.n[j]) - 0.5 * state.n[j] * c[j] + 0.5 * u[j] * u[j]) *
             grid.r_center(j);
    }
    return kTwoPi * e * grid.h();
}

double modified_free_energy(const RadialState& state, const GammaParams& params) {
    const RadialGrid& grid = state.grid;
    const Eigen::ArrayXd c = chemical_potential_radial(state.n, grid);
    const Eigen::ArrayXd u = azimuthal_velocity(state.omega, grid);
    double e = 0.0;
    for (int j = 0; j < grid.n_r; ++j) {
        const double nj = state.n[j];
        const double entropy = (nj > 0.0) ? nj * gamma_fn(nj, params) : 0.0;
        e += (entropy - 0.5 * nj * c[j] + 0.5 * u[j] * u[j]) * grid.r_center(j);
    }
    return kTwoPi * e * grid.h();
}

double entropy_dissipation_torus(const SpectralScalar& n, const SpectralScalar& c) {
    auto& fft = Fft2D::for_size(n.grid.n);
    const RealField n_phys = fft.inverse(n.coef);
    const RealField dn1 = fft.inverse(spectral_derivative(n, 0).coef);
    const RealField dn2 = fft.inverse(spectral_derivative(n, 1).coef);
    const RealField dc1 = fft.inverse(spectral_derivative(c, 0).coef);
    const RealField dc2 = fft.inverse(spectral_derivative(c, 1).coef);
    const double floor = 1e-14 * n_phys.abs().maxCoeff();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n_phys.size(); ++i) {
        const double nv = n_phys.data()[i];
        if (nv <= floor) {
            continue;
        }
        const double root = std::sqrt(nv);
        const double g1 = dn1.data()[i] / root - root * dc1.data()[i];
        const double g2 = dn2.data()[i] / root - root * dc2.data()[i];
        sum += g1 * g1 + g2 * g2;
    }
    return sum / static_cast<double>(n_phys.size());
}

Dissipation dissipation_torus(const TorusState& state) {
    Dissipation out;
    out.d_n = entropy_dissipation_torus(state.n, poisson_solve_zero_mean(state.n));
    out.d_u = h1_seminorm_sq(state.u);
    return out;
}

namespace {

// Face-based entropy production sum_f n_f |d_r n / sqrt(n) - sqrt(n) v_f|^2
// with v the drift d_r c (minus X in the self-similar case).
double radial_entropy_dissipation(const Eigen::ArrayXd& n, const RadialGrid& grid,
                                  const Eigen::ArrayXd& drift_faces) {
    const double h = grid.h();
    const double floor = 1e-14 * n.abs().maxCoeff();
    double sum = 0.0;
    for (int j = 1; j < grid.n_r; ++j) {
        const double nf = 0.5 * (n[j - 1] + n[j]);
        if (nf <= floor) {
            continue;
        }
        const double root = std::sqrt(nf);
        const double g = (n[j] - n[j - 1]) / h / root - root * drift_faces[j];
        sum += g * g * grid.r_face(j);
    }
    return kTwoPi * sum * h;
}

} // namespace

Dissipation dissipation_radial(const RadialState& state) {
    const RadialGrid& grid = state.grid;
    const Eigen::ArrayXd m = cumulative_mass(state.n, grid);
    const Eigen::ArrayXd dcdr = chemical_gradient_faces(m, grid);
    Dissipation out;
    out.d_n = radial_entropy_dissipation(state.n, grid, dcdr);
    double enstrophy = 0.0;
    for (int j = 0; j < grid.n_r; ++j) {
        enstrophy += state.omega[j] * state.omega[j] * grid.r_center(j);
    }
    out.d_u = kTwoPi * enstrophy * grid.h();
    return out;
}

Dissipation dissipation_selfsim(const SelfSimState& state) {
    const RadialGrid& grid = state.grid;
    const Eigen::ArrayXd m = cumulative_mass(state.N, grid);
    Eigen::ArrayXd drift = chemical_gradient_faces(m, grid);
    for (int j = 0; j <= grid.n_r; ++j) {
        drift[j] -= grid.r_face(j);
    }
    Dissipation out;
    out.d_n = radial_entropy_dissipation(state.N, grid, drift);
    double enstrophy = 0.0;
    double g_inf = 0.0;
    for (int j = 0; j < grid.n_r; ++j) {
        enstrophy += state.Omega[j] * state.Omega[j] * grid.r_center(j);
        g_inf += state.Omega[j] * grid.r_center(j);
    }
    enstrophy *= kTwoPi * grid.h();
    g_inf *= grid.h();
    out.d_u = enstrophy - kPi * g_inf * g_inf;
    return out;
}

SMinusBound s_minus_bound_check(const Eigen::ArrayXd& n, const RadialGrid& grid) {
    SMinusBound out;
    out.lhs = entropy_split_radial(n, grid).S_minus;
    out.rhs = 0.5 * second_moment_radial(n, grid) +
              std::log(kTwoPi) * total_mass(n, grid) + 1.0 / std::numbers::e;
    return out;
}

double loghls_functional(const Eigen::ArrayXd& n, const RadialGrid& grid) {
    const double entropy = entropy_split_radial(n, grid).S;
    const double mass = total_mass(n, grid);
    if (!(mass > 0.0)) {
        return entropy;
    }
    const int n_r = grid.n_r;
    // Ring masses a_j; the angular average of log|x-y| over rings of radii
    // r and s is log max(r, s), so the double integral splits by prefix.
    Eigen::ArrayXd a(n_r);
    for (int j = 0; j < n_r; ++j) {
        a[j] = kTwoPi * n[j] * grid.r_center(j) * grid.h();
    }
    Eigen::ArrayXd suffix(n_r + 1);
    suffix[n_r] = 0.0;
    for (int j = n_r - 1; j >= 0; --j) {
        suffix[j] = suffix[j + 1] + a[j] * std::log(grid.r_center(j));
    }
    double interaction = 0.0;
    double prefix = 0.0;
    for (int j = 0; j < n_r; ++j) {
        prefix += a[j];
        interaction += a[j] * (std::log(grid.r_center(j)) * prefix + suffix[j + 1]);
    }
    return entropy + 2.0 / mass * interaction;
}

DiagnosticsRecord diagnose_torus(const TorusState& state, double dt) {
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.dt = dt;
    rec.mass = mean(state.n);
    rec.mean_u1 = state.u.c1.coef(0, 0).real();
    rec.mean_u2 = state.u.c2.coef(0, 0).real();
    rec.L2_n = l2_norm(state.n);
    rec.Linf_n = to_physical(state.n).abs().maxCoeff();
    rec.L2_u = l2_norm(state.u);
    rec.L2_omega = l2_norm(curl(state.u));
    rec.V = kNan;
    const EntropySplit split = entropy_split_torus(state.n);
    rec.S = split.S;
    rec.S_plus = split.S_plus;
    rec.S_minus = split.S_minus;
    rec.E = free_energy_torus(state);
    rec.E_gamma = kNan;
    const Dissipation d = dissipation_torus(state);
    rec.D_n = d.d_n;
    rec.D_u = d.d_u;
    rec.loghls = kNan;
    return rec;
}

DiagnosticsRecord diagnose_radial(const RadialState& state, double dt,
                                  const GammaParams& params) {
    const RadialGrid& grid = state.grid;
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.dt = dt;
    rec.mass = total_mass(state.n, grid);
    rec.mean_u1 = 0.0;
    rec.mean_u2 = 0.0;
    Eigen::ArrayXd w(grid.n_r);
    for (int j = 0; j < grid.n_r; ++j) {
        w[j] = kTwoPi * grid.r_center(j) * grid.h();
    }
    rec.L2_n = std::sqrt((state.n * state.n * w).sum());
    rec.Linf_n = state.n.abs().maxCoeff();
    const Eigen::ArrayXd u = azimuthal_velocity(state.omega, grid);
    rec.L2_u = std::sqrt((u * u * w).sum());
    rec.L2_omega = std::sqrt((state.omega * state.omega * w).sum());
    rec.V = second_moment_radial(state.n, grid);
    const EntropySplit split = entropy_split_radial(state.n, grid);
    rec.S = split.S;
    rec.S_plus = split.S_plus;
    rec.S_minus = split.S_minus;
    rec.E = free_energy_plane_radial(state);
    rec.E_gamma = modified_free_energy(state, params);
    const Dissipation d = dissipation_radial(state);
    rec.D_n = d.d_n;
    rec.D_u = d.d_u;
    rec.loghls = loghls_functional(state.n, grid);
    return rec;
}

DiagnosticsRecord diagnose_selfsim(const SelfSimState& state, double dt) {
    const RadialGrid& grid = state.grid;
    DiagnosticsRecord rec;
    rec.t = state.tau;
    rec.dt = dt;
    rec.mass = total_mass(state.N, grid);
    rec.mean_u1 = 0.0;
    rec.mean_u2 = 0.0;
    Eigen::ArrayXd w(grid.n_r);
    for (int j = 0; j < grid.n_r; ++j) {
        w[j] = kTwoPi * grid.r_center(j) * grid.h();
    }
    rec.L2_n = std::sqrt((state.N * state.N * w).sum());
    rec.Linf_n = state.N.abs().maxCoeff();
    const Eigen::ArrayXd u = azimuthal_velocity(state.Omega, grid);
    rec.L2_u = std::sqrt((u * u * w).sum());
    rec.L2_omega = std::sqrt((state.Omega * state.Omega * w).sum());
    rec.V = second_moment_radial(state.N, grid);
    const EntropySplit split = entropy_split_radial(state.N, grid);
    rec.S = split.S;
    rec.S_plus = split.S_plus;
    rec.S_minus = split.S_minus;
    rec.E = energy_selfsim(state);
    rec.E_gamma = kNan;
    const Dissipation d = dissipation_selfsim(state);
    rec.D_n = d.d_n;
    rec.D_u = d.d_u;
    rec.loghls = loghls_functional(state.N, grid);
    return rec;
}

void fill_energy_residuals(std::vector<DiagnosticsRecord>& records) {
    for (auto& rec : records) {
        rec.E_residual = 0.0;
    }
    for (size_t i = 1; i + 1 < records.size(); ++i) {
        const auto& lo = records[i - 1];
        const auto& hi = records[i + 1];
        const double span = hi.t - lo.t;
        if (span <= 0.0) {
            continue;
        }
        const double dedt = (hi.E - lo.E) / span;
        const double d_lo = lo.D_n + lo.D_u;
        const double d_mid = records[i].D_n + records[i].D_u;
        const double d_hi = hi.D_n + hi.D_u;
        records[i].E_residual = dedt + 0.25 * (d_lo + 2.0 * d_mid + d_hi);
    }
}

} // namespace pkns
