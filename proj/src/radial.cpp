#include "pkns/radial.hpp"

#include <cmath>
#include <numbers>

#include "pkns/errors.hpp"
#include "pkns/numerics.hpp"

namespace pkns {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Divergence of the face flux G: dn_j = (r_{j+1} G_{j+1} - r_j G_j)/(r_j h),
// with G of size n_r + 1 and zero entries at both ends.
Eigen::ArrayXd face_flux_divergence(const Eigen::ArrayXd& flux, const RadialGrid& grid) {
    const double h = grid.h();
    Eigen::ArrayXd out(grid.n_r);
    for (int j = 0; j < grid.n_r; ++j) {
        out[j] = (grid.r_face(j + 1) * flux[j + 1] - grid.r_face(j) * flux[j]) /
                 (grid.r_center(j) * h);
    }
    return out;
}

// Explicit chemotactic tendency -(1/r) d_r (r n d_r c) with c from n.
Eigen::ArrayXd chemo_tendency(const Eigen::ArrayXd& n, const RadialGrid& grid) {
    const Eigen::ArrayXd m = cumulative_mass(n, grid);
    const Eigen::ArrayXd dcdr = chemical_gradient_faces(m, grid);
    Eigen::ArrayXd flux = Eigen::ArrayXd::Zero(grid.n_r + 1);
    for (int j = 1; j < grid.n_r; ++j) {
        flux[j] = -0.5 * (n[j - 1] + n[j]) * dcdr[j];
    }
    return face_flux_divergence(flux, grid);
}

// Crank-Nicolson step of the radial heat operator, zero flux at the ends.
Eigen::ArrayXd diffuse_crank_nicolson(const Eigen::ArrayXd& f, const RadialGrid& grid,
                                      double dt) {
    const int n_r = grid.n_r;
    const double h = grid.h();
    Eigen::ArrayXd lower = Eigen::ArrayXd::Zero(n_r);
    Eigen::ArrayXd diag(n_r);
    Eigen::ArrayXd upper = Eigen::ArrayXd::Zero(n_r);
    Eigen::ArrayXd rhs(n_r);
    for (int j = 0; j < n_r; ++j) {
        const double rj = grid.r_center(j);
        const double a = (j > 0) ? grid.r_face(j) / (rj * h * h) : 0.0;
        const double c = (j + 1 < n_r) ? grid.r_face(j + 1) / (rj * h * h) : 0.0;
        const double lf = (j > 0) ? f[j - 1] : 0.0;
        const double rf = (j + 1 < n_r) ? f[j + 1] : 0.0;
        const double lap = a * (lf - f[j]) + c * (rf - f[j]);
        lower[j] = -0.5 * dt * a;
        upper[j] = -0.5 * dt * c;
        diag[j] = 1.0 + 0.5 * dt * (a + c);
        rhs[j] = f[j] + 0.5 * dt * lap;
    }
    return solve_tridiagonal(lower, diag, upper, rhs);
}

// Midpoint-rule substep of the explicit flux over dt (locally second order).
Eigen::ArrayXd chemo_substep(const Eigen::ArrayXd& n, const RadialGrid& grid, double dt) {
    const Eigen::ArrayXd k1 = chemo_tendency(n, grid);
    const Eigen::ArrayXd k2 = chemo_tendency(n + 0.5 * dt * k1, grid);
    return n + dt * k2;
}

} // namespace

RadialGrid make_radial_grid(double r_max, int n_r) {
    if (!(r_max > 0.0) || n_r < 64) {
        throw ConfigError("radial grid needs r_max > 0 and n_r >= 64");
    }
    return RadialGrid{r_max, n_r};
}

Eigen::ArrayXd cumulative_mass(const Eigen::ArrayXd& n, const RadialGrid& grid) {
    const double h = grid.h();
    Eigen::ArrayXd m(grid.n_r + 1);
    m[0] = 0.0;
    for (int j = 0; j < grid.n_r; ++j) {
        m[j + 1] = m[j] + kTwoPi * n[j] * grid.r_center(j) * h;
    }
    return m;
}

double total_mass(const Eigen::ArrayXd& n, const RadialGrid& grid) {
    return cumulative_mass(n, grid)[grid.n_r];
}

Eigen::ArrayXd chemical_gradient_radial(const Eigen::ArrayXd& m_faces, const RadialGrid& grid) {
    // Average of the two adjacent face gradients. Dividing an averaged
    // mass by r_center instead would be O(h) wrong in the first cell,
    // where m grows like r^2.
    const Eigen::ArrayXd g = chemical_gradient_faces(m_faces, grid);
    Eigen::ArrayXd dcdr(grid.n_r);
    for (int j = 0; j < grid.n_r; ++j) {
        dcdr[j] = 0.5 * (g[j] + g[j + 1]);
    }
    return dcdr;
}

Eigen::ArrayXd chemical_gradient_faces(const Eigen::ArrayXd& m_faces, const RadialGrid& grid) {
    Eigen::ArrayXd dcdr = Eigen::ArrayXd::Zero(grid.n_r + 1);
    for (int j = 1; j <= grid.n_r; ++j) {
        dcdr[j] = -m_faces[j] / (kTwoPi * grid.r_face(j));
    }
    return dcdr;
}

Eigen::ArrayXd chemical_potential_radial(const Eigen::ArrayXd& n, const RadialGrid& grid) {
    const Eigen::ArrayXd m = cumulative_mass(n, grid);
    const Eigen::ArrayXd dcdr_center = chemical_gradient_radial(m, grid);
    const double mass = m[grid.n_r];
    // Face values, integrated inward from the free-space far field.
    Eigen::ArrayXd c_face(grid.n_r + 1);
    c_face[grid.n_r] = -mass / kTwoPi * std::log(grid.r_max);
    for (int j = grid.n_r - 1; j >= 0; --j) {
        c_face[j] = c_face[j + 1] - grid.h() * dcdr_center[j];
    }
    Eigen::ArrayXd c(grid.n_r);
    for (int j = 0; j < grid.n_r; ++j) {
        c[j] = 0.5 * (c_face[j] + c_face[j + 1]);
    }
    return c;
}

Eigen::ArrayXd azimuthal_velocity(const Eigen::ArrayXd& omega, const RadialGrid& grid) {
    const double h = grid.h();
    Eigen::ArrayXd u(grid.n_r);
    double circ = 0.0; // int_0^r w s ds up to the current face
    for (int j = 0; j < grid.n_r; ++j) {
        const double r_f = grid.r_face(j);
        const double r_c = grid.r_center(j);
        // For cellwise-constant w both partial integrals of w s ds are
        // exact: (r_c^2 - r_f^2)/2 over the half cell, r_c h over the cell.
        const double half = 0.25 * omega[j] * (r_f + r_c) * h;
        u[j] = (circ + half) / r_c;
        circ += omega[j] * r_c * h;
    }
    return u;
}

RadialTendency rhs_radial(const RadialState& state, const RadialRhsTerms& terms) {
    const RadialGrid& grid = state.grid;
    const double h = grid.h();

    Eigen::ArrayXd flux_n = Eigen::ArrayXd::Zero(grid.n_r + 1);
    for (int j = 1; j < grid.n_r; ++j) {
        flux_n[j] = (state.n[j] - state.n[j - 1]) / h;
    }
    if (terms.chemotaxis) {
        const Eigen::ArrayXd m = cumulative_mass(state.n, grid);
        const Eigen::ArrayXd dcdr = chemical_gradient_faces(m, grid);
        for (int j = 1; j < grid.n_r; ++j) {
            flux_n[j] -= 0.5 * (state.n[j - 1] + state.n[j]) * dcdr[j];
        }
    }

    Eigen::ArrayXd flux_w = Eigen::ArrayXd::Zero(grid.n_r + 1);
    for (int j = 1; j < grid.n_r; ++j) {
        flux_w[j] = (state.omega[j] - state.omega[j - 1]) / h;
    }

    return RadialTendency{face_flux_divergence(flux_n, grid),
                          face_flux_divergence(flux_w, grid)};
}

RadialState step_radial(const RadialState& state, double dt, const RadialRhsTerms& terms) {
    const RadialGrid& grid = state.grid;

    Eigen::ArrayXd n = state.n;
    if (terms.chemotaxis) {
        n = chemo_substep(n, grid, 0.5 * dt);
    }
    n = diffuse_crank_nicolson(n, grid, dt);
    if (terms.chemotaxis) {
        n = chemo_substep(n, grid, 0.5 * dt);
    }

    RadialState out;
    out.t = state.t + dt;
    out.grid = grid;
    out.n = std::move(n);
    out.omega = diffuse_crank_nicolson(state.omega, grid, dt);

    const double linf = out.n.abs().maxCoeff();
    const double nmin = out.n.minCoeff();
    if (nmin < -1e-6 * linf) {
        throw PositivityLoss("density undershoot at t=" + std::to_string(out.t), nmin, linf);
    }
    return out;
}

double second_moment_radial(const Eigen::ArrayXd& n, const RadialGrid& grid) {
    const double h = grid.h();
    double v = 0.0;
    for (int j = 0; j < grid.n_r; ++j) {
        const double r = grid.r_center(j);
        v += n[j] * r * r * r;
    }
    return kTwoPi * v * h;
}

std::optional<double> blowup_time_estimate(double mass, double second_moment0) {
    if (mass <= 8.0 * kPi) {
        return std::nullopt;
    }
    return 8.0 * kPi * second_moment0 / (4.0 * mass * (mass - 8.0 * kPi));
}

bool radial_boundary_guard(const Eigen::ArrayXd& n, const RadialGrid& grid) {
    const double linf = n.abs().maxCoeff();
    const int guard_start = grid.n_r - std::max(1, grid.n_r / 20);
    for (int j = guard_start; j < grid.n_r; ++j) {
        if (n[j] > 1e-8 * linf) {
            return false;
        }
    }
    return true;
}

DtChoice adaptive_dt_radial(const RadialState& state, const StepControl& control) {
    const Eigen::ArrayXd m = cumulative_mass(state.n, state.grid);
    const Eigen::ArrayXd dcdr = chemical_gradient_faces(m, state.grid);
    const double vmax = dcdr.abs().maxCoeff();
    const double nmax = std::max(state.n.maxCoeff(), 0.0);
    const double rate = vmax / state.grid.h() + 0.5 * nmax + 1e-30;
    DtChoice choice;
    choice.dt = std::min(control.dt_max, control.cfl / rate);
    choice.blowup_suspected = choice.dt < control.dt_min;
    return choice;
}

} // namespace pkns
