#include "pkns/selfsim.hpp"

#include <cmath>
#include <numbers>

#include "pkns/errors.hpp"
#include "pkns/numerics.hpp"

namespace pkns {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Rebins a cell-center density onto dst so that the cumulative integral
// int f 2 pi s ds is preserved: faces of dst map to src radii through
// map_factor, the cumulative is interpolated there and differenced.
Eigen::ArrayXd conservative_rebin(const Eigen::ArrayXd& density, const RadialGrid& src,
                                  const RadialGrid& dst, double map_factor) {
    const double reach = map_factor * dst.r_max;
    if (reach > src.r_max * (1.0 + 1e-9)) {
        throw InterpolationRange("rebin needs radius " + std::to_string(reach) +
                                 " beyond stored r_max " + std::to_string(src.r_max));
    }
    const Eigen::ArrayXd cum_src = cumulative_mass(density, src);
    Eigen::ArrayXd faces_src(src.n_r + 1);
    for (int j = 0; j <= src.n_r; ++j) {
        faces_src[j] = src.r_face(j);
    }
    const MonotoneCubic interp(faces_src, cum_src);

    Eigen::ArrayXd out(dst.n_r);
    double prev = 0.0;
    for (int j = 0; j < dst.n_r; ++j) {
        const double next = interp(map_factor * dst.r_face(j + 1));
        out[j] = (next - prev) / (kTwoPi * dst.r_center(j) * dst.h());
        prev = next;
    }
    return out;
}

// Explicit part of the tendency: confining drift and chemotactic flux.
Eigen::ArrayXd explicit_tendency(const Eigen::ArrayXd& N, const RadialGrid& grid,
                                 bool chemotaxis, bool drift) {
    Eigen::ArrayXd flux = Eigen::ArrayXd::Zero(grid.n_r + 1);
    if (drift) {
        for (int j = 1; j < grid.n_r; ++j) {
            flux[j] += grid.r_face(j) * 0.5 * (N[j - 1] + N[j]);
        }
    }
    if (chemotaxis) {
        const Eigen::ArrayXd m = cumulative_mass(N, grid);
        const Eigen::ArrayXd dcdr = chemical_gradient_faces(m, grid);
        for (int j = 1; j < grid.n_r; ++j) {
            flux[j] -= 0.5 * (N[j - 1] + N[j]) * dcdr[j];
        }
    }
    const double h = grid.h();
    Eigen::ArrayXd out(grid.n_r);
    for (int j = 0; j < grid.n_r; ++j) {
        out[j] = (grid.r_face(j + 1) * flux[j + 1] - grid.r_face(j) * flux[j]) /
                 (grid.r_center(j) * h);
    }
    return out;
}

Eigen::ArrayXd explicit_substep(const Eigen::ArrayXd& N, const RadialGrid& grid, double dt,
                                bool chemotaxis, bool drift) {
    const Eigen::ArrayXd k1 = explicit_tendency(N, grid, chemotaxis, drift);
    const Eigen::ArrayXd k2 = explicit_tendency(N + 0.5 * dt * k1, grid, chemotaxis, drift);
    return N + dt * k2;
}

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

} // namespace

double scale_R(double t) { return std::sqrt(1.0 + 2.0 * t); }
double tau_of_t(double t) { return 0.5 * std::log1p(2.0 * t); }
double t_of_tau(double tau) { return 0.5 * std::expm1(2.0 * tau); }

RadialGrid make_selfsim_grid(double x_max, int n_r) { return make_radial_grid(x_max, n_r); }

SelfSimState to_selfsim(const RadialState& state, const RadialGrid& x_grid) {
    const double R = scale_R(state.t);
    SelfSimState out;
    out.tau = tau_of_t(state.t);
    out.grid = x_grid;
    out.N = conservative_rebin(state.n, state.grid, x_grid, R);
    out.Omega = conservative_rebin(state.omega, state.grid, x_grid, R);
    return out;
}

RadialState from_selfsim(const SelfSimState& state, const RadialGrid& r_grid) {
    const double t = t_of_tau(state.tau);
    const double R = scale_R(t);
    RadialState out;
    out.t = t;
    out.grid = r_grid;
    out.n = conservative_rebin(state.N, state.grid, r_grid, 1.0 / R);
    out.omega = conservative_rebin(state.Omega, state.grid, r_grid, 1.0 / R);
    return out;
}

SelfSimTendency rhs_selfsim(const SelfSimState& state, const SelfSimRhsTerms& terms) {
    const RadialGrid& grid = state.grid;
    const double h = grid.h();

    SelfSimTendency out;
    out.dN = explicit_tendency(state.N, grid, terms.chemotaxis, terms.drift);
    out.dOmega = explicit_tendency(state.Omega, grid, false, terms.drift);

    // Add the diffusive flux divergence for both fields.
    for (auto [f, df] : {std::pair{&state.N, &out.dN}, std::pair{&state.Omega, &out.dOmega}}) {
        Eigen::ArrayXd flux = Eigen::ArrayXd::Zero(grid.n_r + 1);
        for (int j = 1; j < grid.n_r; ++j) {
            flux[j] = ((*f)[j] - (*f)[j - 1]) / h;
        }
        for (int j = 0; j < grid.n_r; ++j) {
            (*df)[j] += (grid.r_face(j + 1) * flux[j + 1] - grid.r_face(j) * flux[j]) /
                        (grid.r_center(j) * h);
        }
    }
    return out;
}

SelfSimState step_selfsim(const SelfSimState& state, double dt, const SelfSimRhsTerms& terms) {
    const RadialGrid& grid = state.grid;

    SelfSimState out;
    out.tau = state.tau + dt;
    out.grid = grid;

    out.N = explicit_substep(state.N, grid, 0.5 * dt, terms.chemotaxis, terms.drift);
    out.N = diffuse_crank_nicolson(out.N, grid, dt);
    out.N = explicit_substep(out.N, grid, 0.5 * dt, terms.chemotaxis, terms.drift);

    out.Omega = explicit_substep(state.Omega, grid, 0.5 * dt, false, terms.drift);
    out.Omega = diffuse_crank_nicolson(out.Omega, grid, dt);
    out.Omega = explicit_substep(out.Omega, grid, 0.5 * dt, false, terms.drift);

    const double linf = out.N.abs().maxCoeff();
    const double nmin = out.N.minCoeff();
    if (nmin < -1e-6 * linf) {
        throw PositivityLoss("rescaled density undershoot at tau=" + std::to_string(out.tau),
                             nmin, linf);
    }
    return out;
}

double energy_selfsim(const SelfSimState& state) {
    const RadialGrid& grid = state.grid;
    const double h = grid.h();
    const Eigen::ArrayXd c = chemical_potential_radial(state.N, grid);

    // Stream function of Omega: X Psi' = int_0^X Omega s ds =: G, anchored
    // by Psi(r_max) = G_inf log(r_max) from the far-field expansion.
    const int n_r = grid.n_r;
    Eigen::ArrayXd g_face = Eigen::ArrayXd::Zero(n_r + 1);
    for (int j = 0; j < n_r; ++j) {
        g_face[j + 1] = g_face[j] + state.Omega[j] * grid.r_center(j) * h;
    }
    Eigen::ArrayXd psi_face(n_r + 1);
    psi_face[n_r] = g_face[n_r] * std::log(grid.r_max);
    for (int j = n_r - 1; j >= 0; --j) {
        // d_X Psi at the cell center between the two faces
        const double g_center = 0.5 * (g_face[j] + g_face[j + 1]);
        psi_face[j] = psi_face[j + 1] - h * g_center / grid.r_center(j);
    }

    double e = 0.0;
    for (int j = 0; j < n_r; ++j) {
        const double x = grid.r_center(j);
        const double nj = state.N[j];
        const double entropy = (nj > 0.0) ? nj * std::log(nj) : 0.0;
        const double psi = 0.5 * (psi_face[j] + psi_face[j + 1]);
        e += (entropy - 0.5 * nj * c[j] + 0.5 * nj * x * x -
              0.5 * psi * state.Omega[j]) * x;
    }
    return kTwoPi * e * h;
}

DtChoice adaptive_dt_selfsim(const SelfSimState& state, const StepControl& control) {
    const Eigen::ArrayXd m = cumulative_mass(state.N, state.grid);
    const Eigen::ArrayXd dcdr = chemical_gradient_faces(m, state.grid);
    const double vmax = dcdr.abs().maxCoeff() + state.grid.r_max;
    const double nmax = std::max(state.N.maxCoeff(), 0.0);
    const double rate = vmax / state.grid.h() + 0.5 * nmax + 1e-30;
    DtChoice choice;
    choice.dt = std::min(control.dt_max, control.cfl / rate);
    choice.blowup_suspected = choice.dt < control.dt_min;
    return choice;
}

} // namespace pkns
