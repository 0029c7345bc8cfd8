#include "pkns/torus.hpp"

#include <cmath>

#include "pkns/errors.hpp"

namespace pkns {

namespace {

// Pointwise maximum of sqrt(a^2 + b^2).
double max_magnitude(const RealField& a, const RealField& b) {
    return (a * a + b * b).sqrt().maxCoeff();
}

} // namespace

TorusTendency rhs_torus(const TorusState& state, const TorusRhsTerms& terms,
                        TorusRhsInfo* info) {
    const TorusGrid& grid = state.n.grid;
    auto& fft = Fft2D::for_size(grid.n);

    const SpectralScalar c = poisson_solve_zero_mean(state.n);
    const RealField n_phys = fft.inverse(state.n.coef);
    const RealField dc1 = fft.inverse(spectral_derivative(c, 0).coef);
    const RealField dc2 = fft.inverse(spectral_derivative(c, 1).coef);
    const RealField u1 = fft.inverse(state.u.c1.coef);
    const RealField u2 = fft.inverse(state.u.c2.coef);

    if (info != nullptr) {
        info->max_u = max_magnitude(u1, u2);
        info->max_grad_c = max_magnitude(dc1, dc2);
    }

    TorusTendency out{zero_scalar(grid), zero_vector(grid)};

    // Chemotactic flux n grad c: divergence drives n, the same product
    // forces the flow.
    SpectralScalar flux1 = zero_scalar(grid);
    SpectralScalar flux2 = zero_scalar(grid);
    if (terms.chemotaxis) {
        flux1.coef = fft.forward(n_phys * dc1);
        flux2.coef = fft.forward(n_phys * dc2);
        out.dn.coef -= divergence(SpectralVector{flux1, flux2}).coef;
        out.du.c1.coef += flux1.coef;
        out.du.c2.coef += flux2.coef;
    }

    if (terms.advection) {
        const RealField dn1 = fft.inverse(spectral_derivative(state.n, 0).coef);
        const RealField dn2 = fft.inverse(spectral_derivative(state.n, 1).coef);
        out.dn.coef -= fft.forward(u1 * dn1 + u2 * dn2);

        const RealField d1u1 = fft.inverse(spectral_derivative(state.u.c1, 0).coef);
        const RealField d2u1 = fft.inverse(spectral_derivative(state.u.c1, 1).coef);
        const RealField d1u2 = fft.inverse(spectral_derivative(state.u.c2, 0).coef);
        const RealField d2u2 = fft.inverse(spectral_derivative(state.u.c2, 1).coef);
        out.du.c1.coef -= fft.forward(u1 * d1u1 + u2 * d2u1);
        out.du.c2.coef -= fft.forward(u1 * d1u2 + u2 * d2u2);
    }

    out.du = leray_project(out.du);

    dealias_inplace(out.dn);
    dealias_inplace(out.du.c1);
    dealias_inplace(out.du.c2);

    // The continuum tendencies are mean-free; pin the zero modes so mass
    // and mean velocity cannot drift through accumulated roundoff.
    out.dn.coef(0, 0) = 0.0;
    out.du.c1.coef(0, 0) = 0.0;
    out.du.c2.coef(0, 0) = 0.0;
    return out;
}

TorusState step_imex(const TorusState& state, double dt, const TorusRhsTerms& terms,
                     const TorusTendency* stage1) {
    const TorusGrid& grid = state.n.grid;
    const int n = grid.n;

    // Heat multipliers factorized per axis: E(k) = exp(-|k|^2 dt).
    Eigen::ArrayXd erow(n);
    for (int row = 0; row < n; ++row) {
        const double k = grid.wavenumber(grid.row_mode(row));
        erow[row] = std::exp(-k * k * dt);
    }
    Eigen::ArrayXd ecol(grid.cols());
    for (int col = 0; col < grid.cols(); ++col) {
        const double k = grid.wavenumber(col);
        ecol[col] = std::exp(-k * k * dt);
    }
    const auto damp = [&](const ComplexField& coef) {
        ComplexField out = coef;
        for (int row = 0; row < n; ++row) {
            for (int col = 0; col < grid.cols(); ++col) {
                out(row, col) *= erow[row] * ecol[col];
            }
        }
        return out;
    };

    const TorusTendency k1 = (stage1 != nullptr) ? *stage1 : rhs_torus(state, terms);

    TorusState pred;
    pred.t = state.t + dt;
    pred.n = SpectralScalar{grid, damp(state.n.coef + dt * k1.dn.coef)};
    pred.u.c1 = SpectralScalar{grid, damp(state.u.c1.coef + dt * k1.du.c1.coef)};
    pred.u.c2 = SpectralScalar{grid, damp(state.u.c2.coef + dt * k1.du.c2.coef)};

    const TorusTendency k2 = rhs_torus(pred, terms);

    TorusState out;
    out.t = state.t + dt;
    out.n = SpectralScalar{grid,
                           damp(state.n.coef + (0.5 * dt) * k1.dn.coef) +
                               (0.5 * dt) * k2.dn.coef};
    out.u.c1 = SpectralScalar{grid,
                              damp(state.u.c1.coef + (0.5 * dt) * k1.du.c1.coef) +
                                  (0.5 * dt) * k2.du.c1.coef};
    out.u.c2 = SpectralScalar{grid,
                              damp(state.u.c2.coef + (0.5 * dt) * k1.du.c2.coef) +
                                  (0.5 * dt) * k2.du.c2.coef};

    const RealField n_phys = to_physical(out.n);
    const double linf = n_phys.abs().maxCoeff();
    const double nmin = n_phys.minCoeff();
    if (nmin < -1e-6 * linf) {
        throw PositivityLoss("density undershoot at t=" + std::to_string(out.t), nmin, linf);
    }
    return out;
}

DtChoice adaptive_dt_from_info(const TorusRhsInfo& info, double h, const StepControl& control) {
    const double speed = info.max_u + info.max_grad_c + 1e-30;
    DtChoice choice;
    choice.dt = std::min(control.dt_max, control.cfl * h / speed);
    choice.blowup_suspected = choice.dt < control.dt_min;
    return choice;
}

DtChoice adaptive_dt(const TorusState& state, const StepControl& control) {
    auto& fft = Fft2D::for_size(state.n.grid.n);
    const SpectralScalar c = poisson_solve_zero_mean(state.n);
    TorusRhsInfo info;
    info.max_u = max_magnitude(fft.inverse(state.u.c1.coef), fft.inverse(state.u.c2.coef));
    info.max_grad_c = max_magnitude(fft.inverse(spectral_derivative(c, 0).coef),
                                    fft.inverse(spectral_derivative(c, 1).coef));
    return adaptive_dt_from_info(info, state.n.grid.h(), control);
}

} // namespace pkns
