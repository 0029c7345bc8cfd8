#include "pkns/checks.hpp"

#include "pkns/diagnostics.hpp"
#include "pkns/driver.hpp"
#include "pkns/errors.hpp"
#include "pkns/io.hpp"
#include "pkns/selfsim.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace pkns {

namespace {

RealField random_field(const TorusGrid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    RealField f(grid.n, grid.n);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j)
            f(i, j) = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
    return f;
}

double rel_l2_diff(const SpectralScalar& a, const SpectralScalar& b) {
    SpectralScalar d = a;
    d.coef -= b.coef;
    return l2_norm(d) / std::max(1e-300, l2_norm(b));
}

RunConfig small_radial_config() {
    RunConfig config;
    config.mode = "radial";
    config.r_max = 16.0;
    config.n_r = 512;
    config.t_end = 0.2;
    config.ic.kind = "gaussian";
    config.ic.mass = 4.0 * M_PI;
    config.ic.width = 1.0;
    return config;
}

} // namespace

CheckItem make_check(std::string name, double measured, double threshold) {
    CheckItem item;
    item.name = std::move(name);
    item.measured = measured;
    item.threshold = threshold;
    item.pass = measured <= threshold;
    return item;
}

std::vector<CheckItem> check_spectral() {
    std::vector<CheckItem> items;
    const TorusGrid grid = make_torus_grid(64);

    RealField f = random_field(grid, 11);
    const SpectralScalar fs = to_spectral(grid, f);
    const double grid_sq = (f * f).mean();
    const double coef_sq = l2_norm(fs) * l2_norm(fs);
    items.push_back(make_check("spectral.parseval",
                               std::abs(grid_sq - coef_sq) / grid_sq, 1e-12));

    SpectralScalar zero_mean = fs;
    zero_mean.coef(0, 0) = 0.0;
    const SpectralScalar c = poisson_solve_zero_mean(zero_mean);
    SpectralScalar lap = spectral_derivative(spectral_derivative(c, 0), 0);
    lap.coef += spectral_derivative(spectral_derivative(c, 1), 1).coef;
    lap.coef += zero_mean.coef;
    // The Nyquist rows drop out of the double derivative; exclude them
    // from the residual like the solver's band limit does.
    dealias_inplace(lap);
    SpectralScalar band = zero_mean;
    dealias_inplace(band);
    items.push_back(
        make_check("spectral.poisson_residual", l2_norm(lap) / l2_norm(band), 1e-12));

    SpectralVector u{to_spectral(grid, random_field(grid, 12)),
                     to_spectral(grid, random_field(grid, 13))};
    const SpectralVector pu = leray_project(u);
    const SpectralVector ppu = leray_project(pu);
    SpectralScalar du = divergence(pu);
    items.push_back(make_check("spectral.leray_divergence",
                               l2_norm(du) / l2_norm(u.c1), 1e-12));
    items.push_back(make_check("spectral.leray_idempotent",
                               rel_l2_diff(ppu.c1, pu.c1) + rel_l2_diff(ppu.c2, pu.c2), 1e-13));

    SpectralScalar omega = to_spectral(grid, random_field(grid, 14));
    omega.coef(0, 0) = 0.0;
    dealias_inplace(omega); // the round trip only holds inside the band
    const SpectralVector vel = biot_savart(omega);
    items.push_back(
        make_check("spectral.biot_savart_curl", rel_l2_diff(curl(vel), omega), 1e-12));
    items.push_back(make_check("spectral.biot_savart_divergence",
                               l2_norm(divergence(vel)) / l2_norm(omega), 1e-12));

    RealField sine(grid.n, grid.n);
    RealField cosine(grid.n, grid.n);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j) {
            sine(i, j) = std::sin(2.0 * M_PI * i * grid.h());
            cosine(i, j) = 2.0 * M_PI * std::cos(2.0 * M_PI * i * grid.h());
        }
    const RealField d = to_physical(spectral_derivative(to_spectral(grid, sine), 0));
    items.push_back(make_check("spectral.derivative_single_mode",
                               (d - cosine).abs().maxCoeff() / (2.0 * M_PI), 1e-13));
    return items;
}

std::vector<CheckItem> check_torus() {
    std::vector<CheckItem> items;

    RunConfig config;
    config.mode = "torus";
    config.n_points = 64;
    config.t_end = 0.05;
    config.dt_max = 1e-3;
    config.ic.kind = "random";
    config.ic.mass = 4.0 * M_PI;
    config.ic.amplitude = 0.3;
    config.ic.seed = 7;

    const RunResult run = run_simulation(config);
    const auto& first = run.records.front();
    const auto& last = run.records.back();
    items.push_back(make_check("torus.mass_conserved", std::abs(last.mass - first.mass), 0.0));
    items.push_back(make_check("torus.mean_velocity_conserved",
                               std::abs(last.mean_u1) + std::abs(last.mean_u2), 0.0));

    const RunResult rerun = run_simulation(config);
    items.push_back(make_check(
        "torus.determinism",
        diagnostics_csv(run.records) == diagnostics_csv(rerun.records) ? 0.0 : 1.0, 0.0));

    const TorusGrid grid = make_torus_grid(32);
    TorusState flat{0.0, zero_scalar(grid), zero_vector(grid)};
    flat.n.coef(0, 0) = 2.5;
    TorusState walked = flat;
    for (int i = 0; i < 100; ++i)
        walked = step_imex(walked, 1e-3);
    walked.n.coef -= flat.n.coef;
    items.push_back(
        make_check("torus.homogeneous_fixed_point",
                   walked.n.coef.abs().maxCoeff() + l2_norm(walked.u), 0.0));

    TorusState heat{0.0, zero_scalar(grid), zero_vector(grid)};
    heat.n.coef(0, 0) = 1.0;
    set_mode(heat.n, 1, 0, {0.05, 0.0});
    const TorusRhsTerms off{false, false};
    const double dt = 1e-3;
    const TorusState cooled = step_imex(heat, dt, off);
    const double expected = 0.05 * std::exp(-4.0 * M_PI * M_PI * dt);
    items.push_back(make_check(
        "torus.heat_mode_decay_exact",
        std::abs(mode(cooled.n, 1, 0).real() - expected) / expected, 1e-14));
    return items;
}

std::vector<CheckItem> check_radial() {
    std::vector<CheckItem> items;

    const RadialGrid grid = make_radial_grid(4.0, 512);
    Eigen::ArrayXd disk(grid.n_r);
    for (int j = 0; j < grid.n_r; ++j)
        disk[j] = grid.r_center(j) < 1.0 ? 1.0 : 0.0;
    const Eigen::ArrayXd faces = cumulative_mass(disk, grid);
    const Eigen::ArrayXd dcdr = chemical_gradient_radial(faces, grid);
    double err = 0.0;
    for (int j = 0; j < grid.n_r; ++j) {
        const double r = grid.r_center(j);
        const double exact = r < 1.0 ? -0.5 * r : -0.5 / r;
        if (std::abs(r - 1.0) < 2.0 * grid.h())
            continue; // the jump cell carries the O(h) interface error
        err = std::max(err, std::abs(dcdr[j] - exact));
    }
    items.push_back(make_check("radial.disk_chemical_gradient", err, 1e-4));

    const double v_disk = second_moment_radial(disk, grid);
    items.push_back(make_check("radial.disk_second_moment",
                               std::abs(v_disk - M_PI / 2.0) / (M_PI / 2.0), 1e-4));

    const RunConfig config = small_radial_config();
    const RunResult run = run_simulation(config);
    items.push_back(make_check(
        "radial.mass_conserved",
        std::abs(run.records.back().mass - run.records.front().mass) / run.records.front().mass,
        1e-12));
    items.push_back(make_check(
        "radial.second_moment_slope",
        std::abs(*run.second_moment_slope - 8.0 * M_PI) / (8.0 * M_PI), 5e-3));

    const auto t_star = blowup_time_estimate(16.0 * M_PI, 1.0);
    items.push_back(make_check(
        "radial.concentration_bound",
        std::abs(*t_star - 1.0 / (64.0 * M_PI)) / (1.0 / (64.0 * M_PI)), 1e-14));
    items.push_back(make_check("radial.concentration_bound_subcritical",
                               blowup_time_estimate(4.0 * M_PI, 1.0) ? 1.0 : 0.0, 0.0));

    const RunResult rerun = run_simulation(config);
    items.push_back(make_check(
        "radial.determinism",
        diagnostics_csv(run.records) == diagnostics_csv(rerun.records) ? 0.0 : 1.0, 0.0));
    return items;
}

std::vector<CheckItem> check_selfsim() {
    std::vector<CheckItem> items;

    items.push_back(make_check("selfsim.tau_of_t",
                               std::abs(tau_of_t(1.5) - std::log(2.0)), 1e-15));
    items.push_back(make_check("selfsim.tau_round_trip",
                               std::abs(t_of_tau(tau_of_t(7.25)) - 7.25), 1e-13));

    const RadialGrid r_grid = make_radial_grid(12.0, 512);
    RadialState phys{1.5, r_grid, Eigen::ArrayXd(r_grid.n_r), Eigen::ArrayXd(r_grid.n_r)};
    for (int j = 0; j < r_grid.n_r; ++j) {
        const double r = r_grid.r_center(j);
        phys.n[j] = std::exp(-r * r / 2.0);
        phys.omega[j] = 0.5 * std::exp(-r * r / 2.0);
    }
    const RadialGrid x_grid = make_selfsim_grid(6.0, 512);
    const SelfSimState ss = to_selfsim(phys, x_grid);
    items.push_back(make_check(
        "selfsim.mass_preserved",
        std::abs(total_mass(ss.N, x_grid) - total_mass(phys.n, r_grid)) /
            total_mass(phys.n, r_grid),
        1e-12));
    const RadialState back = from_selfsim(ss, r_grid);
    items.push_back(make_check(
        "selfsim.round_trip",
        (back.n - phys.n).abs().sum() / phys.n.abs().sum(), 1e-3));

    RunConfig config;
    config.mode = "selfsim";
    config.r_max = 8.0;
    config.n_r = 256;
    config.t_end = 4.0;
    config.ic.kind = "gaussian";
    config.ic.mass = 4.0 * M_PI;
    config.ic.width = 0.8;
    config.ic.amplitude = 0.5;
    const RunResult run = run_simulation(config);
    items.push_back(make_check("selfsim.second_moment_relaxes",
                               std::abs(run.records.back().V - 4.0 * M_PI), 0.05));
    items.push_back(make_check(
        "selfsim.mass_conserved",
        std::abs(run.records.back().mass - run.records.front().mass) / run.records.front().mass,
        1e-12));

    const SelfSimState final_state = selfsim_from_checkpoint(run.final_state);
    items.push_back(make_check("selfsim.flow_dissipation_nonnegative",
                               std::max(0.0, -dissipation_selfsim(final_state).d_u), 1e-12));
    return items;
}

std::vector<CheckItem> check_diagnostics() {
    std::vector<CheckItem> items;

    const GammaParams params = make_gamma_params(1.0, 2.0); // eta = 1/2
    items.push_back(make_check("diagnostics.gamma_value",
                               std::abs(gamma_fn(0.25, params) - (-1.3181471805599453)), 1e-15));
    double splice = 0.0, floor_err = 0.0;
    std::mt19937_64 rng(21);
    for (int i = 0; i < 200; ++i) {
        const double eta = 1e-3 + ((rng() >> 11) * 0x1.0p-53);
        GammaParams p{0.0, 0.0, 0.0};
        p.eta = eta;
        splice = std::max(splice, std::abs(gamma_fn(eta, p) - std::log(eta)));
        splice = std::max(splice, eta * std::abs(gamma_fn_d1(eta, p) - 1.0 / eta));
        splice =
            std::max(splice, eta * eta * std::abs(gamma_fn_d2(eta, p) - (-1.0 / (eta * eta))));
        floor_err = std::max(floor_err, std::abs(gamma_fn(0.0, p) - (std::log(eta) - 1.5)));
    }
    items.push_back(make_check("diagnostics.gamma_splice_continuity", splice, 1e-15));
    items.push_back(make_check("diagnostics.gamma_floor", floor_err, 1e-15));

    const TorusGrid grid = make_torus_grid(32);
    SpectralScalar uniform = zero_scalar(grid);
    uniform.coef(0, 0) = 1.0 / std::exp(1.0);
    const EntropySplit split = entropy_split_torus(uniform);
    items.push_back(make_check("diagnostics.entropy_split_uniform",
                               std::abs(split.S + 1.0 / std::exp(1.0)) + std::abs(split.S_plus) +
                                   std::abs(split.S_minus - 1.0 / std::exp(1.0)),
                               1e-13));

    RunConfig shear;
    shear.mode = "torus";
    shear.n_points = 64;
    shear.ic.kind = "shear";
    shear.ic.mass = 2.0;
    shear.ic.amplitude = 1.0;
    const TorusState state = build_torus_ic(shear);
    const double e_expected = 2.0 * std::log(2.0) + 0.25;
    items.push_back(make_check("diagnostics.shear_free_energy",
                               std::abs(free_energy_torus(state) - e_expected), 1e-13));
    const Dissipation diss = dissipation_torus(state);
    items.push_back(make_check(
        "diagnostics.shear_flow_dissipation",
        std::abs(diss.d_u - 2.0 * M_PI * M_PI) / (2.0 * M_PI * M_PI), 1e-13));
    items.push_back(make_check("diagnostics.shear_entropy_dissipation", diss.d_n, 1e-13));

    // Detailed balance: n proportional to e^c has zero entropy dissipation.
    const TorusGrid fine = make_torus_grid(64);
    RealField cphys(fine.n, fine.n);
    for (int i = 0; i < fine.n; ++i)
        for (int j = 0; j < fine.n; ++j)
            cphys(i, j) = 0.3 * std::sin(2.0 * M_PI * i * fine.h()) *
                          std::cos(2.0 * M_PI * j * fine.h());
    const RealField nphys = cphys.exp();
    const double d_balance =
        entropy_dissipation_torus(to_spectral(fine, nphys), to_spectral(fine, cphys));
    items.push_back(make_check("diagnostics.detailed_balance", d_balance, 1e-10));

    const RadialGrid rgrid = make_radial_grid(2.0, 1024);
    Eigen::ArrayXd disk(rgrid.n_r);
    for (int j = 0; j < rgrid.n_r; ++j)
        disk[j] = rgrid.r_center(j) < 1.0 ? 2.0 : 0.0;
    const double mass = 2.0 * M_PI;
    const double expected = mass * std::log(mass / M_PI) - mass / 2.0;
    items.push_back(make_check("diagnostics.log_interaction_disk",
                               std::abs(loghls_functional(disk, rgrid) - expected) /
                                   std::abs(expected),
                               1e-3));

    Eigen::ArrayXd vacuum = Eigen::ArrayXd::Zero(rgrid.n_r);
    const SMinusBound bound = s_minus_bound_check(vacuum, rgrid);
    items.push_back(make_check("diagnostics.entropy_defect_bound_vacuum",
                               std::abs(bound.lhs) +
                                   std::abs(bound.rhs - 1.0 / std::exp(1.0)),
                               1e-15));
    return items;
}

std::vector<CheckItem> check_suite(const std::string& name) {
    if (name == "spectral")
        return check_spectral();
    if (name == "torus")
        return check_torus();
    if (name == "radial")
        return check_radial();
    if (name == "selfsim")
        return check_selfsim();
    if (name == "diagnostics")
        return check_diagnostics();
    if (name == "all") {
        std::vector<CheckItem> all;
        for (const char* suite : {"spectral", "torus", "radial", "selfsim", "diagnostics"}) {
            auto items = check_suite(suite);
            all.insert(all.end(), items.begin(), items.end());
        }
        return all;
    }
    throw ConfigError("unknown check suite '" + name +
                      "' (expected spectral, torus, radial, selfsim, diagnostics or all)");
}

int report_checks(const std::vector<CheckItem>& items, std::ostream& out) {
    int failures = 0;
    for (const auto& item : items) {
        out << (item.pass ? "[PASS] " : "[FAIL] ") << item.name
            << " measured=" << format_double(item.measured)
            << " threshold=" << format_double(item.threshold) << "\n";
        if (!item.pass)
            ++failures;
    }
    out << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
        << " (" << items.size() << " total)\n";
    return failures;
}

} // namespace pkns
