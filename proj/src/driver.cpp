#include "pkns/driver.hpp"

#include "pkns/errors.hpp"
#include "pkns/io.hpp"
#include "pkns/numerics.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <optional>
#include <random>

namespace pkns {

namespace {

constexpr double kBlowupGrowthFactor = 1e6;

using ordered_json = nlohmann::ordered_json;

double uniform_pm1(std::mt19937_64& rng) {
    return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

// Remaining time left before the horizon, clamped so roundoff near the
// end cannot produce a stray zero-length step.
bool reached_horizon(double t, double t_end) {
    return t >= t_end - 1e-12 * std::max(1.0, std::abs(t_end));
}

Eigen::ArrayXd radial_profile(const RadialGrid& grid, double width) {
    Eigen::ArrayXd out(grid.n_r);
    const double inv = 1.0 / (2.0 * width * width);
    for (int j = 0; j < grid.n_r; ++j) {
        const double r = grid.r_center(j);
        out[j] = std::exp(-r * r * inv);
    }
    return out;
}

StepControl control_from(const RunConfig& config) {
    return StepControl{config.cfl, config.dt_max, config.dt_min};
}

void fit_plane_quantities(RunResult& res) {
    const auto& recs = res.records;
    if (!recs.empty())
        res.final_V = recs.back().V;
    if (recs.size() < 2)
        return;
    Eigen::ArrayXd x(recs.size()), y(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        x[static_cast<Eigen::Index>(i)] = recs[i].t;
        y[static_cast<Eigen::Index>(i)] = recs[i].V;
    }
    res.second_moment_slope = least_squares_slope(x, y);
}

// Physical-variable decay exponent from the rescaled records: with
// R^2 = 1 + 2t = e^{2 tau}, |n|_2^2 + |w|_2^2 = (|N|_2^2 + |W|_2^2) e^{-2 tau},
// fitted against log(1 + 2t) over t in [10, 100].
void fit_decay_slope(RunResult& res) {
    std::vector<double> xs, ys;
    for (const auto& rec : res.records) {
        const double t = t_of_tau(rec.t);
        if (t < 10.0 || t > 100.0)
            continue;
        const double sq = rec.L2_n * rec.L2_n + rec.L2_omega * rec.L2_omega;
        if (!(sq > 0.0))
            continue;
        xs.push_back(2.0 * rec.t);
        ys.push_back(std::log(sq) - 2.0 * rec.t);
    }
    if (xs.size() < 2)
        return;
    Eigen::Map<Eigen::ArrayXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
    Eigen::Map<Eigen::ArrayXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
    res.decay_slope = least_squares_slope(x, y);
}

RunResult run_torus_loop(TorusState state, const RunConfig& config) {
    RunResult res;
    res.mode = "torus";
    const StepControl control = control_from(config);
    const TorusRhsTerms terms;

    res.records.push_back(diagnose_torus(state, 0.0));
    const double linf_ref = std::max(res.records.front().Linf_n, 1e-300);
    double last_dt = 0.0;

    while (!reached_horizon(state.t, config.t_end)) {
        TorusRhsInfo info;
        const TorusTendency stage1 = rhs_torus(state, terms, &info);
        DtChoice choice = adaptive_dt_from_info(info, state.n.grid.h(), control);
        if (choice.blowup_suspected) {
            res.status = RunStatus::BlowupSuspected;
            res.message = "advective time step fell below dt_min";
            break;
        }
        double dt = std::min(choice.dt, config.t_end - state.t);

        std::optional<TorusState> next;
        while (!next) {
            try {
                next = step_imex(state, dt, terms, &stage1);
            } catch (const PositivityLoss&) {
                ++res.rejected_steps;
                dt *= 0.5;
                if (dt < control.dt_min)
                    break;
            }
        }
        if (!next) {
            res.status = RunStatus::BlowupSuspected;
            res.message = "positivity rejections drove the step below dt_min";
            break;
        }

        state = std::move(*next);
        ++res.steps;
        last_dt = dt;

        if (!state.n.coef.abs2().allFinite() || !state.u.c1.coef.abs2().allFinite() ||
            !state.u.c2.coef.abs2().allFinite()) {
            res.status = RunStatus::NumericalFailure;
            res.message = "non-finite field values";
            break;
        }
        if (res.steps % config.diag_every == 0 || reached_horizon(state.t, config.t_end)) {
            res.records.push_back(diagnose_torus(state, dt));
            if (res.records.back().Linf_n > kBlowupGrowthFactor * linf_ref) {
                res.status = RunStatus::BlowupSuspected;
                res.message = "density grew past 1e6 times its initial peak";
                break;
            }
        }
    }

    if (res.records.back().t != state.t)
        res.records.push_back(diagnose_torus(state, last_dt));
    res.t_stop = state.t;
    fill_energy_residuals(res.records);
    res.final_state = make_checkpoint(state);
    return res;
}

RunResult run_radial_loop(RadialState state, const RunConfig& config) {
    RunResult res;
    res.mode = "radial";
    const StepControl control = control_from(config);
    const RadialRhsTerms terms;
    const GammaParams gamma = make_gamma_params(config.delta, total_mass(state.n, state.grid));

    res.t_star = blowup_time_estimate(total_mass(state.n, state.grid),
                                      second_moment_radial(state.n, state.grid));

    auto record = [&](double dt) {
        res.records.push_back(diagnose_radial(state, dt, gamma));
        if (!radial_boundary_guard(state.n, state.grid))
            ++res.truncated_records;
    };

    record(0.0);
    const double linf_ref = std::max(res.records.front().Linf_n, 1e-300);
    double last_dt = 0.0;

    while (!reached_horizon(state.t, config.t_end)) {
        DtChoice choice = adaptive_dt_radial(state, control);
        if (choice.blowup_suspected) {
            res.status = RunStatus::BlowupSuspected;
            res.message = "flux time step fell below dt_min";
            break;
        }
        double dt = std::min(choice.dt, config.t_end - state.t);

        std::optional<RadialState> next;
        while (!next) {
            try {
                next = step_radial(state, dt, terms);
            } catch (const PositivityLoss&) {
                ++res.rejected_steps;
                dt *= 0.5;
                if (dt < control.dt_min)
                    break;
            }
        }
        if (!next) {
            res.status = RunStatus::BlowupSuspected;
            res.message = "positivity rejections drove the step below dt_min";
            break;
        }

        state = std::move(*next);
        ++res.steps;
        last_dt = dt;

        if (!state.n.allFinite() || !state.omega.allFinite()) {
            res.status = RunStatus::NumericalFailure;
            res.message = "non-finite field values";
            break;
        }
        if (state.n.maxCoeff() > kBlowupGrowthFactor * linf_ref) {
            res.status = RunStatus::BlowupSuspected;
            res.message = "density grew past 1e6 times its initial peak";
            record(dt);
            break;
        }
        if (res.steps % config.diag_every == 0 || reached_horizon(state.t, config.t_end))
            record(dt);
    }

    if (res.records.back().t != state.t)
        record(last_dt);
    res.t_stop = state.t;
    fill_energy_residuals(res.records);
    fit_plane_quantities(res);
    res.final_state = make_checkpoint(state);
    return res;
}

RunResult run_selfsim_loop(SelfSimState state, const RunConfig& config) {
    RunResult res;
    res.mode = "selfsim";
    const StepControl control = control_from(config);
    const SelfSimRhsTerms terms;

    auto record = [&](double dt) {
        res.records.push_back(diagnose_selfsim(state, dt));
        if (!radial_boundary_guard(state.N, state.grid))
            ++res.truncated_records;
    };

    record(0.0);
    const double linf_ref = std::max(res.records.front().Linf_n, 1e-300);
    double last_dt = 0.0;

    while (!reached_horizon(state.tau, config.t_end)) {
        DtChoice choice = adaptive_dt_selfsim(state, control);
        if (choice.blowup_suspected) {
            res.status = RunStatus::BlowupSuspected;
            res.message = "flux time step fell below dt_min";
            break;
        }
        double dt = std::min(choice.dt, config.t_end - state.tau);

        std::optional<SelfSimState> next;
        while (!next) {
            try {
                next = step_selfsim(state, dt, terms);
            } catch (const PositivityLoss&) {
                ++res.rejected_steps;
                dt *= 0.5;
                if (dt < control.dt_min)
                    break;
            }
        }
        if (!next) {
            res.status = RunStatus::BlowupSuspected;
            res.message = "positivity rejections drove the step below dt_min";
            break;
        }

        state = std::move(*next);
        ++res.steps;
        last_dt = dt;

        if (!state.N.allFinite() || !state.Omega.allFinite()) {
            res.status = RunStatus::NumericalFailure;
            res.message = "non-finite field values";
            break;
        }
        if (state.N.maxCoeff() > kBlowupGrowthFactor * linf_ref) {
            res.status = RunStatus::BlowupSuspected;
            res.message = "density grew past 1e6 times its initial peak";
            record(dt);
            break;
        }
        if (res.steps % config.diag_every == 0 || reached_horizon(state.tau, config.t_end))
            record(dt);
    }

    if (res.records.back().t != state.tau)
        record(last_dt);
    res.t_stop = state.tau;
    fill_energy_residuals(res.records);
    fit_plane_quantities(res);
    fit_decay_slope(res);
    res.final_state = make_checkpoint(state);
    return res;
}

void require_grid_match(const Checkpoint& cp, const RunConfig& config) {
    if (cp.mode == kModeTorus) {
        if (config.n_points > 0 && cp.dims[0] != static_cast<std::uint64_t>(config.n_points))
            throw FormatError("checkpoint grid " + std::to_string(cp.dims[0]) +
                              " does not match configured " + std::to_string(config.n_points));
        return;
    }
    if (config.n_r > 0 && cp.dims[0] != static_cast<std::uint64_t>(config.n_r))
        throw FormatError("checkpoint grid " + std::to_string(cp.dims[0]) +
                          " does not match configured " + std::to_string(config.n_r));
    if (config.r_max > 0.0 &&
        std::abs(cp.r_max - config.r_max) > 1e-12 * std::max(1.0, config.r_max))
        throw FormatError("checkpoint r_max " + format_double(cp.r_max) +
                          " does not match configured " + format_double(config.r_max));
}

} // namespace

const char* run_status_name(RunStatus status) {
    switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::BlowupSuspected: return "blowup_suspected";
    case RunStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

int exit_code_for(RunStatus status) {
    switch (status) {
    case RunStatus::Completed: return 0;
    case RunStatus::BlowupSuspected: return 4;
    case RunStatus::NumericalFailure: return 3;
    }
    return 3;
}

TorusState build_torus_ic(const RunConfig& config) {
    const TorusGrid grid = make_torus_grid(config.n_points);
    TorusState state{0.0, zero_scalar(grid), zero_vector(grid)};
    const IcConfig& ic = config.ic;

    if (ic.kind == "gaussian") {
        // Periodized Gaussian of total mass M centered at (1/2, 1/2);
        // its coefficients are M (-1)^(m1+m2) exp(-width^2 |k|^2 / 2),
        // real and symmetric, so the half-spectrum can be filled directly.
        const double s2 = ic.width * ic.width;
        for (int row = 0; row < grid.n; ++row) {
            const int m1 = grid.row_mode(row);
            const double k1 = grid.wavenumber(m1);
            for (int col = 0; col < grid.cols(); ++col) {
                const double k2 = grid.wavenumber(col);
                const double sign = ((m1 + col) % 2 == 0) ? 1.0 : -1.0;
                state.n.coef(row, col) = ic.mass * sign * std::exp(-0.5 * s2 * (k1 * k1 + k2 * k2));
            }
        }
    } else if (ic.kind == "random") {
        std::mt19937_64 rng(ic.seed);
        SpectralScalar noise = zero_scalar(grid);
        const int band = std::min(ic.modes, grid.n / 3);
        for (int m1 = -band; m1 <= band; ++m1) {
            for (int m2 = 0; m2 <= band; ++m2) {
                if (m2 == 0 && m1 <= 0)
                    continue;
                const std::complex<double> z(uniform_pm1(rng), uniform_pm1(rng));
                set_mode(noise, m1, m2, z);
            }
        }
        RealField xi = to_physical(noise);
        const double peak = xi.abs().maxCoeff();
        if (peak > 0.0)
            xi /= peak;
        RealField n_phys = ic.mass * (1.0 + ic.amplitude * xi);
        state.n = to_spectral(grid, n_phys);
        state.n.coef(0, 0) = ic.mass;
    } else if (ic.kind == "shear") {
        state.n.coef(0, 0) = ic.mass;
        // u1 = amplitude sin(2 pi x2): single conjugate pair at m2 = +-1.
        set_mode(state.u.c1, 0, 1, std::complex<double>(0.0, -0.5 * ic.amplitude));
    } else if (ic.kind == "file") {
        TorusState loaded = torus_from_checkpoint(read_checkpoint_file(ic.file));
        if (loaded.n.grid.n != grid.n)
            throw FormatError("checkpoint grid " + std::to_string(loaded.n.grid.n) +
                              " does not match configured " + std::to_string(grid.n));
        loaded.t = 0.0;
        return loaded;
    } else {
        throw ConfigError("unsupported torus ic kind '" + ic.kind + "'");
    }
    return state;
}

RadialState build_radial_ic(const RunConfig& config) {
    const RadialGrid grid = make_radial_grid(config.r_max, config.n_r);
    const IcConfig& ic = config.ic;

    if (ic.kind == "gaussian") {
        RadialState state{0.0, grid, radial_profile(grid, ic.width),
                          ic.amplitude * radial_profile(grid, ic.width)};
        const double m = total_mass(state.n, grid);
        if (m > 0.0 && ic.mass > 0.0)
            state.n *= ic.mass / m;
        else
            state.n.setZero();
        return state;
    }
    if (ic.kind == "file") {
        RadialState loaded = radial_from_checkpoint(read_checkpoint_file(ic.file));
        if (!(loaded.grid == grid))
            throw FormatError("checkpoint grid does not match the configured radial grid");
        loaded.t = 0.0;
        return loaded;
    }
    throw ConfigError("unsupported radial ic kind '" + ic.kind + "'");
}

SelfSimState build_selfsim_ic(const RunConfig& config) {
    const RadialGrid grid = make_selfsim_grid(config.r_max, config.n_r);
    const IcConfig& ic = config.ic;

    if (ic.kind == "gaussian") {
        SelfSimState state{0.0, grid, radial_profile(grid, ic.width),
                           ic.amplitude * radial_profile(grid, ic.width)};
        const double m = total_mass(state.N, grid);
        if (m > 0.0 && ic.mass > 0.0)
            state.N *= ic.mass / m;
        else
            state.N.setZero();
        return state;
    }
    if (ic.kind == "file") {
        SelfSimState loaded = selfsim_from_checkpoint(read_checkpoint_file(ic.file));
        if (!(loaded.grid == grid))
            throw FormatError("checkpoint grid does not match the configured selfsim grid");
        loaded.tau = 0.0;
        return loaded;
    }
    throw ConfigError("unsupported selfsim ic kind '" + ic.kind + "'");
}

RunResult run_simulation(const RunConfig& config) {
    if (config.mode == "torus")
        return run_torus_loop(build_torus_ic(config), config);
    if (config.mode == "radial")
        return run_radial_loop(build_radial_ic(config), config);
    if (config.mode == "selfsim")
        return run_selfsim_loop(build_selfsim_ic(config), config);
    throw ConfigError("unknown mode '" + config.mode + "'");
}

RunResult run_and_write(const RunConfig& config) {
    RunResult res = run_simulation(config);
    write_artifacts(config, res);
    return res;
}

RunResult resume_simulation(const std::string& checkpoint_path, const RunConfig& config) {
    const Checkpoint cp = read_checkpoint_file(checkpoint_path);
    require_grid_match(cp, config);
    if (!config.mode.empty()) {
        const std::uint8_t want = config.mode == "torus"    ? kModeTorus
                                  : config.mode == "radial" ? kModeRadial
                                                            : kModeSelfSim;
        if (cp.mode != want)
            throw FormatError("checkpoint mode does not match configured mode '" + config.mode +
                              "'");
    }
    if (cp.mode == kModeTorus)
        return run_torus_loop(torus_from_checkpoint(cp), config);
    if (cp.mode == kModeRadial)
        return run_radial_loop(radial_from_checkpoint(cp), config);
    return run_selfsim_loop(selfsim_from_checkpoint(cp), config);
}

std::string summary_json(const RunConfig& config, const RunResult& result) {
    ordered_json j;
    j["mode"] = result.mode;
    j["status"] = run_status_name(result.status);
    j["message"] = result.message;
    j["t_stop"] = result.t_stop;
    j["steps"] = result.steps;
    j["rejected_steps"] = result.rejected_steps;
    j["truncated_records"] = result.truncated_records;

    ordered_json grid;
    if (result.mode == "torus") {
        grid["n_points"] = config.n_points;
    } else {
        grid["r_max"] = config.r_max;
        grid["n_r"] = config.n_r;
    }
    j["grid"] = grid;

    ordered_json ic;
    ic["kind"] = config.ic.kind;
    ic["mass"] = config.ic.mass;
    ic["width"] = config.ic.width;
    ic["amplitude"] = config.ic.amplitude;
    if (config.ic.kind == "random")
        ic["modes"] = config.ic.modes;
    ic["seed"] = config.ic.seed;
    if (!config.ic.file.empty())
        ic["file"] = config.ic.file;
    j["ic"] = ic;

    if (!result.records.empty()) {
        const DiagnosticsRecord& last = result.records.back();
        ordered_json fin;
        fin["mass"] = last.mass;
        fin["L2_n"] = last.L2_n;
        fin["Linf_n"] = last.Linf_n;
        fin["L2_u"] = last.L2_u;
        fin["L2_omega"] = last.L2_omega;
        fin["E"] = last.E;
        j["final"] = fin;
    }
    if (result.t_star)
        j["t_star"] = *result.t_star;
    if (result.second_moment_slope)
        j["second_moment_slope"] = *result.second_moment_slope;
    if (result.decay_slope)
        j["decay_slope"] = *result.decay_slope;
    if (result.final_V)
        j["final_V"] = *result.final_V;
    j["threads"] = config.threads;
    return j.dump(2) + "\n";
}

void write_artifacts(const RunConfig& config, const RunResult& result) {
    if (config.out_dir.empty())
        return;
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir(config.out_dir);
    write_text_file((dir / "diagnostics.csv").string(), diagnostics_csv(result.records));
    write_text_file((dir / "summary.json").string(), summary_json(config, result));
    write_checkpoint_file((dir / "state.pkns").string(), result.final_state);
}

} // namespace pkns
