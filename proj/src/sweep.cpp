#include "pkns/sweep.hpp"

#include "pkns/errors.hpp"
#include "pkns/io.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <thread>

namespace pkns {

namespace {

RunConfig config_for_value(const RunConfig& base, const std::string& param, double value,
                           const std::string& subdir) {
    RunConfig config = base;
    apply_param(config, param, value);
    config.out_dir =
        base.out_dir.empty() ? std::string{} : (std::filesystem::path(base.out_dir) / subdir).string();
    return config;
}

SweepRow row_from(double value, const RunResult& result) {
    SweepRow row;
    row.value = value;
    row.status = result.status;
    row.blowup = result.status != RunStatus::Completed;
    row.t_stop = result.t_stop;
    row.steps = result.steps;
    row.final_linf = result.records.empty() ? 0.0 : result.records.back().Linf_n;
    row.t_star = result.t_star;
    return row;
}

} // namespace

SweepResult run_sweep(const RunConfig& base, const std::string& param,
                      const std::vector<double>& values, int threads) {
    if (values.empty())
        throw ConfigError("sweep needs at least one value");
    {
        RunConfig probe = base;
        apply_param(probe, param, values.front()); // validates the name up front
    }

    SweepResult sweep;
    sweep.param = param;
    sweep.rows.resize(values.size());

    std::atomic<std::size_t> cursor{0};
    std::vector<std::exception_ptr> errors(values.size());

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= values.size())
                return;
            try {
                const RunConfig config =
                    config_for_value(base, param, values[i], param + "=" + format_double(values[i]));
                sweep.rows[i] = row_from(values[i], run_and_write(config));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const int pool = std::max(1, std::min<int>(threads, static_cast<int>(values.size())));
    if (pool == 1) {
        worker();
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(pool));
        for (int i = 0; i < pool; ++i)
            workers.emplace_back(worker);
        for (auto& w : workers)
            w.join();
    }
    for (const auto& err : errors)
        if (err)
            std::rethrow_exception(err);

    if (!base.out_dir.empty()) {
        std::filesystem::create_directories(base.out_dir);
        write_text_file((std::filesystem::path(base.out_dir) / "sweep.csv").string(),
                        sweep_csv(sweep));
    }
    return sweep;
}

std::string sweep_csv(const SweepResult& sweep) {
    std::string out = "param,value,status,blowup,t_stop,steps,final_Linf_n,t_star\n";
    for (const auto& row : sweep.rows) {
        out += sweep.param;
        out += ',';
        out += format_double(row.value);
        out += ',';
        out += run_status_name(row.status);
        out += ',';
        out += row.blowup ? '1' : '0';
        out += ',';
        out += format_double(row.t_stop);
        out += ',';
        out += std::to_string(row.steps);
        out += ',';
        out += format_double(row.final_linf);
        out += ',';
        out += row.t_star ? format_double(*row.t_star) : "";
        out += '\n';
    }
    return out;
}

BisectResult run_bisect(const RunConfig& base, const std::string& param, double lo, double hi,
                        double tol) {
    if (!(lo < hi))
        throw ConfigError("bisect needs lo < hi");
    if (!(tol > 0.0))
        throw ConfigError("bisect needs a positive tolerance");
    {
        RunConfig probe = base;
        apply_param(probe, param, lo);
    }

    BisectResult result;
    result.param = param;
    result.lo = lo;
    result.hi = hi;

    int guard = 0;
    while (result.hi - result.lo > tol && guard++ < 200) {
        const double mid = 0.5 * (result.lo + result.hi);
        const RunConfig config =
            config_for_value(base, param, mid, param + "=" + format_double(mid));
        const RunResult run = run_and_write(config);
        const bool blowup = run.status != RunStatus::Completed;
        result.iterations.push_back({mid, blowup});
        (blowup ? result.hi : result.lo) = mid;
    }

    if (!base.out_dir.empty()) {
        std::filesystem::create_directories(base.out_dir);
        write_text_file((std::filesystem::path(base.out_dir) / "bisect.csv").string(),
                        bisect_csv(result));
    }
    return result;
}

std::string bisect_csv(const BisectResult& result) {
    std::string out = "param,value,blowup\n";
    for (const auto& it : result.iterations) {
        out += result.param;
        out += ',';
        out += format_double(it.value);
        out += ',';
        out += it.blowup ? '1' : '0';
        out += '\n';
    }
    return out;
}

} // namespace pkns
