#include "pkns/cli.hpp"

#include "pkns/checks.hpp"
#include "pkns/driver.hpp"
#include "pkns/errors.hpp"
#include "pkns/io.hpp"
#include "pkns/sweep.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace pkns {

namespace {

std::vector<double> parse_value_list(const std::string& csv) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const std::size_t comma = csv.find(',', pos);
        const std::string token =
            csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (token.empty())
            throw ConfigError("empty entry in value list '" + csv + "'");
        values.push_back(parse_number(token));
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    return values;
}

int effective_threads(int flag_value, int config_value) {
    int threads = flag_value > 0 ? flag_value : config_value;
    if (const char* env = std::getenv("PKNS_THREADS")) {
        try {
            threads = std::stoi(env);
        } catch (const std::exception&) {
            throw ConfigError("PKNS_THREADS must be an integer, got '" + std::string(env) + "'");
        }
    }
    if (threads < 1)
        throw ConfigError("thread count must be at least 1");
    return threads;
}

void print_run_summary(const RunResult& result) {
    std::cout << "mode=" << result.mode << " status=" << run_status_name(result.status)
              << " t_stop=" << format_double(result.t_stop) << " steps=" << result.steps
              << " rejected=" << result.rejected_steps << " records=" << result.records.size();
    if (result.truncated_records > 0)
        std::cout << " truncated_records=" << result.truncated_records;
    if (!result.message.empty())
        std::cout << " (" << result.message << ")";
    std::cout << "\n";
}

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    int threads = 0;
    std::string param;
    std::string values;
    std::string bisect;
    double tol = 0.0;
    std::string suite = "all";
    std::string from;
    double t_end = 0.0;
    bool t_end_given = false;
};

int do_run(const CliOptions& opt) {
    RunConfig config = parse_config_file(opt.config_path);
    if (!opt.out_dir.empty())
        config.out_dir = opt.out_dir;
    config.threads = effective_threads(opt.threads, config.threads);
    const RunResult result = run_and_write(config);
    print_run_summary(result);
    return exit_code_for(result.status);
}

int do_sweep(const CliOptions& opt) {
    RunConfig config = parse_config_file(opt.config_path);
    if (!opt.out_dir.empty())
        config.out_dir = opt.out_dir;
    config.threads = effective_threads(opt.threads, config.threads);

    if (opt.values.empty() == opt.bisect.empty())
        throw ConfigError("sweep needs exactly one of --values or --bisect");

    if (!opt.values.empty()) {
        const SweepResult sweep = run_sweep(config, opt.param, parse_value_list(opt.values),
                                            config.threads);
        std::cout << sweep_csv(sweep);
        return 0;
    }

    const std::vector<double> bracket = parse_value_list(opt.bisect);
    if (bracket.size() != 2)
        throw ConfigError("--bisect expects 'lo,hi'");
    if (!(opt.tol > 0.0))
        throw ConfigError("--bisect needs --tol > 0");
    const BisectResult result = run_bisect(config, opt.param, bracket[0], bracket[1], opt.tol);
    std::cout << bisect_csv(result);
    std::cout << "bracket " << result.param << " in [" << format_double(result.lo) << ", "
              << format_double(result.hi) << "] width "
              << format_double(result.hi - result.lo) << "\n";
    return 0;
}

int do_check(const CliOptions& opt) {
    const int failures = report_checks(check_suite(opt.suite), std::cout);
    return failures == 0 ? 0 : 3;
}

int do_resume(const CliOptions& opt) {
    RunConfig config;
    if (!opt.config_path.empty())
        config = parse_config_file(opt.config_path);
    if (opt.t_end_given)
        config.t_end = opt.t_end;
    if (!(config.t_end > 0.0))
        throw ConfigError("resume needs --t-end (or a config with t_end)");
    if (!opt.out_dir.empty())
        config.out_dir = opt.out_dir;
    config.threads = effective_threads(opt.threads, config.threads);

    const RunResult result = resume_simulation(opt.from, config);
    if (config.mode.empty())
        config.mode = result.mode;
    if (result.mode == "torus") {
        if (config.n_points == 0)
            config.n_points = static_cast<int>(result.final_state.dims[0]);
    } else if (config.n_r == 0) {
        config.n_r = static_cast<int>(result.final_state.dims[0]);
        config.r_max = result.final_state.r_max;
    }
    write_artifacts(config, result);
    print_run_summary(result);
    return exit_code_for(result.status);
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Simulator for chemotactic aggregation coupled to incompressible flow"};
    app.require_subcommand(1);
    CliOptions opt;

    CLI::App* run = app.add_subcommand("run", "Integrate one configuration");
    run->add_option("--config", opt.config_path, "INI configuration file")->required();
    run->add_option("--out", opt.out_dir, "artifact directory (overrides [run] out_dir)");
    run->add_option("--threads", opt.threads, "worker threads");

    CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep or bisection");
    sweep->add_option("--config", opt.config_path, "INI configuration file")->required();
    sweep->add_option("--param", opt.param, "parameter to vary")->required();
    sweep->add_option("--values", opt.values, "comma-separated values (pi literals allowed)");
    sweep->add_option("--bisect", opt.bisect, "bracket 'lo,hi' to bisect");
    sweep->add_option("--tol", opt.tol, "bracket width to stop bisection at");
    sweep->add_option("--out", opt.out_dir, "artifact directory");
    sweep->add_option("--threads", opt.threads, "worker threads");

    CLI::App* check = app.add_subcommand("check", "Run invariant checks");
    check->add_option("--suite", opt.suite,
                      "spectral, torus, radial, selfsim, diagnostics or all");

    CLI::App* resume = app.add_subcommand("resume", "Continue from a saved state");
    resume->add_option("--from", opt.from, "checkpoint file")->required();
    CLI::Option* t_end_opt =
        resume->add_option("--t-end", opt.t_end, "new end time (rescaled time in selfsim mode)");
    resume->add_option("--config", opt.config_path, "INI configuration file");
    resume->add_option("--out", opt.out_dir, "artifact directory");
    resume->add_option("--threads", opt.threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    opt.t_end_given = t_end_opt->count() > 0;

    try {
        if (run->parsed())
            return do_run(opt);
        if (sweep->parsed())
            return do_sweep(opt);
        if (check->parsed())
            return do_check(opt);
        return do_resume(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

int cli_main(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("pkns");
    for (const auto& arg : args)
        argv.push_back(arg.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

} // namespace pkns
