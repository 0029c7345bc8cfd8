#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pkns/checkpoint.hpp"
#include "pkns/cli.hpp"
#include "pkns/config.hpp"
#include "pkns/driver.hpp"
#include "pkns/errors.hpp"
#include "pkns/io.hpp"
#include "pkns/sweep.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

using namespace pkns;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

const fs::path kWork = fs::temp_directory_path() / "pkns_harness_tests";

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = kWork / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string torus_config_text() {
    return "[run]\n"
           "mode = torus\n"
           "t_end = 0.05\n"
           "dt_max = 5e-3\n"
           "diag_every = 2\n"
           "[grid]\n"
           "n_points = 32\n"
           "[ic]\n"
           "kind = gaussian\n"
           "mass = 4pi\n"
           "width = 0.25\n";
}

std::string radial_config_text(const std::string& mass) {
    return "[run]\n"
           "mode = radial\n"
           "t_end = 1\n"
           "diag_every = 10\n"
           "[grid]\n"
           "r_max = 6\n"
           "n_r = 128\n"
           "[ic]\n"
           "kind = gaussian\n"
           "mass = " +
           mass +
           "\n"
           "width = 0.5\n";
}

int config_error_line(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        const std::string tag = "config line ";
        const std::size_t pos = what.find(tag);
        REQUIRE(pos != std::string::npos);
        return std::stoi(what.substr(pos + tag.size()));
    }
    REQUIRE(false);
    return -1;
}

} // namespace

TEST_CASE("numeric literals with a pi suffix") {
    CHECK(parse_number("4pi") == 4.0 * M_PI);
    CHECK(parse_number("0.5pi") == 0.5 * M_PI);
    CHECK(parse_number("-pi") == -M_PI);
    CHECK(parse_number("pi") == M_PI);
    CHECK(parse_number("2e-3") == 2e-3);
    CHECK(parse_number("42") == 42.0);
    CHECK_THROWS_AS(parse_number("abc"), ConfigError);
    CHECK_THROWS_AS(parse_number("4x"), ConfigError);
    CHECK_THROWS_AS(parse_number("4pi7"), ConfigError);
    CHECK_THROWS_AS(parse_number(""), ConfigError);
}

TEST_CASE("configuration parsing") {
    SUBCASE("full torus file with defaults") {
        const RunConfig c = parse_config_text(torus_config_text());
        CHECK(c.mode == "torus");
        CHECK(c.t_end == 0.05);
        CHECK(c.dt_max == 5e-3);
        CHECK(c.diag_every == 2);
        CHECK(c.n_points == 32);
        CHECK(c.ic.kind == "gaussian");
        CHECK(c.ic.mass == 4.0 * M_PI);
        CHECK(c.ic.width == 0.25);
        // Untouched knobs keep their defaults.
        CHECK(c.cfl == 0.5);
        CHECK(c.dt_min == 1e-10);
        CHECK(c.delta == 0.01);
        CHECK(c.ic.seed == 1);
        CHECK(c.ic.modes == 8);
        CHECK(c.threads == 1);
        CHECK(c.out_dir.empty());
    }

    SUBCASE("comments, blanks and inline comments are skipped") {
        const RunConfig c = parse_config_text("# leading comment\n\n"
                                              "[run]\n"
                                              "mode = radial ; trailing\n"
                                              "t_end = 2\n"
                                              "[grid]\n"
                                              "r_max = 8\n"
                                              "n_r = 128\n"
                                              "[ic]\n"
                                              "kind = gaussian\n"
                                              "mass = 1\n");
        CHECK(c.mode == "radial");
        CHECK(c.r_max == 8.0);
    }

    SUBCASE("errors carry the offending line number") {
        CHECK(config_error_line("[run]\nmode = torus\nmode = torus\n") == 3);
        CHECK(config_error_line("[run]\nbogus = 1\n") == 2);
        CHECK(config_error_line("[what]\n") == 1);
        CHECK(config_error_line("[run]\nmode torus\n") == 2);
        CHECK(config_error_line("[run]\nmode = torus\n[grid]\nn_points = abc\n") == 4);
        // Whole-config constraints are checked after the scan and do not
        // point at a single line.
        CHECK_THROWS_AS(parse_config_text("[run]\nmode = torus\nt_end = 1\n"
                                          "[grid]\nn_points = 48\n"
                                          "[ic]\nkind = gaussian\nmass = 1\n"),
                        ConfigError);
    }

    SUBCASE("structural validation") {
        // Missing mode / t_end / kind / mass.
        CHECK_THROWS_AS(parse_config_text("[run]\nt_end = 1\n[grid]\nn_points = 32\n"
                                          "[ic]\nkind = gaussian\nmass = 1\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("[run]\nmode = torus\n[grid]\nn_points = 32\n"
                                          "[ic]\nkind = gaussian\nmass = 1\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("[run]\nmode = torus\nt_end = 1\n"
                                          "[grid]\nn_points = 32\n[ic]\nmass = 1\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("[run]\nmode = torus\nt_end = 1\n"
                                          "[grid]\nn_points = 32\n[ic]\nkind = gaussian\n"),
                        ConfigError);
        // Grid keys must match the mode.
        CHECK_THROWS_AS(parse_config_text("[run]\nmode = torus\nt_end = 1\n"
                                          "[grid]\nr_max = 4\nn_r = 128\n"
                                          "[ic]\nkind = gaussian\nmass = 1\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("[run]\nmode = radial\nt_end = 1\n"
                                          "[grid]\nr_max = 4\n"
                                          "[ic]\nkind = gaussian\nmass = 1\n"),
                        ConfigError);
        // The random kind is periodic-only and needs |amplitude| < 1.
        CHECK_THROWS_AS(parse_config_text("[run]\nmode = radial\nt_end = 1\n"
                                          "[grid]\nr_max = 4\nn_r = 128\n"
                                          "[ic]\nkind = random\nmass = 1\namplitude = 0.5\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("[run]\nmode = torus\nt_end = 1\n"
                                          "[grid]\nn_points = 32\n"
                                          "[ic]\nkind = random\nmass = 1\namplitude = 1.5\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_text("[run]\nmode = torus\nt_end = -1\n"
                                          "[grid]\nn_points = 32\n"
                                          "[ic]\nkind = gaussian\nmass = 1\n"),
                        ConfigError);
    }

    SUBCASE("sweepable parameter overrides") {
        RunConfig c = parse_config_text(torus_config_text());
        apply_param(c, "mass", 2.0);
        CHECK(c.ic.mass == 2.0);
        apply_param(c, "width", 0.7);
        CHECK(c.ic.width == 0.7);
        apply_param(c, "amplitude", 0.2);
        CHECK(c.ic.amplitude == 0.2);
        apply_param(c, "seed", 9.0);
        CHECK(c.ic.seed == 9);
        apply_param(c, "delta", 0.05);
        CHECK(c.delta == 0.05);
        apply_param(c, "t_end", 2.5);
        CHECK(c.t_end == 2.5);
        apply_param(c, "cfl", 0.25);
        CHECK(c.cfl == 0.25);
        apply_param(c, "dt_max", 1e-4);
        CHECK(c.dt_max == 1e-4);
        CHECK_THROWS_AS(apply_param(c, "n_points", 64.0), ConfigError);
    }
}

TEST_CASE("double formatting") {
    for (const double v : {0.1, 1.0 / 3.0, 1e300, -2.5e-308, 0.0, -1.0, 12345.678,
                           4.0 * M_PI, 1e-17}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(HUGE_VAL) == "inf");
    CHECK(format_double(-HUGE_VAL) == "-inf");
}

TEST_CASE("diagnostics table") {
    std::vector<DiagnosticsRecord> records(2);
    records[0].t = 0.0;
    records[0].mass = 4.0 * M_PI;
    records[1].t = 0.5;
    records[1].loghls = std::nan("");
    const std::string csv = diagnostics_csv(records);

    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header == "t,dt,mass,mean_u1,mean_u2,L2_n,Linf_n,L2_u,L2_omega,V,S,S_plus,"
                    "S_minus,E,E_gamma,D_n,D_u,E_residual,loghls");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("nan") != std::string::npos);
    CHECK(csv.find(format_double(4.0 * M_PI)) != std::string::npos);
}

TEST_CASE("checkpoint round trips") {
    SUBCASE("torus snapshots are byte stable") {
        RunConfig config = parse_config_text(torus_config_text());
        const TorusState state = build_torus_ic(config);
        const std::string bytes = serialize_checkpoint(make_checkpoint(state));
        const TorusState loaded = torus_from_checkpoint(deserialize_checkpoint(bytes));
        CHECK((loaded.n.coef - state.n.coef).abs().maxCoeff() == 0.0);
        CHECK((loaded.u.c1.coef - state.u.c1.coef).abs().maxCoeff() == 0.0);
        CHECK(loaded.t == state.t);
        CHECK(serialize_checkpoint(make_checkpoint(loaded)) == bytes);
    }

    SUBCASE("radial and selfsim snapshots") {
        const RadialGrid grid = make_radial_grid(6.0, 128);
        Eigen::ArrayXd n(128), w(128);
        for (int j = 0; j < 128; ++j) {
            n[j] = std::exp(-0.5 * grid.r_center(j));
            w[j] = std::sin(grid.r_center(j));
        }
        const RadialState state{0.75, grid, n, w};
        const std::string bytes = serialize_checkpoint(make_checkpoint(state));
        const RadialState loaded = radial_from_checkpoint(deserialize_checkpoint(bytes));
        CHECK(loaded.t == 0.75);
        CHECK(loaded.grid == grid);
        CHECK((loaded.n - n).abs().maxCoeff() == 0.0);
        CHECK((loaded.omega - w).abs().maxCoeff() == 0.0);

        const SelfSimState ss{0.3, grid, n, w};
        const SelfSimState ss_loaded =
            selfsim_from_checkpoint(deserialize_checkpoint(serialize_checkpoint(make_checkpoint(ss))));
        CHECK(ss_loaded.tau == 0.3);
        CHECK((ss_loaded.N - n).abs().maxCoeff() == 0.0);
    }

    SUBCASE("structural defects raise format errors") {
        const RadialGrid grid = make_radial_grid(6.0, 128);
        const RadialState state{0.0, grid, Eigen::ArrayXd::Ones(128),
                                Eigen::ArrayXd::Zero(128)};
        const std::string bytes = serialize_checkpoint(make_checkpoint(state));

        std::string bad_magic = bytes;
        bad_magic[0] = 'Q';
        CHECK_THROWS_AS(deserialize_checkpoint(bad_magic), FormatError);

        std::string bad_version = bytes;
        bad_version[4] = 9;
        CHECK_THROWS_AS(deserialize_checkpoint(bad_version), FormatError);

        CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() - 3)), FormatError);
        CHECK_THROWS_AS(deserialize_checkpoint(bytes + "x"), FormatError);
        CHECK_THROWS_AS(deserialize_checkpoint(""), FormatError);

        // The wrong mode for the requested state type is also structural.
        CHECK_THROWS_AS(torus_from_checkpoint(deserialize_checkpoint(bytes)), FormatError);

        Checkpoint lying = make_checkpoint(state);
        lying.dims = {64};
        CHECK_THROWS_AS(radial_from_checkpoint(lying), FormatError);
        lying = make_checkpoint(state);
        lying.fields.pop_back();
        CHECK_THROWS_AS(radial_from_checkpoint(lying), FormatError);
    }
}

TEST_CASE("torus run loop") {
    RunConfig config = parse_config_text(torus_config_text());
    const RunResult result = run_simulation(config);

    CHECK(result.status == RunStatus::Completed);
    CHECK(result.mode == "torus");
    CHECK(result.t_stop == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(result.steps >= 10);
    CHECK(result.rejected_steps == 0);
    REQUIRE(result.records.size() >= 3);
    CHECK(result.records.front().t == 0.0);
    CHECK(result.records.back().t == doctest::Approx(0.05).epsilon(1e-12));
    for (const auto& rec : result.records)
        CHECK(rec.mass == result.records.front().mass);
    CHECK(result.final_state.mode == kModeTorus);
    CHECK(!result.t_star.has_value());
    CHECK(!result.decay_slope.has_value());
}

TEST_CASE("radial blow-up run stops before the concentration bound") {
    RunConfig config = parse_config_text(radial_config_text("16pi"));
    const RunResult result = run_simulation(config);

    CHECK(result.status == RunStatus::BlowupSuspected);
    CHECK(exit_code_for(result.status) == 4);
    REQUIRE(result.t_star.has_value());
    REQUIRE(!result.records.empty());
    // The bound is assembled from the recorded initial mass and second
    // moment: t* = 8 pi V0 / (4 M (M - 8 pi)).  With V0 = 2 M width^2 it is
    // 1/8 up to the O(h^2) quadrature of the initial moments.
    const double m0 = result.records.front().mass;
    const double v0 = result.records.front().V;
    const double expected = 8.0 * kPi * v0 / (4.0 * m0 * (m0 - 8.0 * kPi));
    CHECK(*result.t_star == doctest::Approx(expected).epsilon(1e-9));
    CHECK(*result.t_star == doctest::Approx(0.125).epsilon(1e-3));
    CHECK(result.t_stop <= *result.t_star);
    CHECK(!result.message.empty());
}

TEST_CASE("artifacts are deterministic") {
    const fs::path dir_a = fresh_dir("det_a");
    const fs::path dir_b = fresh_dir("det_b");
    RunConfig config = parse_config_text(torus_config_text());

    config.out_dir = dir_a.string();
    run_and_write(config);
    config.out_dir = dir_b.string();
    run_and_write(config);

    for (const char* name : {"diagnostics.csv", "summary.json", "state.pkns"}) {
        const std::string a = read_text_file((dir_a / name).string());
        const std::string b = read_text_file((dir_b / name).string());
        CHECK(a == b);
        CHECK(!a.empty());
    }

    const auto summary = nlohmann::json::parse(read_text_file((dir_a / "summary.json").string()));
    CHECK(summary.at("mode") == "torus");
    CHECK(summary.at("status") == "completed");
    CHECK(summary.at("grid").at("n_points") == 32);
    CHECK(summary.at("final").at("mass").get<double>() == doctest::Approx(4.0 * M_PI));
    CHECK(summary.at("steps").get<long>() >= 10);
}

TEST_CASE("resuming a run reproduces the single long run") {
    const fs::path dir = fresh_dir("resume");
    // A small fixed dt_max keeps the adaptive step pinned, so the split
    // and straight runs see identical step sequences.
    std::string text = radial_config_text("pi");
    RunConfig first = parse_config_text(text);
    first.t_end = 0.1;
    first.dt_max = 1e-3;
    first.out_dir = dir.string();
    run_and_write(first);

    RunConfig rest = parse_config_text(text);
    rest.t_end = 0.2;
    rest.dt_max = 1e-3;
    const RunResult resumed = resume_simulation((dir / "state.pkns").string(), rest);
    CHECK(resumed.status == RunStatus::Completed);
    CHECK(resumed.records.front().t == doctest::Approx(0.1).epsilon(1e-12));

    RunConfig straight = parse_config_text(text);
    straight.t_end = 0.2;
    straight.dt_max = 1e-3;
    const RunResult direct = run_simulation(straight);

    const RadialState a = radial_from_checkpoint(resumed.final_state);
    const RadialState b = radial_from_checkpoint(direct.final_state);
    CHECK(a.t == doctest::Approx(b.t).epsilon(1e-13));
    CHECK((a.n - b.n).abs().maxCoeff() < 1e-12 * b.n.abs().maxCoeff());

    // Grid mismatch between config and checkpoint is a format defect.
    RunConfig wrong = parse_config_text(radial_config_text("pi"));
    wrong.n_r = 256;
    wrong.t_end = 0.2;
    CHECK_THROWS_AS(resume_simulation((dir / "state.pkns").string(), wrong), FormatError);
}

TEST_CASE("sweeps classify the two regimes") {
    RunConfig base = parse_config_text(radial_config_text("4pi"));
    base.t_end = 0.6;

    const SweepResult sweep =
        run_sweep(base, "mass", {2.0 * M_PI, 16.0 * M_PI}, 1);
    REQUIRE(sweep.rows.size() == 2);
    CHECK(sweep.param == "mass");
    CHECK(sweep.rows[0].value == 2.0 * M_PI);
    CHECK(!sweep.rows[0].blowup);
    CHECK(sweep.rows[0].status == RunStatus::Completed);
    CHECK(sweep.rows[1].blowup);
    REQUIRE(sweep.rows[1].t_star.has_value());

    const std::string csv = sweep_csv(sweep);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "param,value,status,blowup,t_stop,steps,final_Linf_n,t_star");
    CHECK(csv.find("mass,") != std::string::npos);
    CHECK(csv.find("blowup_suspected") != std::string::npos);

    const BisectResult bisect = run_bisect(base, "mass", 6.0 * M_PI, 12.0 * M_PI, 2.0 * M_PI);
    CHECK(bisect.hi - bisect.lo <= 2.0 * M_PI + 1e-9);
    CHECK(bisect.lo >= 6.0 * M_PI);
    CHECK(bisect.hi <= 12.0 * M_PI);
    CHECK(!bisect.iterations.empty());
    const std::string bcsv = bisect_csv(bisect);
    CHECK(bcsv.substr(0, bcsv.find('\n')) == "param,value,blowup");
}

TEST_CASE("command line entry point") {
    const fs::path dir = fresh_dir("cli");
    const fs::path cfg = dir / "run.ini";
    write_text_file(cfg.string(), torus_config_text());

    SUBCASE("run writes artifacts and reports success") {
        const fs::path out = dir / "out";
        CHECK(cli_main({"run", "--config", cfg.string(), "--out", out.string()}) == 0);
        CHECK(fs::exists(out / "diagnostics.csv"));
        CHECK(fs::exists(out / "summary.json"));
        CHECK(fs::exists(out / "state.pkns"));
    }

    SUBCASE("configuration problems exit with 2") {
        const fs::path bad = dir / "bad.ini";
        write_text_file(bad.string(), "[run]\nbogus = 1\n");
        CHECK(cli_main({"run", "--config", bad.string()}) == 2);
        CHECK(cli_main({"run"}) == 2);
        CHECK(cli_main({"frobnicate"}) == 2);
        CHECK(cli_main({"sweep", "--config", cfg.string(), "--param", "mass"}) == 2);
        CHECK(cli_main({"check", "--suite", "nope"}) == 2);
    }

    SUBCASE("missing files exit with 3") {
        CHECK(cli_main({"run", "--config", (dir / "absent.ini").string()}) == 2);
        // --t-end satisfies the option check so the missing file is what fails.
        CHECK(cli_main({"resume", "--from", (dir / "absent.pkns").string(),
                        "--t-end", "1"}) == 3);
    }

    SUBCASE("blow-up exits with 4") {
        const fs::path hot = dir / "hot.ini";
        write_text_file(hot.string(), radial_config_text("16pi"));
        CHECK(cli_main({"run", "--config", hot.string()}) == 4);
    }

    SUBCASE("invariant checks pass") {
        CHECK(cli_main({"check", "--suite", "spectral"}) == 0);
        CHECK(cli_main({"check", "--suite", "diagnostics"}) == 0);
    }
}
