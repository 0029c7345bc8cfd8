#include "pkns/config.hpp"
#include "pkns/errors.hpp"

#include <cctype>
#include <climits>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace pkns {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
    std::size_t pos = line.find_first_of("#;");
    return pos == std::string::npos ? line : line.substr(0, pos);
}

[[noreturn]] void fail(int line_no, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line_no) + ": " + what);
}

double to_double(const std::string& token, int line_no) {
    try {
        return parse_number(token);
    } catch (const ConfigError& e) {
        fail(line_no, e.what());
    }
}

int to_int(const std::string& token, int line_no) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(token, &used);
    } catch (const std::exception&) {
        fail(line_no, "expected an integer, got '" + token + "'");
    }
    if (used != token.size())
        fail(line_no, "expected an integer, got '" + token + "'");
    if (v < INT_MIN || v > INT_MAX)
        fail(line_no, "integer out of range: '" + token + "'");
    return static_cast<int>(v);
}

std::uint64_t to_uint64(const std::string& token, int line_no) {
    if (token.empty() || token[0] == '-')
        fail(line_no, "expected a non-negative integer, got '" + token + "'");
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(token, &used);
    } catch (const std::exception&) {
        fail(line_no, "expected a non-negative integer, got '" + token + "'");
    }
    if (used != token.size())
        fail(line_no, "expected a non-negative integer, got '" + token + "'");
    return v;
}

} // namespace

double parse_number(const std::string& token) {
    std::string body = token;
    double factor = 1.0;
    if (body.size() >= 2 && body.compare(body.size() - 2, 2, "pi") == 0) {
        factor = M_PI;
        body = body.substr(0, body.size() - 2);
        if (body.empty() || body == "+")
            return factor;
        if (body == "-")
            return -factor;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(body, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + token + "'");
    }
    if (used != body.size())
        throw ConfigError("expected a number, got '" + token + "'");
    return v * factor;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::set<std::string> seen;
    bool have_mode = false, have_t_end = false, have_kind = false;
    bool have_n_points = false, have_r_max = false, have_n_r = false;
    bool have_mass = false;
    int line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "run" && section != "grid" && section != "ic")
                fail(line_no, "unknown section [" + section + "]");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(line_no, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            fail(line_no, "empty key");
        if (value.empty())
            fail(line_no, "empty value for '" + key + "'");
        if (section.empty())
            fail(line_no, "key '" + key + "' outside any section");
        std::string qualified = section + "." + key;
        if (!seen.insert(qualified).second)
            fail(line_no, "duplicate key '" + key + "' in section [" + section + "]");

        if (section == "run") {
            if (key == "mode") {
                if (value != "torus" && value != "radial" && value != "selfsim")
                    fail(line_no, "mode must be torus, radial or selfsim");
                config.mode = value;
                have_mode = true;
            } else if (key == "t_end") {
                config.t_end = to_double(value, line_no);
                have_t_end = true;
            } else if (key == "cfl") {
                config.cfl = to_double(value, line_no);
            } else if (key == "dt_max") {
                config.dt_max = to_double(value, line_no);
            } else if (key == "dt_min") {
                config.dt_min = to_double(value, line_no);
            } else if (key == "diag_every") {
                config.diag_every = to_int(value, line_no);
            } else if (key == "delta") {
                config.delta = to_double(value, line_no);
            } else if (key == "out_dir") {
                config.out_dir = value;
            } else if (key == "threads") {
                config.threads = to_int(value, line_no);
            } else {
                fail(line_no, "unknown key '" + key + "' in section [run]");
            }
        } else if (section == "grid") {
            if (key == "n_points") {
                config.n_points = to_int(value, line_no);
                have_n_points = true;
            } else if (key == "r_max") {
                config.r_max = to_double(value, line_no);
                have_r_max = true;
            } else if (key == "n_r") {
                config.n_r = to_int(value, line_no);
                have_n_r = true;
            } else {
                fail(line_no, "unknown key '" + key + "' in section [grid]");
            }
        } else {
            if (key == "kind") {
                if (value != "gaussian" && value != "random" && value != "shear" && value != "file")
                    fail(line_no, "kind must be gaussian, random, shear or file");
                config.ic.kind = value;
                have_kind = true;
            } else if (key == "mass") {
                config.ic.mass = to_double(value, line_no);
                have_mass = true;
            } else if (key == "width") {
                config.ic.width = to_double(value, line_no);
            } else if (key == "amplitude") {
                config.ic.amplitude = to_double(value, line_no);
            } else if (key == "modes") {
                config.ic.modes = to_int(value, line_no);
            } else if (key == "seed") {
                config.ic.seed = to_uint64(value, line_no);
            } else if (key == "file") {
                config.ic.file = value;
            } else {
                fail(line_no, "unknown key '" + key + "' in section [ic]");
            }
        }
    }

    if (!have_mode)
        throw ConfigError("config: [run] mode is required");
    if (!have_t_end)
        throw ConfigError("config: [run] t_end is required");
    if (config.t_end <= 0.0)
        throw ConfigError("config: t_end must be positive");
    if (config.cfl <= 0.0)
        throw ConfigError("config: cfl must be positive");
    if (config.dt_max <= 0.0 || config.dt_min <= 0.0 || config.dt_min > config.dt_max)
        throw ConfigError("config: require 0 < dt_min <= dt_max");
    if (config.diag_every < 1)
        throw ConfigError("config: diag_every must be at least 1");
    if (config.delta <= 0.0)
        throw ConfigError("config: delta must be positive");
    if (config.threads < 1)
        throw ConfigError("config: threads must be at least 1");

    if (config.mode == "torus") {
        if (!have_n_points)
            throw ConfigError("config: [grid] n_points is required in torus mode");
        if (config.n_points < 8 || (config.n_points & (config.n_points - 1)) != 0)
            throw ConfigError("config: n_points must be a power of two, at least 8");
        if (have_r_max || have_n_r)
            throw ConfigError("config: r_max/n_r do not apply in torus mode");
    } else {
        if (!have_r_max || !have_n_r)
            throw ConfigError("config: [grid] r_max and n_r are required in " + config.mode + " mode");
        if (config.r_max <= 0.0)
            throw ConfigError("config: r_max must be positive");
        if (config.n_r < 64)
            throw ConfigError("config: n_r must be at least 64");
        if (have_n_points)
            throw ConfigError("config: n_points does not apply in " + config.mode + " mode");
    }

    const std::string& kind = config.ic.kind;
    if (!have_kind)
        throw ConfigError("config: [ic] kind is required");
    if (kind == "file") {
        if (config.ic.file.empty())
            throw ConfigError("config: ic kind 'file' requires a file path");
    } else {
        if (!have_mass && kind != "shear")
            throw ConfigError("config: [ic] mass is required for kind '" + kind + "'");
        if (config.ic.mass < 0.0)
            throw ConfigError("config: mass must be non-negative");
        if (config.ic.width <= 0.0)
            throw ConfigError("config: width must be positive");
    }
    if ((kind == "random" || kind == "shear") && config.mode != "torus")
        throw ConfigError("config: ic kind '" + kind + "' is only available in torus mode");
    if (kind == "random" && !(std::abs(config.ic.amplitude) < 1.0))
        throw ConfigError("config: random ic needs |amplitude| < 1 to keep the density positive");
    if (kind == "random" && config.ic.modes < 1)
        throw ConfigError("config: random ic needs modes >= 1");

    return config;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void apply_param(RunConfig& config, const std::string& name, double value) {
    if (name == "mass")
        config.ic.mass = value;
    else if (name == "width")
        config.ic.width = value;
    else if (name == "amplitude")
        config.ic.amplitude = value;
    else if (name == "seed")
        config.ic.seed = static_cast<std::uint64_t>(value);
    else if (name == "delta")
        config.delta = value;
    else if (name == "t_end")
        config.t_end = value;
    else if (name == "cfl")
        config.cfl = value;
    else if (name == "dt_max")
        config.dt_max = value;
    else
        throw ConfigError("unknown sweep parameter '" + name + "'");
}

} // namespace pkns
