#include "pkns/checkpoint.hpp"
#include "pkns/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are stored little-endian");

namespace pkns {

namespace {

constexpr char kMagic[4] = {'P', 'K', 'N', 'S'};
constexpr std::uint8_t kVersion = 1;

void append(std::string& out, const void* data, std::size_t size) {
    out.append(static_cast<const char*>(data), size);
}

template <typename T>
void append_value(std::string& out, T value) {
    append(out, &value, sizeof(T));
}

struct Reader {
    const std::string& bytes;
    std::size_t pos = 0;

    void take(void* into, std::size_t size) {
        if (pos + size > bytes.size())
            throw FormatError("checkpoint truncated");
        std::memcpy(into, bytes.data() + pos, size);
        pos += size;
    }

    template <typename T>
    T value() {
        T v;
        take(&v, sizeof(T));
        return v;
    }
};

std::vector<double> complex_payload(const ComplexField& coef) {
    std::vector<double> out(static_cast<std::size_t>(coef.size()) * 2);
    std::memcpy(out.data(), coef.data(), out.size() * sizeof(double));
    return out;
}

void load_complex(ComplexField& coef, const std::vector<double>& payload) {
    std::memcpy(coef.data(), payload.data(), payload.size() * sizeof(double));
}

std::vector<double> vector_payload(const Eigen::ArrayXd& a) {
    return std::vector<double>(a.data(), a.data() + a.size());
}

Eigen::ArrayXd load_vector(const std::vector<double>& payload) {
    return Eigen::Map<const Eigen::ArrayXd>(payload.data(),
                                            static_cast<Eigen::Index>(payload.size()));
}

std::size_t field_length(const Checkpoint& cp) {
    std::size_t len = 1;
    for (std::uint64_t d : cp.dims)
        len *= static_cast<std::size_t>(d);
    return len;
}

void require_radial_shape(const Checkpoint& cp, std::size_t n_fields, const char* what) {
    if (cp.dims.size() != 1)
        throw FormatError(std::string("checkpoint: ") + what + " state must be one-dimensional");
    if (cp.dims[0] < 64)
        throw FormatError(std::string("checkpoint: ") + what + " state needs at least 64 cells");
    if (cp.fields.size() != n_fields)
        throw FormatError(std::string("checkpoint: ") + what + " state must hold exactly 2 fields");
    for (const auto& field : cp.fields)
        if (field.size() != field_length(cp))
            throw FormatError(std::string("checkpoint: ") + what +
                              " field length disagrees with the declared dimensions");
    if (!(cp.r_max > 0.0))
        throw FormatError(std::string("checkpoint: ") + what + " state needs a positive r_max");
}

} // namespace

Checkpoint make_checkpoint(const TorusState& state) {
    Checkpoint cp;
    cp.mode = kModeTorus;
    cp.time = state.t;
    const int n = state.n.grid.n;
    cp.dims = {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(n / 2 + 1), 2};
    cp.fields.push_back(complex_payload(state.n.coef));
    cp.fields.push_back(complex_payload(state.u.c1.coef));
    cp.fields.push_back(complex_payload(state.u.c2.coef));
    return cp;
}

Checkpoint make_checkpoint(const RadialState& state) {
    Checkpoint cp;
    cp.mode = kModeRadial;
    cp.time = state.t;
    cp.r_max = state.grid.r_max;
    cp.dims = {static_cast<std::uint64_t>(state.grid.n_r)};
    cp.fields.push_back(vector_payload(state.n));
    cp.fields.push_back(vector_payload(state.omega));
    return cp;
}

Checkpoint make_checkpoint(const SelfSimState& state) {
    Checkpoint cp;
    cp.mode = kModeSelfSim;
    cp.time = state.tau;
    cp.r_max = state.grid.r_max;
    cp.dims = {static_cast<std::uint64_t>(state.grid.n_r)};
    cp.fields.push_back(vector_payload(state.N));
    cp.fields.push_back(vector_payload(state.Omega));
    return cp;
}

TorusState torus_from_checkpoint(const Checkpoint& cp) {
    if (cp.mode != kModeTorus)
        throw FormatError("checkpoint: expected a torus state");
    if (cp.dims.size() != 3 || cp.dims[2] != 2)
        throw FormatError("checkpoint: torus state must have shape (n, n/2+1, 2)");
    const std::uint64_t n = cp.dims[0];
    if (n < 8 || (n & (n - 1)) != 0 || cp.dims[1] != n / 2 + 1)
        throw FormatError("checkpoint: torus state must have shape (n, n/2+1, 2) with n a power of two");
    if (cp.fields.size() != 3)
        throw FormatError("checkpoint: torus state must hold exactly 3 fields");
    for (const auto& field : cp.fields)
        if (field.size() != field_length(cp))
            throw FormatError(
                "checkpoint: torus field length disagrees with the declared dimensions");

    TorusGrid grid = make_torus_grid(static_cast<int>(n));
    TorusState state{cp.time, zero_scalar(grid), zero_vector(grid)};
    load_complex(state.n.coef, cp.fields[0]);
    load_complex(state.u.c1.coef, cp.fields[1]);
    load_complex(state.u.c2.coef, cp.fields[2]);
    return state;
}

RadialState radial_from_checkpoint(const Checkpoint& cp) {
    if (cp.mode != kModeRadial)
        throw FormatError("checkpoint: expected a radial state");
    require_radial_shape(cp, 2, "radial");
    RadialGrid grid = make_radial_grid(cp.r_max, static_cast<int>(cp.dims[0]));
    return RadialState{cp.time, grid, load_vector(cp.fields[0]), load_vector(cp.fields[1])};
}

SelfSimState selfsim_from_checkpoint(const Checkpoint& cp) {
    if (cp.mode != kModeSelfSim)
        throw FormatError("checkpoint: expected a selfsim state");
    require_radial_shape(cp, 2, "selfsim");
    RadialGrid grid = make_radial_grid(cp.r_max, static_cast<int>(cp.dims[0]));
    return SelfSimState{cp.time, grid, load_vector(cp.fields[0]), load_vector(cp.fields[1])};
}

std::string serialize_checkpoint(const Checkpoint& cp) {
    std::string out;
    append(out, kMagic, 4);
    append_value(out, kVersion);
    append_value(out, cp.mode);
    append_value(out, cp.time);
    if (cp.mode != kModeTorus)
        append_value(out, cp.r_max);
    append_value(out, static_cast<std::uint8_t>(cp.dims.size()));
    for (std::uint64_t d : cp.dims)
        append_value(out, d);
    append_value(out, static_cast<std::uint8_t>(cp.fields.size()));
    for (const auto& field : cp.fields)
        append(out, field.data(), field.size() * sizeof(double));
    return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
    Reader in{bytes};
    char magic[4];
    in.take(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("checkpoint: bad magic");
    const auto version = in.value<std::uint8_t>();
    if (version != kVersion)
        throw FormatError("checkpoint: unsupported format version " + std::to_string(version));

    Checkpoint cp;
    cp.mode = in.value<std::uint8_t>();
    if (cp.mode > kModeSelfSim)
        throw FormatError("checkpoint: unknown mode tag " + std::to_string(cp.mode));
    cp.time = in.value<double>();
    if (cp.mode != kModeTorus)
        cp.r_max = in.value<double>();

    const auto ndims = in.value<std::uint8_t>();
    if (ndims == 0 || ndims > 3)
        throw FormatError("checkpoint: dimension count out of range");
    cp.dims.resize(ndims);
    for (auto& d : cp.dims) {
        d = in.value<std::uint64_t>();
        if (d == 0 || d > (1u << 24))
            throw FormatError("checkpoint: dimension out of range");
    }

    const auto n_fields = in.value<std::uint8_t>();
    if (n_fields == 0 || n_fields > 8)
        throw FormatError("checkpoint: field count out of range");
    const std::size_t len = field_length(cp);
    cp.fields.assign(n_fields, std::vector<double>(len));
    for (auto& field : cp.fields)
        in.take(field.data(), len * sizeof(double));
    if (in.pos != bytes.size())
        throw FormatError("checkpoint: trailing bytes after payload");
    return cp;
}

void write_checkpoint_file(const std::string& path, const Checkpoint& cp) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw FormatError("cannot open '" + path + "' for writing");
    const std::string bytes = serialize_checkpoint(cp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw FormatError("short write to '" + path + "'");
}

Checkpoint read_checkpoint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open checkpoint '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_checkpoint(buf.str());
}

} // namespace pkns
