#include "pkns/io.hpp"
#include "pkns/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pkns {

std::string format_double(double value) {
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    std::array<char, 32> buf;
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records) {
    std::string out;
    for (std::size_t i = 0; i < kDiagnosticsColumns.size(); ++i) {
        if (i)
            out += ',';
        out += kDiagnosticsColumns[i];
    }
    out += '\n';
    for (const auto& rec : records) {
        const auto values = rec.values();
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i)
                out += ',';
            out += format_double(values[i]);
        }
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw FormatError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw FormatError("short write to '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace pkns
