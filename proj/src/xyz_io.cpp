#include "hilbertcloud/xyz_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "hilbertcloud/error.hpp"

namespace hcl {

namespace {

bool parse_double(std::string_view token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

}  // namespace

PointCloud read_xyz(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());

    PointCloud pc;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = split_ws(line);
        if (tokens.empty() || tokens[0][0] == '#') continue;
        if (tokens.size() != 2 && tokens.size() != 3)
            throw ParseError("expected 2 or 3 coordinates, got " + std::to_string(tokens.size()),
                             line_no);
        if (pc.dims == 0) {
            pc.dims = static_cast<int>(tokens.size());
        } else if (tokens.size() != static_cast<std::size_t>(pc.dims)) {
            throw ParseError("point has " + std::to_string(tokens.size()) +
                                 " coordinates, file started with " + std::to_string(pc.dims),
                             line_no);
        }
        for (const auto tok : tokens) {
            double v;
            if (!parse_double(tok, v))
                throw ParseError("not a decimal real: '" + std::string(tok) + "'", line_no);
            if (!std::isfinite(v))
                throw ParseError("non-finite coordinate: '" + std::string(tok) + "'", line_no);
            pc.data.push_back(v);
        }
    }
    if (in.bad()) throw IoError("read failure on " + file.string());
    if (pc.dims == 0) pc.dims = 3;  // empty file: an empty 3-D cloud
    return pc;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const std::filesystem::path& file, const std::string& content) {
    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.flush()) throw IoError("write failure on " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + file.string());
}

void write_xyz(const std::filesystem::path& file, const PointCloud& pc) {
    std::ostringstream out;
    for (std::size_t i = 0; i < pc.size(); ++i) {
        for (int k = 0; k < pc.dims; ++k) {
            if (k) out << ' ';
            out << format_double(pc.at(i, k));
        }
        out << '\n';
    }
    write_file_atomic(file, out.str());
}

std::vector<SequenceEntry> scan_sequence(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw IoError("not a directory: " + dir.string());

    std::vector<SequenceEntry> entries;
    for (const auto& item : std::filesystem::directory_iterator(dir)) {
        if (!item.is_regular_file()) continue;
        const auto path = item.path();
        if (path.extension() != ".xyz") continue;
        const std::string stem = path.stem().string();
        if (stem.empty() ||
            !std::all_of(stem.begin(), stem.end(),
                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            continue;
        std::int64_t t = 0;
        auto [ptr, perr] = std::from_chars(stem.data(), stem.data() + stem.size(), t);
        if (perr != std::errc{} || ptr != stem.data() + stem.size()) continue;
        entries.push_back({t, path});
    }
    std::sort(entries.begin(), entries.end(),
              [](const SequenceEntry& a, const SequenceEntry& b) { return a.t < b.t; });
    for (std::size_t i = 0; i + 1 < entries.size(); ++i)
        if (entries[i].t == entries[i + 1].t)
            throw ParseError("duplicate frame index " + std::to_string(entries[i].t) + " (" +
                             entries[i].file.filename().string() + ", " +
                             entries[i + 1].file.filename().string() + ")");
    return entries;
}

}  // namespace hcl
