#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hilbertcloud/cloud.hpp"

namespace hcl {

/// ASCII XYZ: one point per line, 2 or 3 whitespace-separated decimal reals.
/// Lines starting with '#' and blank lines are ignored. The dimension is
/// inferred from the first data line and enforced afterwards; non-finite
/// values are rejected. Throws ParseError (with the offending line number)
/// or IoError.
PointCloud read_xyz(const std::filesystem::path& file);

/// Writes one point per line with round-trip-exact formatting.
void write_xyz(const std::filesystem::path& file, const PointCloud& pc);

/// A frame of a recorded sequence: file stem parsed as the timestamp index.
struct SequenceEntry {
    std::int64_t t = 0;
    std::filesystem::path file;
};

/// Scans a directory for frames named by zero-padded index ("000000.xyz",
/// "000001.xyz", ...) and returns them sorted by index. Duplicate indices
/// are an error; other files are ignored.
std::vector<SequenceEntry> scan_sequence(const std::filesystem::path& dir);

/// Serializes a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

/// Writes a file atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path& file, const std::string& content);

}  // namespace hcl
