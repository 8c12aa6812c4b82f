#pragma once

#include <filesystem>
#include <string>

namespace waggle {

std::string read_file(const std::filesystem::path& path);

// Writes via a temp file in the same directory plus rename, so a crashed
// run never leaves a truncated artifact behind.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content);

// Shortest decimal form that round-trips a double (used by every CSV/JSON
// writer so re-runs are byte-identical).
std::string fmt_double(double v);

}  // namespace waggle
