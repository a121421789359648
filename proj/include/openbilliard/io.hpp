#pragma once

#include <filesystem>
#include <string>

namespace ob {

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

/// Writes `content` to a temporary sibling and renames it over `path`, so a
/// reader never observes a partially written file. Throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

} // namespace ob
