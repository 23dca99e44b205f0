#pragma once

#include <cstdint>
#include <string>

namespace chichaos {

/// Shortest round-trippable decimal form of v ("%.17g"); CSV cells use this so
/// identical runs produce byte-identical files.
std::string format_g17(double v);

/// Parses a finite or nan double from a CSV cell.
double parse_double(const std::string& cell);

/// FNV-1a 64-bit hash, hex encoded; used to fingerprint sweep configurations.
std::string fnv1a_hex(const std::string& data);

/// Whole-file helpers. write_file is atomic via a temporary + rename.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);

}  // namespace chichaos
