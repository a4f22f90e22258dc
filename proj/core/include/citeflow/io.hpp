#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace citeflow {

// FNV-1a over a byte sequence. Used to fingerprint input files in run
// manifests and snapshot sidecars.
std::uint64_t fnv1a64(std::string_view bytes);

// Streaming FNV-1a over a file's contents. Throws std::runtime_error when the
// file cannot be opened.
std::uint64_t fnv1a64_file(const std::string& path);

std::string to_hex64(std::uint64_t value);

// Reads an entire file into memory. Throws std::runtime_error on failure.
std::string read_file(const std::string& path);

// Writes bytes to a file, replacing any existing content. Throws
// std::runtime_error on failure.
void write_file(const std::string& path, std::string_view content);

// Fixed-decimal formatting (printf %.*f). Not locale dependent.
std::string format_fixed(double value, int decimals);

// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

// Splits on a single-character delimiter; keeps empty fields.
std::vector<std::string_view> split(std::string_view line, char delim);

std::string_view trim(std::string_view s);

std::string to_lower(std::string_view s);

// Case-insensitive substring test (ASCII).
bool contains_ci(std::string_view haystack, std::string_view needle);

// Strict integer parse of the full string. Returns false on any trailing or
// malformed input.
bool parse_i32(std::string_view s, std::int32_t& out);
bool parse_u64(std::string_view s, std::uint64_t& out);
bool parse_f64(std::string_view s, double& out);

}  // namespace citeflow
