#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gazeload {

// Reads a whole file; throws InputError if it cannot be opened.
std::string read_file(const std::string& path);

// Splits on '\n'; a trailing newline does not produce an empty last element.
std::vector<std::string> split_lines(const std::string& text);

std::vector<std::string> read_lines(const std::string& path);

// Writes content to path via a temp file in the same directory followed by
// an atomic rename, so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string trim(const std::string& s);
std::string to_lower(std::string s);
bool starts_with_icase(const std::string& s, const std::string& prefix);
std::vector<std::string> split(const std::string& s, char sep);

// Fixed-precision decimal formatting used by all deterministic text outputs.
std::string format_fixed(double v, int decimals);

// Sign-prefixed two-decimal cell format: +0.12 / -1.30; negative zero is
// normalized to +0.00.
std::string format_cell(double v);

// FNV-1a 64-bit; used for content digests in provenance fields and golden
// run digests.
std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

}  // namespace gazeload
