#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace gp {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path);

/// Writes through a sibling temp file and renames, so readers never observe a
/// partially written file.
void write_file_atomic(const fs::path& path, std::string_view contents);

std::vector<nlohmann::json> read_jsonl(const fs::path& path);

std::string sha256_hex(std::string_view bytes);

std::string base64_encode(std::string_view bytes);

/// Strict decoder; whitespace is skipped. Throws Error{DecodeError} with the
/// offending byte offset (relative to `encoded`, plus `base_offset`).
std::string base64_decode(std::string_view encoded, std::size_t base_offset = 0);

std::string lowercase(std::string_view s);

std::string_view trim(std::string_view s);

}  // namespace gp
