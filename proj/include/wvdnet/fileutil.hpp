#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace wvdnet {

std::string read_file(const std::filesystem::path& path);

// Writes to "<path>.tmp" and renames over the target, so readers never see a
// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace wvdnet
