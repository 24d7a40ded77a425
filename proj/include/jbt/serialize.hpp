#pragma once

#include <string>
#include <string_view>

#include "jbt/index.hpp"

namespace jbt::serialize {

// Index file: "JBTX", format version, header (n, letter bound, node count,
// pair count, flags), tagged sections of LEB128 varints, and
// a 4-byte little-endian CRC-32 (zlib) of everything before it.
constexpr std::uint64_t kVersion = 1;

std::string save(const index::Index& I);
// Throws std::runtime_error on bad magic, version, checksum or structure.
index::Index load(std::string_view bytes);

void save_file(const index::Index& I, const std::string& path);
index::Index load_file(const std::string& path);

std::uint32_t checksum(std::string_view bytes);

}  // namespace jbt::serialize
