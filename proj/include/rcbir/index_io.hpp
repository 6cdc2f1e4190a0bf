#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "rcbir/indexing.hpp"

namespace rcbir {

inline constexpr std::string_view kIndexMagic = "RCBIR";
inline constexpr std::uint8_t kIndexFormatVersion = 1;

// Layout: magic, version byte, little-endian integers, IEEE-754 doubles,
// u32 length-prefixed strings, then a CRC-32 of every preceding byte.
[[nodiscard]] std::vector<std::uint8_t> serialize_index(const ImageIndex& index);

/// Throws CorruptIndexError on a bad magic, checksum or structure and
/// VersionError on an unknown format version.
[[nodiscard]] ImageIndex deserialize_index(std::span<const std::uint8_t> bytes);

void save_index(const ImageIndex& index, const std::filesystem::path& path);
[[nodiscard]] ImageIndex load_index(const std::filesystem::path& path);

}  // namespace rcbir
