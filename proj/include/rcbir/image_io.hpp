#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "rcbir/image.hpp"

namespace rcbir {

enum class ImageFormat { Png, Gif, Bmp, Pgm, Unknown };

/// Identifies the container from its magic bytes.
[[nodiscard]] ImageFormat sniff_format(std::span<const std::uint8_t> bytes) noexcept;
[[nodiscard]] std::string_view mime_type(ImageFormat format) noexcept;

/// ITU-R 601 luma with round-half-up, computed in integers so it is exact.
[[nodiscard]] constexpr std::uint8_t luminance(std::uint8_t r, std::uint8_t g,
                                               std::uint8_t b) noexcept {
    return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

/// Decodes PNG, GIF, BMP or PGM bytes into an 8-bit gray image. Colour inputs
/// are reduced to luminance, 16-bit samples are right-shifted to 8 bits and
/// any alpha channel is ignored.
///
/// Throws FormatError for unrecognised containers and IoError when a
/// recognised container cannot be decoded (truncated or corrupt data).
[[nodiscard]] GrayImage decode_image(std::span<const std::uint8_t> bytes);

[[nodiscard]] GrayImage load_image(const std::filesystem::path& path);

[[nodiscard]] std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Binary PGM (P5), maxval 255.
[[nodiscard]] std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
[[nodiscard]] std::vector<std::uint8_t> encode_png(const GrayImage& img);

void write_pgm(const std::filesystem::path& path, const GrayImage& img);
void write_png(const std::filesystem::path& path, const GrayImage& img);

/// Foreground becomes 255 so the mask is visible when dumped.
[[nodiscard]] GrayImage mask_to_image(const BinaryMask& mask);

/// Area-averaged downscale so the longest side is at most max_side.
/// Images already small enough are returned unchanged.
[[nodiscard]] GrayImage make_thumbnail(const GrayImage& img, int max_side);

}  // namespace rcbir
