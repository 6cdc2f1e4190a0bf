#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rcbir::detail {

struct RgbFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // interleaved R, G, B
};

/// Decodes the first image of a GIF87a/GIF89a stream onto its logical screen.
/// Throws IoError on truncated or malformed data.
RgbFrame decode_gif(std::span<const std::uint8_t> bytes);

}  // namespace rcbir::detail
