#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rcbir/image.hpp"

namespace rcbir {

inline constexpr int kDefaultToneLevels = 16;
inline constexpr int kDefaultDistance = 1;

enum class Angle { Deg0, Deg45, Deg90, Deg135 };
inline constexpr std::array<Angle, 4> kAllAngles{Angle::Deg0, Angle::Deg45, Angle::Deg90,
                                                 Angle::Deg135};

[[nodiscard]] std::string_view to_string(Angle angle) noexcept;

/// Gray levels reduced to `levels` tones; pixels outside the mask are kAbsent.
struct ToneRaster {
    static constexpr std::int16_t kAbsent = -1;

    int width = 0;
    int height = 0;
    int levels = 0;
    std::vector<std::int16_t> tones;  // row-major

    [[nodiscard]] std::int16_t at(int x, int y) const noexcept {
        return tones[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                     static_cast<std::size_t>(x)];
    }
};

/// tone = floor(pixel * levels / 256). Throws ValidationError unless
/// levels is in [2, 256] and the mask (if any) matches the image size.
[[nodiscard]] ToneRaster quantize_gray(const GrayImage& img, const BinaryMask* mask, int levels);

/// Gray-tone spatial-dependence matrix for one angle and distance.
struct CooccurrenceMatrix {
    int levels = 0;
    Angle angle = Angle::Deg0;
    int distance = 1;
    std::vector<std::uint64_t> counts;  // levels x levels, row-major
    std::vector<double> probabilities;  // counts / total, or all zero
    std::uint64_t total = 0;

    [[nodiscard]] std::uint64_t count(int i, int j) const noexcept {
        return counts[static_cast<std::size_t>(i) * static_cast<std::size_t>(levels) +
                      static_cast<std::size_t>(j)];
    }
    [[nodiscard]] double probability(int i, int j) const noexcept {
        return probabilities[static_cast<std::size_t>(i) * static_cast<std::size_t>(levels) +
                             static_cast<std::size_t>(j)];
    }
};

/// Every unordered pair of present cells at the given displacement adds one
/// to both (i, j) and (j, i), so the counts are symmetric.
[[nodiscard]] CooccurrenceMatrix cooccurrence(const ToneRaster& tones, Angle angle, int distance);

struct TextureFeatures {
    double energy = 0.0;
    double entropy = 0.0;  // bits
    double contrast = 0.0;

    friend bool operator==(const TextureFeatures&, const TextureFeatures&) = default;
};

/// energy = sum p^2, entropy = -sum p log2 p, contrast = sum_n n^2 P(|i-j| = n).
[[nodiscard]] TextureFeatures features_from_probabilities(std::span<const double> p, int levels);
[[nodiscard]] TextureFeatures features_from_matrix(const CooccurrenceMatrix& m);

struct TextureParams {
    int levels = kDefaultToneLevels;
    int distance = kDefaultDistance;
};

/// Builds the four angular matrices over the masked pixels (or the whole
/// image when mask is null), averages the probability matrices of the angles
/// that saw at least one pair and derives one feature triple from the mean.
/// Throws DegenerateRegionError when no angle has a pair.
[[nodiscard]] TextureFeatures region_texture(const GrayImage& img, const BinaryMask* mask,
                                             const TextureParams& params = {});

}  // namespace rcbir
