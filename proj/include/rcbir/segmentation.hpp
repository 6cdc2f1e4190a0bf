#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rcbir/image.hpp"

namespace rcbir {

struct IterativeThreshold {
    int threshold = 0;
    int iterations = 0;
};

struct OtsuThreshold {
    int threshold = 0;
    /// Between-class variance for every t; entries with an empty class, and
    /// t = 255, are 0.
    std::array<double, kGrayLevels> between_class_variance{};
};

struct ThresholdReport {
    int t_iterative = 0;
    int t_otsu = 0;
    int t_star = 0;  // min(t_iterative + t_otsu, 255)
    int iterations = 0;
    std::array<double, kGrayLevels> between_class_variance{};
};

/// Hard cap on refinement rounds of the iterative threshold.
inline constexpr int kMaxThresholdIterations = 256;

/// Isodata-style threshold: start from the mean gray level and move to the
/// midpoint of the two class means until the estimate stops changing
/// (|delta| < 1e-6, at most 256 rounds). Classes are split at the rounded
/// estimate; an empty class takes the current estimate as its mean.
[[nodiscard]] IterativeThreshold iterative_threshold(const Histogram& h);

/// Otsu's method over t in [0, 254]; ties resolve to the smallest t.
[[nodiscard]] OtsuThreshold otsu_threshold(const Histogram& h);

[[nodiscard]] ThresholdReport compute_t_star(const GrayImage& img);

/// 1 where f(x, y) > t_star, otherwise 0.
[[nodiscard]] BinaryMask binarize(const GrayImage& img, int t_star);

struct RegionLabeling {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;  // row-major, 0 = background
    int region_count = 0;
    std::vector<std::int64_t> volumes;  // indexed by label; volumes[0] is unused

    [[nodiscard]] std::int32_t label_at(int x, int y) const noexcept {
        return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
    }
};

/// 8-connected components. Pixels are scanned column by column (x outer, y
/// inner) and each unvisited foreground pixel seeds a flood fill that takes
/// the next label, so labels follow discovery order starting at 1.
[[nodiscard]] RegionLabeling label_regions(const BinaryMask& binary);

struct BoundingBox {
    int x1 = 0;  // inclusive
    int y1 = 0;
    int x2 = 0;
    int y2 = 0;

    [[nodiscard]] int width() const noexcept { return x2 - x1 + 1; }
    [[nodiscard]] int height() const noexcept { return y2 - y1 + 1; }
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Roi {
    int label = 0;
    BinaryMask mask;
    BoundingBox bbox;
    std::int64_t area = 0;
};

/// Largest cluster; ties go to the smaller label. Throws NoRegionError when
/// there is no foreground.
[[nodiscard]] Roi select_roi(const RegionLabeling& labeling, const BinaryMask& binary);

struct Segmentation {
    Roi roi;
    ThresholdReport report;
};

/// Full pipeline: threshold, binarize, label, keep the largest cluster.
[[nodiscard]] Segmentation segment(const GrayImage& img);

/// Number of segment() calls made by this process. Lets tests confirm that
/// paths which should not segment really do not.
[[nodiscard]] std::uint64_t segmentation_invocations() noexcept;

}  // namespace rcbir
