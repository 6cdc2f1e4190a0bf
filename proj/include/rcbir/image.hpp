#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcbir/errors.hpp"

namespace rcbir {

inline constexpr int kGrayLevels = 256;

/// Row-major 2-D raster. The tag parameter keeps gray images, binary masks and
/// quantized tone maps from being mixed up at call sites.
template <typename T, typename Tag>
class Raster {
public:
    using value_type = T;

    Raster() = default;

    Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
        check_dimensions(width, height);
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    Raster(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        check_dimensions(width, height);
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw ValidationError("pixel count " + std::to_string(data_.size()) +
                                  " does not match " + std::to_string(width) + "x" +
                                  std::to_string(height));
        }
    }

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] bool contains(int x, int y) const noexcept {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }
    [[nodiscard]] std::size_t offset(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    [[nodiscard]] T at(int x, int y) const noexcept { return data_[offset(x, y)]; }
    void set(int x, int y, T value) noexcept { data_[offset(x, y)] = value; }

    [[nodiscard]] std::span<const T> pixels() const noexcept { return data_; }
    [[nodiscard]] std::span<T> pixels() noexcept { return data_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    static void check_dimensions(int width, int height) {
        if (width < 1 || height < 1) {
            throw ValidationError("image dimensions must be positive, got " +
                                  std::to_string(width) + "x" + std::to_string(height));
        }
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

struct GrayTag;
struct MaskTag;

/// 8-bit grayscale image, f(x, y) in [0, 255].
using GrayImage = Raster<std::uint8_t, GrayTag>;

/// Binary raster holding 0 (background) or 1 (foreground).
using BinaryMask = Raster<std::uint8_t, MaskTag>;

struct Histogram {
    std::array<std::uint64_t, kGrayLevels> counts{};
    std::uint64_t total = 0;

    [[nodiscard]] double probability(int level) const noexcept {
        return total == 0 ? 0.0
                          : static_cast<double>(counts[static_cast<std::size_t>(level)]) /
                                static_cast<double>(total);
    }

    /// Builds a histogram from raw counts; total is their sum.
    static Histogram from_counts(std::span<const std::uint64_t> counts);
};

[[nodiscard]] Histogram histogram(const GrayImage& img);
[[nodiscard]] double mean_gray(const GrayImage& img);

[[nodiscard]] std::size_t count_foreground(const BinaryMask& mask) noexcept;

}  // namespace rcbir
