#include "rcbir/image.hpp"

#include <algorithm>
#include <numeric>

#include "rcbir/errors.hpp"

namespace rcbir {

Histogram Histogram::from_counts(std::span<const std::uint64_t> counts) {
    if (counts.size() != static_cast<std::size_t>(kGrayLevels)) {
        throw ValidationError("histogram needs exactly 256 bins");
    }
    Histogram h;
    std::copy(counts.begin(), counts.end(), h.counts.begin());
    h.total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    return h;
}

Histogram histogram(const GrayImage& img) {
    Histogram h;
    for (std::uint8_t v : img.pixels()) ++h.counts[v];
    h.total = img.size();
    return h;
}

double mean_gray(const GrayImage& img) {
    if (img.empty()) return 0.0;
    std::uint64_t sum = 0;
    for (std::uint8_t v : img.pixels()) sum += v;
    return static_cast<double>(sum) / static_cast<double>(img.size());
}

std::size_t count_foreground(const BinaryMask& mask) noexcept {
    return static_cast<std::size_t>(
        std::count_if(mask.pixels().begin(), mask.pixels().end(), [](auto v) { return v != 0; }));
}

}  // namespace rcbir
