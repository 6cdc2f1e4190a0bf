#include "rcbir/segmentation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <utility>

#include "rcbir/errors.hpp"

namespace rcbir {

namespace {

std::atomic<std::uint64_t> g_segment_calls{0};

void require_pixels(const Histogram& h) {
    if (h.total == 0) throw ValidationError("histogram is empty");
}

// Order: E, SE, S, SW, W, NW, N, NE.
constexpr std::array<std::pair<int, int>, 8> kNeighbours{{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1},
}};

}  // namespace

IterativeThreshold iterative_threshold(const Histogram& h) {
    require_pixels(h);

    double sum = 0.0;
    for (int l = 0; l < kGrayLevels; ++l) sum += static_cast<double>(l) * h.counts[l];
    double t = sum / static_cast<double>(h.total);

    int iterations = 0;
    while (iterations < kMaxThresholdIterations) {
        const long split = std::lround(t);
        double low_sum = 0.0, high_sum = 0.0;
        std::uint64_t low_n = 0, high_n = 0;
        for (int l = 0; l < kGrayLevels; ++l) {
            const auto n = h.counts[static_cast<std::size_t>(l)];
            if (l <= split) {
                low_sum += static_cast<double>(l) * n;
                low_n += n;
            } else {
                high_sum += static_cast<double>(l) * n;
                high_n += n;
            }
        }
        const double mu_low = low_n ? low_sum / static_cast<double>(low_n) : t;
        const double mu_high = high_n ? high_sum / static_cast<double>(high_n) : t;
        const double next = 0.5 * (mu_low + mu_high);
        ++iterations;
        const bool settled = std::abs(next - t) < 1e-6;
        t = next;
        if (settled) break;
    }

    return {static_cast<int>(std::clamp(std::lround(t), 0L, 255L)), iterations};
}

OtsuThreshold otsu_threshold(const Histogram& h) {
    require_pixels(h);

    // Integer running sums keep every class split that shares a partition
    // bit-identical, so plateau ties resolve to the smallest t.
    std::uint64_t total_sum = 0;
    for (int l = 0; l < kGrayLevels; ++l) total_sum += static_cast<std::uint64_t>(l) * h.counts[l];
    const double n = static_cast<double>(h.total);
    const double mu_total = static_cast<double>(total_sum) / n;

    OtsuThreshold out;
    double best = -1.0;
    std::uint64_t low_n = 0, low_sum = 0;
    for (int t = 0; t < kGrayLevels - 1; ++t) {
        low_n += h.counts[static_cast<std::size_t>(t)];
        low_sum += static_cast<std::uint64_t>(t) * h.counts[static_cast<std::size_t>(t)];
        const std::uint64_t high_n = h.total - low_n;
        double variance = 0.0;
        if (low_n != 0 && high_n != 0) {
            const double w1 = static_cast<double>(low_n) / n;
            const double w2 = static_cast<double>(high_n) / n;
            const double mu1 = static_cast<double>(low_sum) / static_cast<double>(low_n);
            const double mu2 = static_cast<double>(total_sum - low_sum) / static_cast<double>(high_n);
            variance = w1 * (mu1 - mu_total) * (mu1 - mu_total) +
                       w2 * (mu2 - mu_total) * (mu2 - mu_total);
        }
        out.between_class_variance[static_cast<std::size_t>(t)] = variance;
        if (variance > best) {
            best = variance;
            out.threshold = t;
        }
    }
    return out;
}

ThresholdReport compute_t_star(const GrayImage& img) {
    const Histogram h = histogram(img);
    const IterativeThreshold iterative = iterative_threshold(h);
    OtsuThreshold otsu = otsu_threshold(h);

    ThresholdReport report;
    report.t_iterative = iterative.threshold;
    report.iterations = iterative.iterations;
    report.t_otsu = otsu.threshold;
    report.t_star = std::min(iterative.threshold + otsu.threshold, kGrayLevels - 1);
    report.between_class_variance = otsu.between_class_variance;
    return report;
}

BinaryMask binarize(const GrayImage& img, int t_star) {
    if (t_star < 0 || t_star > 255) throw ValidationError("threshold must lie in [0, 255]");
    BinaryMask out(img.width(), img.height());
    std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(),
                   [t_star](std::uint8_t v) { return static_cast<std::uint8_t>(v > t_star); });
    return out;
}

RegionLabeling label_regions(const BinaryMask& binary) {
    RegionLabeling out;
    out.width = binary.width();
    out.height = binary.height();
    out.labels.assign(binary.size(), 0);
    out.volumes.assign(1, 0);

    std::vector<std::pair<int, int>> stack;
    std::int32_t next_label = 1;
    for (int x = 0; x < binary.width(); ++x) {
        for (int y = 0; y < binary.height(); ++y) {
            const std::size_t seed = binary.offset(x, y);
            if (!binary.pixels()[seed] || out.labels[seed] != 0) continue;

            std::int64_t volume = 0;
            out.labels[seed] = next_label;
            stack.assign(1, {x, y});
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                ++volume;
                for (const auto& [dx, dy] : kNeighbours) {
                    const int nx = cx + dx;
                    const int ny = cy + dy;
                    if (!binary.contains(nx, ny)) continue;
                    const std::size_t at = binary.offset(nx, ny);
                    if (binary.pixels()[at] && out.labels[at] == 0) {
                        out.labels[at] = next_label;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
            out.volumes.push_back(volume);
            ++next_label;
        }
    }
    out.region_count = next_label - 1;
    return out;
}

Roi select_roi(const RegionLabeling& labeling, const BinaryMask& binary) {
    if (labeling.region_count == 0) throw NoRegionError("segmentation produced no foreground region");
    if (binary.width() != labeling.width || binary.height() != labeling.height) {
        throw ValidationError("labeling and binary raster sizes differ");
    }

    Roi roi;
    for (int label = 1; label <= labeling.region_count; ++label) {
        if (labeling.volumes[static_cast<std::size_t>(label)] > roi.area) {
            roi.area = labeling.volumes[static_cast<std::size_t>(label)];
            roi.label = label;
        }
    }

    roi.mask = BinaryMask(labeling.width, labeling.height);
    roi.bbox = {labeling.width, labeling.height, -1, -1};
    for (int y = 0; y < labeling.height; ++y) {
        for (int x = 0; x < labeling.width; ++x) {
            if (labeling.label_at(x, y) != roi.label) continue;
            roi.mask.set(x, y, 1);
            roi.bbox.x1 = std::min(roi.bbox.x1, x);
            roi.bbox.y1 = std::min(roi.bbox.y1, y);
            roi.bbox.x2 = std::max(roi.bbox.x2, x);
            roi.bbox.y2 = std::max(roi.bbox.y2, y);
        }
    }
    return roi;
}

Segmentation segment(const GrayImage& img) {
    g_segment_calls.fetch_add(1, std::memory_order_relaxed);
    Segmentation out;
    out.report = compute_t_star(img);
    const BinaryMask binary = binarize(img, out.report.t_star);
    out.roi = select_roi(label_regions(binary), binary);
    return out;
}

std::uint64_t segmentation_invocations() noexcept {
    return g_segment_calls.load(std::memory_order_relaxed);
}

}  // namespace rcbir
