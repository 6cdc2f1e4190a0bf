#include "rcbir/texture.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rcbir/errors.hpp"

namespace rcbir {

namespace {

struct Offset {
    int dx;
    int dy;
};

// One representative displacement per angle; the opposite one is covered by
// counting both orders of each pair. Rows grow downwards, so 45 degrees
// points up and to the right.
Offset forward_offset(Angle angle, int d) noexcept {
    switch (angle) {
        case Angle::Deg0: return {d, 0};
        case Angle::Deg45: return {d, -d};
        case Angle::Deg90: return {0, d};
        case Angle::Deg135: return {d, d};
    }
    return {d, 0};
}

}  // namespace

std::string_view to_string(Angle angle) noexcept {
    switch (angle) {
        case Angle::Deg0: return "0";
        case Angle::Deg45: return "45";
        case Angle::Deg90: return "90";
        case Angle::Deg135: return "135";
    }
    return "?";
}

ToneRaster quantize_gray(const GrayImage& img, const BinaryMask* mask, int levels) {
    if (levels < 2 || levels > kGrayLevels) {
        throw ValidationError("tone levels must lie in [2, 256], got " + std::to_string(levels));
    }
    if (mask && (mask->width() != img.width() || mask->height() != img.height())) {
        throw ValidationError("mask size does not match image size");
    }
    ToneRaster out{img.width(), img.height(), levels, std::vector<std::int16_t>(img.size())};
    const auto pixels = img.pixels();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        if (mask && !mask->pixels()[i]) {
            out.tones[i] = ToneRaster::kAbsent;
        } else {
            out.tones[i] = static_cast<std::int16_t>(pixels[i] * levels / kGrayLevels);
        }
    }
    return out;
}

CooccurrenceMatrix cooccurrence(const ToneRaster& tones, Angle angle, int distance) {
    if (distance < 1) throw ValidationError("co-occurrence distance must be at least 1");

    const auto n = static_cast<std::size_t>(tones.levels);
    CooccurrenceMatrix m;
    m.levels = tones.levels;
    m.angle = angle;
    m.distance = distance;
    m.counts.assign(n * n, 0);
    m.probabilities.assign(n * n, 0.0);

    const Offset off = forward_offset(angle, distance);
    const int y_begin = std::max(0, -off.dy);
    const int y_end = std::min(tones.height, tones.height - off.dy);
    const int x_end = std::min(tones.width, tones.width - off.dx);
    for (int y = y_begin; y < y_end; ++y) {
        for (int x = 0; x < x_end; ++x) {
            const std::int16_t a = tones.at(x, y);
            const std::int16_t b = tones.at(x + off.dx, y + off.dy);
            if (a == ToneRaster::kAbsent || b == ToneRaster::kAbsent) continue;
            ++m.counts[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)];
            ++m.counts[static_cast<std::size_t>(b) * n + static_cast<std::size_t>(a)];
            m.total += 2;
        }
    }

    if (m.total > 0) {
        const double scale = 1.0 / static_cast<double>(m.total);
        for (std::size_t i = 0; i < m.counts.size(); ++i) {
            m.probabilities[i] = static_cast<double>(m.counts[i]) * scale;
        }
    }
    return m;
}

TextureFeatures features_from_probabilities(std::span<const double> p, int levels) {
    const auto n = static_cast<std::size_t>(levels);
    if (p.size() != n * n) throw ValidationError("probability matrix has the wrong size");

    TextureFeatures f;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = p[i * n + j];
            if (v <= 0.0) continue;
            f.energy += v * v;
            f.entropy -= v * std::log2(v);
            const double diff = static_cast<double>(i > j ? i - j : j - i);
            f.contrast += diff * diff * v;
        }
    }
    return f;
}

TextureFeatures features_from_matrix(const CooccurrenceMatrix& m) {
    return features_from_probabilities(m.probabilities, m.levels);
}

TextureFeatures region_texture(const GrayImage& img, const BinaryMask* mask,
                               const TextureParams& params) {
    const ToneRaster tones = quantize_gray(img, mask, params.levels);
    const auto n = static_cast<std::size_t>(params.levels);
    std::vector<double> mean(n * n, 0.0);
    int used = 0;
    for (Angle angle : kAllAngles) {
        const CooccurrenceMatrix m = cooccurrence(tones, angle, params.distance);
        if (m.total == 0) continue;
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += m.probabilities[i];
        ++used;
    }
    if (used == 0) throw DegenerateRegionError("region has no pair of neighbouring pixels");
    for (double& v : mean) v /= used;
    return features_from_probabilities(mean, params.levels);
}

}  // namespace rcbir
