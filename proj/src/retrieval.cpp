#include "rcbir/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "rcbir/errors.hpp"

namespace rcbir {

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
        case Mode::Rbir: return "rbir";
        case Mode::Lbir: return "lbir";
        case Mode::Cbir: return "cbir";
    }
    return "?";
}

std::optional<Mode> parse_mode(std::string_view text) noexcept {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "rbir") return Mode::Rbir;
    if (lower == "lbir") return Mode::Lbir;
    if (lower == "cbir") return Mode::Cbir;
    return std::nullopt;
}

double euclidean_distance(const TextureFeatures& a, const TextureFeatures& b) noexcept {
    const double de = a.energy - b.energy;
    const double dn = a.entropy - b.entropy;
    const double dc = a.contrast - b.contrast;
    return std::sqrt(de * de + dn * dn + dc * dc);
}

QueryProbe probe_image(const GrayImage& img, Mode mode, const TextureParams& params) {
    QueryProbe probe;
    probe.width = img.width();
    probe.height = img.height();
    if (mode == Mode::Cbir) {
        probe.global_features = region_texture(img, nullptr, params);
        return probe;
    }
    try {
        const Segmentation seg = segment(img);
        probe.region_features = region_texture(img, &seg.roi.mask, params);
        probe.roi_bbox = seg.roi.bbox;
    } catch (const NoRegionError& e) {
        throw QuerySegmentationError(std::string("query image: ") + e.what());
    } catch (const DegenerateRegionError& e) {
        throw QuerySegmentationError(std::string("query image: ") + e.what());
    }
    return probe;
}

QueryProbe probe_entry(const IndexEntry& entry) {
    QueryProbe probe;
    probe.region_features = entry.features;
    probe.global_features = entry.global_features;
    probe.roi_bbox = entry.roi_bbox;
    probe.width = entry.width;
    probe.height = entry.height;
    return probe;
}

QueryResult run_query(const ImageIndex& index, const QueryProbe& probe, const QueryOptions& options) {
    if (index.entries().empty()) throw ValidationError("index holds no entries");
    if (options.k == 0) throw ValidationError("k must be at least 1");

    QueryResult result;
    result.mode = options.mode;
    result.query_bbox = probe.roi_bbox;

    const auto& entries = index.entries();
    std::vector<std::uint32_t> all;
    const std::vector<std::uint32_t>* candidates = nullptr;
    switch (options.mode) {
        case Mode::Rbir:
            result.query_features = probe.region_features;
            result.query_key = combined_key(probe.region_features, index.calibration());
            candidates = &index.combined_bucket(*result.query_key);
            break;
        case Mode::Lbir:
            if (!probe.roi_bbox) throw ValidationError("location query needs a region");
            result.query_features = probe.region_features;
            result.query_key = location_cell(*probe.roi_bbox, probe.width, probe.height);
            candidates = &index.location_bucket(*result.query_key);
            break;
        case Mode::Cbir:
            result.query_features = probe.global_features;
            all.resize(entries.size());
            for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
            candidates = &all;
            break;
    }
    result.candidates_examined = candidates->size();

    const bool global = options.mode == Mode::Cbir;
    result.hits.reserve(candidates->size());
    for (std::uint32_t pos : *candidates) {
        const IndexEntry& e = entries[pos];
        if (options.exclude_id && e.image_id == *options.exclude_id) continue;
        RankedHit hit;
        hit.image_id = e.image_id;
        hit.class_label = e.class_label;
        hit.distance = euclidean_distance(result.query_features, global ? e.global_features : e.features);
        hit.combined_key = e.combined_key;
        hit.location_cell = e.location_cell;
        hit.roi_bbox = e.roi_bbox;
        result.hits.push_back(std::move(hit));
    }

    auto before = [](const RankedHit& a, const RankedHit& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.image_id < b.image_id;
    };
    const std::size_t keep = std::min(options.k, result.hits.size());
    std::partial_sort(result.hits.begin(), result.hits.begin() + static_cast<std::ptrdiff_t>(keep),
                      result.hits.end(), before);
    result.hits.resize(keep);
    return result;
}

QueryResult query(const ImageIndex& index, const GrayImage& img, const QueryOptions& options) {
    if (index.entries().empty()) throw ValidationError("index holds no entries");
    if (options.k == 0) throw ValidationError("k must be at least 1");
    const TextureParams params{index.metadata().levels, index.metadata().distance};
    return run_query(index, probe_image(img, options.mode, params), options);
}

}  // namespace rcbir
