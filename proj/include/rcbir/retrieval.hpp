#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rcbir/indexing.hpp"

namespace rcbir {

enum class Mode { Rbir, Lbir, Cbir };

[[nodiscard]] std::string_view to_string(Mode mode) noexcept;
/// Accepts "rbir", "lbir" or "cbir" (any case).
[[nodiscard]] std::optional<Mode> parse_mode(std::string_view text) noexcept;

[[nodiscard]] double euclidean_distance(const TextureFeatures& a, const TextureFeatures& b) noexcept;

struct RankedHit {
    std::string image_id;
    std::optional<std::string> class_label;
    double distance = 0.0;
    int combined_key = 0;
    int location_cell = 0;
    BoundingBox roi_bbox;
};

struct QueryResult {
    Mode mode = Mode::Rbir;
    TextureFeatures query_features;
    std::optional<int> query_key;  // bucket id; empty for the full-scan baseline
    std::optional<BoundingBox> query_bbox;
    std::size_t candidates_examined = 0;
    std::vector<RankedHit> hits;  // ascending distance, ties by image id
};

struct QueryOptions {
    Mode mode = Mode::Rbir;
    std::size_t k = 10;
    /// Removes this image from the candidates before ranking (leave-one-out).
    std::optional<std::string> exclude_id;
};

/// What a query needs to know about its image. Built either from pixels or
/// from an entry already in the index.
struct QueryProbe {
    TextureFeatures region_features;
    TextureFeatures global_features;
    std::optional<BoundingBox> roi_bbox;
    int width = 0;
    int height = 0;
};

/// Measures a query image. Segmentation runs only for the indexed modes;
/// throws QuerySegmentationError when that finds no usable region.
[[nodiscard]] QueryProbe probe_image(const GrayImage& img, Mode mode, const TextureParams& params);
[[nodiscard]] QueryProbe probe_entry(const IndexEntry& entry);

/// RBIR scans the combined-key bucket, LBIR the location bucket and CBIR
/// every entry using whole-image features.
[[nodiscard]] QueryResult run_query(const ImageIndex& index, const QueryProbe& probe,
                                    const QueryOptions& options);

/// Query by example. Throws ValidationError for an empty index or k == 0.
[[nodiscard]] QueryResult query(const ImageIndex& index, const GrayImage& img,
                                const QueryOptions& options);

}  // namespace rcbir
