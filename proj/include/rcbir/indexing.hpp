#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rcbir/segmentation.hpp"
#include "rcbir/texture.hpp"

namespace rcbir {

inline constexpr int kQuantizationBins = 10;
inline constexpr int kCombinedKeyCount = 1000;
inline constexpr int kLocationCellCount = 9;

struct FeatureRange {
    double min = 0.0;
    double max = 0.0;
    friend bool operator==(const FeatureRange&, const FeatureRange&) = default;
};

/// Corpus-wide min/max per feature; frozen into the index and reused for
/// every query.
struct FeatureCalibration {
    FeatureRange energy;
    FeatureRange entropy;
    FeatureRange contrast;

    [[nodiscard]] static FeatureCalibration from_samples(const std::vector<TextureFeatures>& samples);
    friend bool operator==(const FeatureCalibration&, const FeatureCalibration&) = default;
};

struct QuantizedFeatures {
    int energy = 0;
    int entropy = 0;
    int contrast = 0;
};

/// Affine map of [min, max] onto bins 0..9; values are clamped first and
/// value == max lands in bin 9. A zero-width range always gives 0.
[[nodiscard]] int quantize_feature(double value, double min, double max) noexcept;
[[nodiscard]] QuantizedFeatures quantize(const TextureFeatures& f, const FeatureCalibration& cal) noexcept;

/// 100 * [entropy] + 10 * [energy] + [contrast].
[[nodiscard]] int combined_key(const QuantizedFeatures& q) noexcept;
[[nodiscard]] int combined_key(const TextureFeatures& f, const FeatureCalibration& cal) noexcept;

/// Which third of an axis a [lo, hi] span covers most, using the grid
/// walk: with cell size c = extent / 3, step i = 1 .. hi / c advances the
/// index whenever the boundary c * i is no closer to lo than to hi. The
/// result is clamped to [0, 2].
[[nodiscard]] int location_axis(int lo, int hi, int extent) noexcept;

/// 3x3 grid cell numbered row-major: rows from the vertical span, columns
/// from the horizontal span.
[[nodiscard]] int location_cell(const BoundingBox& bbox, int width, int height) noexcept;

struct IndexEntry {
    std::string image_id;
    std::optional<std::string> class_label;
    TextureFeatures features;         // region of interest
    TextureFeatures global_features;  // whole image, for the unindexed baseline
    BoundingBox roi_bbox;
    std::int64_t roi_area = 0;
    int location_cell = 0;
    int combined_key = 0;
    std::string source_path;  // relative to the corpus root when built from a directory
    int width = 0;
    int height = 0;

    friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

struct SkippedImage {
    std::string image_id;
    std::string source_path;
    std::string reason;  // error code, e.g. "no_region"
    std::string detail;

    friend bool operator==(const SkippedImage&, const SkippedImage&) = default;
};

struct IndexMetadata {
    int version = 1;
    int levels = kDefaultToneLevels;
    int distance = kDefaultDistance;
    std::int64_t created_unix = 0;

    friend bool operator==(const IndexMetadata&, const IndexMetadata&) = default;
};

/// Hash-bucket store. Buckets hold positions into `entries`; they are
/// derived data and rebuilt by rebuild_buckets().
class ImageIndex {
public:
    ImageIndex() = default;
    ImageIndex(IndexMetadata metadata, FeatureCalibration calibration,
               std::vector<IndexEntry> entries, std::vector<SkippedImage> skipped = {});

    [[nodiscard]] const IndexMetadata& metadata() const noexcept { return metadata_; }
    [[nodiscard]] const FeatureCalibration& calibration() const noexcept { return calibration_; }
    [[nodiscard]] const std::vector<IndexEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] const std::vector<SkippedImage>& skipped() const noexcept { return skipped_; }

    [[nodiscard]] const std::vector<std::uint32_t>& combined_bucket(int key) const;
    [[nodiscard]] const std::vector<std::uint32_t>& location_bucket(int cell) const;

    [[nodiscard]] const IndexEntry* find(std::string_view image_id) const noexcept;

    /// Non-empty combined buckets, in key order.
    [[nodiscard]] std::vector<int> occupied_combined_keys() const;

    friend bool operator==(const ImageIndex& a, const ImageIndex& b) {
        return a.metadata_ == b.metadata_ && a.calibration_ == b.calibration_ &&
               a.entries_ == b.entries_ && a.skipped_ == b.skipped_;
    }

private:
    void rebuild_buckets();

    IndexMetadata metadata_;
    FeatureCalibration calibration_;
    std::vector<IndexEntry> entries_;
    std::vector<SkippedImage> skipped_;
    std::array<std::vector<std::uint32_t>, kCombinedKeyCount> combined_buckets_{};
    std::array<std::vector<std::uint32_t>, kLocationCellCount> location_buckets_{};
};

struct CorpusItem {
    std::string image_id;
    std::optional<std::string> class_label;
    std::filesystem::path path;
    std::string source_path;  // what the index records; defaults to path
};

struct BuildOptions {
    TextureParams texture;
    unsigned threads = 0;  // 0 = hardware concurrency
    std::optional<std::int64_t> created_unix;
};

/// Segments every image, measures region and whole-image texture, calibrates
/// quantization over the region features and fills both bucket maps. Images
/// that fail to load or segment go to the skip list. Throws ValidationError
/// for an empty corpus.
[[nodiscard]] ImageIndex build_index(const std::vector<CorpusItem>& corpus,
                                     const BuildOptions& options = {});

/// Reads `manifest.csv` (image_id,class_label,path[,...]) if present;
/// otherwise collects every supported image under root, labelled by its
/// parent directory when that is not root itself and identified by its
/// relative path without extension. Sorted by image id.
[[nodiscard]] std::vector<CorpusItem> scan_corpus(const std::filesystem::path& root);

}  // namespace rcbir
