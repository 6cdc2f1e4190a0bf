#include "rcbir/indexing.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "rcbir/errors.hpp"
#include "rcbir/image_io.hpp"

namespace rcbir {

FeatureCalibration FeatureCalibration::from_samples(const std::vector<TextureFeatures>& samples) {
    FeatureCalibration cal;
    if (samples.empty()) return cal;
    auto init = [](double v) { return FeatureRange{v, v}; };
    auto widen = [](FeatureRange& r, double v) {
        r.min = std::min(r.min, v);
        r.max = std::max(r.max, v);
    };
    cal.energy = init(samples.front().energy);
    cal.entropy = init(samples.front().entropy);
    cal.contrast = init(samples.front().contrast);
    for (const auto& f : samples) {
        widen(cal.energy, f.energy);
        widen(cal.entropy, f.entropy);
        widen(cal.contrast, f.contrast);
    }
    return cal;
}

int quantize_feature(double value, double min, double max) noexcept {
    if (!(max > min)) return 0;
    const double v = std::clamp(value, min, max);
    const auto bin = static_cast<int>(std::floor(kQuantizationBins * (v - min) / (max - min)));
    return std::clamp(bin, 0, kQuantizationBins - 1);
}

QuantizedFeatures quantize(const TextureFeatures& f, const FeatureCalibration& cal) noexcept {
    return {quantize_feature(f.energy, cal.energy.min, cal.energy.max),
            quantize_feature(f.entropy, cal.entropy.min, cal.entropy.max),
            quantize_feature(f.contrast, cal.contrast.min, cal.contrast.max)};
}

int combined_key(const QuantizedFeatures& q) noexcept {
    return 100 * q.entropy + 10 * q.energy + q.contrast;
}

int combined_key(const TextureFeatures& f, const FeatureCalibration& cal) noexcept {
    return combined_key(quantize(f, cal));
}

int location_axis(int lo, int hi, int extent) noexcept {
    const int cell = extent / 3;
    if (cell <= 0) return 0;
    int loc = 0;
    for (int i = 1; i <= hi / cell; ++i) {
        if (std::abs(cell * i - hi) >= std::abs(cell * i - lo)) ++loc;
    }
    return std::clamp(loc, 0, 2);
}

int location_cell(const BoundingBox& bbox, int width, int height) noexcept {
    const int row = location_axis(bbox.y1, bbox.y2, height);
    const int col = location_axis(bbox.x1, bbox.x2, width);
    return row * 3 + col;
}

ImageIndex::ImageIndex(IndexMetadata metadata, FeatureCalibration calibration,
                       std::vector<IndexEntry> entries, std::vector<SkippedImage> skipped)
    : metadata_(metadata),
      calibration_(calibration),
      entries_(std::move(entries)),
      skipped_(std::move(skipped)) {
    rebuild_buckets();
}

void ImageIndex::rebuild_buckets() {
    for (auto& b : combined_buckets_) b.clear();
    for (auto& b : location_buckets_) b.clear();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const IndexEntry& e = entries_[i];
        if (e.combined_key < 0 || e.combined_key >= kCombinedKeyCount || e.location_cell < 0 ||
            e.location_cell >= kLocationCellCount) {
            throw ValidationError("entry " + e.image_id + " has an out-of-range bucket key");
        }
        combined_buckets_[static_cast<std::size_t>(e.combined_key)].push_back(
            static_cast<std::uint32_t>(i));
        location_buckets_[static_cast<std::size_t>(e.location_cell)].push_back(
            static_cast<std::uint32_t>(i));
    }
}

const std::vector<std::uint32_t>& ImageIndex::combined_bucket(int key) const {
    if (key < 0 || key >= kCombinedKeyCount) throw ValidationError("combined key out of range");
    return combined_buckets_[static_cast<std::size_t>(key)];
}

const std::vector<std::uint32_t>& ImageIndex::location_bucket(int cell) const {
    if (cell < 0 || cell >= kLocationCellCount) throw ValidationError("location cell out of range");
    return location_buckets_[static_cast<std::size_t>(cell)];
}

const IndexEntry* ImageIndex::find(std::string_view image_id) const noexcept {
    for (const auto& e : entries_) {
        if (e.image_id == image_id) return &e;
    }
    return nullptr;
}

std::vector<int> ImageIndex::occupied_combined_keys() const {
    std::vector<int> keys;
    for (int k = 0; k < kCombinedKeyCount; ++k) {
        if (!combined_buckets_[static_cast<std::size_t>(k)].empty()) keys.push_back(k);
    }
    return keys;
}

namespace {

struct Measurement {
    std::optional<IndexEntry> entry;  // keys not yet assigned
    std::optional<SkippedImage> skipped;
};

Measurement measure(const CorpusItem& item, const TextureParams& params) {
    Measurement out;
    const std::string source = item.source_path.empty() ? item.path.string() : item.source_path;
    try {
        const GrayImage img = load_image(item.path);
        const Segmentation seg = segment(img);
        IndexEntry e;
        e.image_id = item.image_id;
        e.class_label = item.class_label;
        e.features = region_texture(img, &seg.roi.mask, params);
        e.global_features = region_texture(img, nullptr, params);
        e.roi_bbox = seg.roi.bbox;
        e.roi_area = seg.roi.area;
        e.source_path = source;
        e.width = img.width();
        e.height = img.height();
        out.entry = std::move(e);
    } catch (const Error& err) {
        out.skipped = SkippedImage{item.image_id, source, err.code(), err.what()};
    }
    return out;
}

}  // namespace

ImageIndex build_index(const std::vector<CorpusItem>& corpus, const BuildOptions& options) {
    if (corpus.empty()) throw ValidationError("cannot build an index from an empty corpus");
    if (options.texture.levels < 2 || options.texture.levels > kGrayLevels) {
        throw ValidationError("tone levels must lie in [2, 256]");
    }
    if (options.texture.distance < 1) throw ValidationError("distance must be at least 1");

    // Pass 1: per-image measurement, independent across images.
    std::vector<Measurement> measured(corpus.size());
    unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(corpus.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < corpus.size(); i = next++) {
            measured[i] = measure(corpus[i], options.texture);
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    // Pass 2: calibrate on region features, then assign bucket keys.
    std::vector<IndexEntry> entries;
    std::vector<SkippedImage> skipped;
    for (auto& m : measured) {
        if (m.entry) entries.push_back(std::move(*m.entry));
        if (m.skipped) skipped.push_back(std::move(*m.skipped));
    }
    std::vector<TextureFeatures> samples;
    samples.reserve(entries.size());
    for (const auto& e : entries) samples.push_back(e.features);
    const FeatureCalibration cal = FeatureCalibration::from_samples(samples);
    for (auto& e : entries) {
        e.combined_key = combined_key(e.features, cal);
        e.location_cell = location_cell(e.roi_bbox, e.width, e.height);
    }

    IndexMetadata meta;
    meta.levels = options.texture.levels;
    meta.distance = options.texture.distance;
    meta.created_unix = options.created_unix.value_or(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
    return ImageIndex(meta, cal, std::move(entries), std::move(skipped));
}

namespace {

bool is_supported_image(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".gif" || ext == ".bmp" || ext == ".pgm";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

std::vector<CorpusItem> scan_corpus(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw IoError(root.string() + " is not a directory");

    std::vector<CorpusItem> items;
    const fs::path manifest = root / "manifest.csv";
    if (fs::exists(manifest)) {
        std::ifstream in(manifest);
        if (!in) throw IoError("cannot open " + manifest.string());
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (header) {
                header = false;
                if (line.rfind("image_id,", 0) == 0) continue;
            }
            const auto f = split_csv_line(line);
            if (f.size() < 3) throw ValidationError("malformed manifest line: " + line);
            CorpusItem item;
            item.image_id = f[0];
            if (!f[1].empty()) item.class_label = f[1];
            item.path = root / f[2];
            item.source_path = f[2];
            items.push_back(std::move(item));
        }
    } else {
        for (const auto& de : fs::recursive_directory_iterator(root)) {
            if (!de.is_regular_file() || !is_supported_image(de.path())) continue;
            CorpusItem item;
            const fs::path rel = fs::relative(de.path(), root);
            item.image_id = rel.parent_path().empty() ? rel.stem().string()
                                                      : (rel.parent_path() / rel.stem()).generic_string();
            if (!rel.parent_path().empty()) item.class_label = rel.parent_path().filename().string();
            item.path = de.path();
            item.source_path = rel.generic_string();
            items.push_back(std::move(item));
        }
    }
    std::sort(items.begin(), items.end(),
              [](const CorpusItem& a, const CorpusItem& b) { return a.image_id < b.image_id; });
    return items;
}

}  // namespace rcbir
