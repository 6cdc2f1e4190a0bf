#include "rcbir/index_io.hpp"

#include <bit>
#include <string>

#include <zlib.h>

#include "rcbir/errors.hpp"
#include "rcbir/image_io.hpp"

namespace rcbir {

namespace {

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { put_le(v, 2); }
    void u32(std::uint32_t v) { put_le(v, 4); }
    void i32(std::int32_t v) { put_le(static_cast<std::uint32_t>(v), 4); }
    void i64(std::int64_t v) { put_le(static_cast<std::uint64_t>(v), 8); }
    void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v), 8); }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_.insert(out_.end(), s.begin(), s.end());
    }
    void features(const TextureFeatures& f) {
        f64(f.energy);
        f64(f.entropy);
        f64(f.contrast);
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }
    std::span<const std::uint8_t> bytes() const { return out_; }

private:
    void put_le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get_le(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get_le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
    std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(get_le(4))); }
    std::int64_t i64() { return static_cast<std::int64_t>(get_le(8)); }
    double f64() { return std::bit_cast<double>(get_le(8)); }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    TextureFeatures features() {
        TextureFeatures f;
        f.energy = f64();
        f.entropy = f64();
        f.contrast = f64();
        return f;
    }
    // Guards element counts against the bytes that remain.
    std::uint32_t count(std::size_t min_element_bytes) {
        const std::uint32_t n = u32();
        if (static_cast<std::uint64_t>(n) * min_element_bytes > bytes_.size() - pos_) {
            throw CorruptIndexError("index element count exceeds file size");
        }
        return n;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (n > bytes_.size() - pos_) throw CorruptIndexError("index file is truncated");
    }
    std::uint64_t get_le(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void write_range(Writer& w, const FeatureRange& r) {
    w.f64(r.min);
    w.f64(r.max);
}

FeatureRange read_range(Reader& r) {
    FeatureRange out;
    out.min = r.f64();
    out.max = r.f64();
    return out;
}

}  // namespace

std::vector<std::uint8_t> serialize_index(const ImageIndex& index) {
    Writer w;
    for (char c : kIndexMagic) w.u8(static_cast<std::uint8_t>(c));
    w.u8(kIndexFormatVersion);

    const IndexMetadata& meta = index.metadata();
    w.u32(static_cast<std::uint32_t>(meta.levels));
    w.u32(static_cast<std::uint32_t>(meta.distance));
    w.i64(meta.created_unix);

    const FeatureCalibration& cal = index.calibration();
    write_range(w, cal.energy);
    write_range(w, cal.entropy);
    write_range(w, cal.contrast);

    w.u32(static_cast<std::uint32_t>(index.entries().size()));
    for (const IndexEntry& e : index.entries()) {
        w.str(e.image_id);
        w.u8(e.class_label.has_value() ? 1 : 0);
        w.str(e.class_label.value_or(""));
        w.features(e.features);
        w.features(e.global_features);
        w.i32(e.roi_bbox.x1);
        w.i32(e.roi_bbox.y1);
        w.i32(e.roi_bbox.x2);
        w.i32(e.roi_bbox.y2);
        w.i64(e.roi_area);
        w.u8(static_cast<std::uint8_t>(e.location_cell));
        w.u16(static_cast<std::uint16_t>(e.combined_key));
        w.str(e.source_path);
        w.u32(static_cast<std::uint32_t>(e.width));
        w.u32(static_cast<std::uint32_t>(e.height));
    }

    w.u32(static_cast<std::uint32_t>(index.skipped().size()));
    for (const SkippedImage& s : index.skipped()) {
        w.str(s.image_id);
        w.str(s.source_path);
        w.str(s.reason);
        w.str(s.detail);
    }

    w.u32(crc32_of(w.bytes()));
    return w.take();
}

ImageIndex deserialize_index(std::span<const std::uint8_t> bytes) {
    constexpr std::size_t kHeader = kIndexMagic.size() + 1;
    if (bytes.size() < kHeader + 4) throw CorruptIndexError("index file is too short");
    for (std::size_t i = 0; i < kIndexMagic.size(); ++i) {
        if (bytes[i] != static_cast<std::uint8_t>(kIndexMagic[i])) {
            throw CorruptIndexError("not an index file (bad magic)");
        }
    }
    const std::uint8_t version = bytes[kIndexMagic.size()];
    if (version != kIndexFormatVersion) {
        throw VersionError("unsupported index format version " + std::to_string(version));
    }

    const auto body = bytes.first(bytes.size() - 4);
    Reader trailer(bytes.last(4));
    if (trailer.u32() != crc32_of(body)) throw CorruptIndexError("index checksum mismatch");

    Reader r(body.subspan(kHeader));
    IndexMetadata meta;
    meta.version = version;
    meta.levels = static_cast<int>(r.u32());
    meta.distance = static_cast<int>(r.u32());
    meta.created_unix = r.i64();
    if (meta.levels < 2 || meta.levels > kGrayLevels || meta.distance < 1) {
        throw CorruptIndexError("index texture parameters out of range");
    }

    FeatureCalibration cal;
    cal.energy = read_range(r);
    cal.entropy = read_range(r);
    cal.contrast = read_range(r);

    // Smallest possible serialized entry: fixed fields plus empty strings.
    constexpr std::size_t kMinEntryBytes = 4 + 1 + 4 + 48 + 16 + 8 + 1 + 2 + 4 + 8;
    std::vector<IndexEntry> entries(r.count(kMinEntryBytes));
    for (IndexEntry& e : entries) {
        e.image_id = r.str();
        const std::uint8_t has_label = r.u8();
        std::string label = r.str();
        if (has_label > 1) throw CorruptIndexError("invalid label flag");
        if (has_label) e.class_label = std::move(label);
        e.features = r.features();
        e.global_features = r.features();
        e.roi_bbox.x1 = r.i32();
        e.roi_bbox.y1 = r.i32();
        e.roi_bbox.x2 = r.i32();
        e.roi_bbox.y2 = r.i32();
        e.roi_area = r.i64();
        e.location_cell = r.u8();
        e.combined_key = r.u16();
        e.source_path = r.str();
        e.width = static_cast<int>(r.u32());
        e.height = static_cast<int>(r.u32());

        if (e.combined_key != combined_key(e.features, cal) ||
            e.location_cell != location_cell(e.roi_bbox, e.width, e.height)) {
            throw CorruptIndexError("entry " + e.image_id + " does not match its bucket keys");
        }
    }

    std::vector<SkippedImage> skipped(r.count(16));
    for (SkippedImage& s : skipped) {
        s.image_id = r.str();
        s.source_path = r.str();
        s.reason = r.str();
        s.detail = r.str();
    }
    if (!r.at_end()) throw CorruptIndexError("trailing bytes after index payload");

    return ImageIndex(meta, cal, std::move(entries), std::move(skipped));
}

void save_index(const ImageIndex& index, const std::filesystem::path& path) {
    write_file_bytes(path, serialize_index(index));
}

ImageIndex load_index(const std::filesystem::path& path) {
    return deserialize_index(read_file_bytes(path));
}

}  // namespace rcbir
