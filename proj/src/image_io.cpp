#include "rcbir/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "gif_decoder.hpp"
#include "rcbir/errors.hpp"

namespace rcbir {

namespace {

bool starts_with(std::span<const std::uint8_t> bytes, std::string_view magic) {
    return bytes.size() >= magic.size() &&
           std::equal(magic.begin(), magic.end(), bytes.begin(),
                      [](char m, std::uint8_t b) { return static_cast<std::uint8_t>(m) == b; });
}

std::uint8_t to_8bit(const cv::Mat& m, int row, int col, int channel) {
    if (m.depth() == CV_8U) return m.ptr<std::uint8_t>(row)[col * m.channels() + channel];
    return static_cast<std::uint8_t>(m.ptr<std::uint16_t>(row)[col * m.channels() + channel] >> 8);
}

GrayImage from_mat(const cv::Mat& m) {
    if (m.depth() != CV_8U && m.depth() != CV_16U) {
        throw FormatError("unsupported sample depth");
    }
    GrayImage img(m.cols, m.rows);
    const int channels = m.channels();
    for (int y = 0; y < m.rows; ++y) {
        for (int x = 0; x < m.cols; ++x) {
            std::uint8_t v;
            if (channels == 1 || channels == 2) {
                v = to_8bit(m, y, x, 0);
            } else {
                // OpenCV orders colour channels B, G, R.
                v = luminance(to_8bit(m, y, x, 2), to_8bit(m, y, x, 1), to_8bit(m, y, x, 0));
            }
            img.set(x, y, v);
        }
    }
    return img;
}

GrayImage from_rgb(const detail::RgbFrame& frame) {
    GrayImage img(frame.width, frame.height);
    auto out = img.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = luminance(frame.rgb[3 * i], frame.rgb[3 * i + 1], frame.rgb[3 * i + 2]);
    }
    return img;
}

// OpenCV's PxM reader accepts short payloads silently; check the size first.
void check_pgm_payload(std::span<const std::uint8_t> bytes) {
    if (!starts_with(bytes, "P5")) return;
    std::size_t pos = 2;
    long fields[3] = {0, 0, 0};
    for (long& field : fields) {
        for (;;) {
            while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
            if (pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
                continue;
            }
            break;
        }
        if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw IoError("PGM header is truncated");
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            field = field * 10 + (bytes[pos] - '0');
            if (field > (1L << 24)) throw IoError("PGM header field out of range");
            ++pos;
        }
    }
    if (fields[0] == 0 || fields[1] == 0) throw ValidationError("PGM image has a zero dimension");
    ++pos;  // single whitespace before the raster
    const long sample_bytes = fields[2] > 255 ? 2 : 1;
    const auto expected = static_cast<std::size_t>(fields[0] * fields[1] * sample_bytes);
    if (pos > bytes.size() || bytes.size() - pos < expected) throw IoError("PGM raster is truncated");
}

}  // namespace

ImageFormat sniff_format(std::span<const std::uint8_t> bytes) noexcept {
    if (starts_with(bytes, "\x89PNG\r\n\x1a\n")) return ImageFormat::Png;
    if (starts_with(bytes, "GIF87a") || starts_with(bytes, "GIF89a")) return ImageFormat::Gif;
    if (starts_with(bytes, "BM")) return ImageFormat::Bmp;
    if (starts_with(bytes, "P5") || starts_with(bytes, "P2")) return ImageFormat::Pgm;
    return ImageFormat::Unknown;
}

std::string_view mime_type(ImageFormat format) noexcept {
    switch (format) {
        case ImageFormat::Png: return "image/png";
        case ImageFormat::Gif: return "image/gif";
        case ImageFormat::Bmp: return "image/bmp";
        case ImageFormat::Pgm: return "image/x-portable-graymap";
        case ImageFormat::Unknown: break;
    }
    return "application/octet-stream";
}

GrayImage decode_image(std::span<const std::uint8_t> bytes) {
    const ImageFormat format = sniff_format(bytes);
    if (format == ImageFormat::Unknown) throw FormatError("unsupported image format");
    if (format == ImageFormat::Gif) return from_rgb(detail::decode_gif(bytes));
    if (format == ImageFormat::Pgm) check_pgm_payload(bytes);

    cv::Mat decoded;
    try {
        const cv::Mat buffer(1, static_cast<int>(bytes.size()), CV_8UC1,
                             const_cast<std::uint8_t*>(bytes.data()));
        decoded = cv::imdecode(buffer, cv::IMREAD_UNCHANGED);
    } catch (const cv::Exception& e) {
        throw IoError(std::string("image decode failed: ") + e.what());
    }
    if (decoded.empty()) throw IoError("image data is truncated or corrupt");
    return from_mat(decoded);
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("cannot read " + path.string());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

GrayImage load_image(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return decode_image(bytes);
    } catch (const Error& e) {
        // Keep the error category, add the file name.
        const std::string msg = path.string() + ": " + e.what();
        if (dynamic_cast<const FormatError*>(&e)) throw FormatError(msg);
        if (dynamic_cast<const ValidationError*>(&e)) throw ValidationError(msg);
        throw IoError(msg);
    }
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    const std::string header =
        "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
    const cv::Mat m(img.height(), img.width(), CV_8UC1, const_cast<std::uint8_t*>(img.pixels().data()));
    std::vector<std::uint8_t> out;
    if (!cv::imencode(".png", m, out)) throw IoError("PNG encoding failed");
    return out;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    write_file_bytes(path, encode_pgm(img));
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
    write_file_bytes(path, encode_png(img));
}

GrayImage mask_to_image(const BinaryMask& mask) {
    GrayImage img(mask.width(), mask.height());
    std::transform(mask.pixels().begin(), mask.pixels().end(), img.pixels().begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(v ? 255 : 0); });
    return img;
}

GrayImage make_thumbnail(const GrayImage& img, int max_side) {
    const int longest = std::max(img.width(), img.height());
    if (max_side < 1 || longest <= max_side) return img;
    const double scale = static_cast<double>(max_side) / longest;
    const int w = std::max(1, static_cast<int>(img.width() * scale));
    const int h = std::max(1, static_cast<int>(img.height() * scale));
    const cv::Mat src(img.height(), img.width(), CV_8UC1, const_cast<std::uint8_t*>(img.pixels().data()));
    cv::Mat dst;
    cv::resize(src, dst, cv::Size(w, h), 0, 0, cv::INTER_AREA);
    return from_mat(dst);
}

}  // namespace rcbir
