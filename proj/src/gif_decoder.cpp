#include "gif_decoder.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <string>

#include "rcbir/errors.hpp"

namespace rcbir::detail {

namespace {

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::span<const std::uint8_t> take(std::size_t n) {
        need(n);
        auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    // Concatenates a chain of length-prefixed sub-blocks up to the 0 terminator.
    std::vector<std::uint8_t> sub_blocks() {
        std::vector<std::uint8_t> out;
        for (std::uint8_t len = u8(); len != 0; len = u8()) {
            auto chunk = take(len);
            out.insert(out.end(), chunk.begin(), chunk.end());
        }
        return out;
    }
    void skip_sub_blocks() {
        for (std::uint8_t len = u8(); len != 0; len = u8()) take(len);
    }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw IoError("GIF stream is truncated");
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

using Palette = std::vector<std::array<std::uint8_t, 3>>;

Palette read_palette(ByteReader& in, unsigned size_bits) {
    Palette p(std::size_t{1} << (size_bits + 1));
    for (auto& c : p) {
        auto rgb = in.take(3);
        c = {rgb[0], rgb[1], rgb[2]};
    }
    return p;
}

std::vector<std::uint8_t> lzw_decode(std::span<const std::uint8_t> data, int min_code_size,
                                     std::size_t pixel_count) {
    if (min_code_size < 2 || min_code_size > 8) {
        throw IoError("GIF LZW minimum code size out of range");
    }
    constexpr int kMaxCodes = 4096;
    const int clear = 1 << min_code_size;
    const int end_of_info = clear + 1;

    std::array<std::int16_t, kMaxCodes> prefix{};
    std::array<std::uint8_t, kMaxCodes> suffix{};
    std::array<std::uint8_t, kMaxCodes> first{};
    for (int i = 0; i < clear; ++i) {
        prefix[static_cast<std::size_t>(i)] = -1;
        suffix[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
        first[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    }

    std::vector<std::uint8_t> out;
    out.reserve(pixel_count);
    std::vector<std::uint8_t> stack;

    auto emit = [&](int code) {
        stack.clear();
        for (int c = code; c >= 0; c = prefix[static_cast<std::size_t>(c)]) {
            stack.push_back(suffix[static_cast<std::size_t>(c)]);
        }
        out.insert(out.end(), stack.rbegin(), stack.rend());
    };

    int code_size = min_code_size + 1;
    int next_code = end_of_info + 1;
    int prev = -1;
    std::size_t bit_pos = 0;
    const std::size_t total_bits = data.size() * 8;

    while (out.size() < pixel_count) {
        if (bit_pos + static_cast<std::size_t>(code_size) > total_bits) break;
        int code = 0;
        for (int b = 0; b < code_size; ++b, ++bit_pos) {
            if (data[bit_pos >> 3] & (1u << (bit_pos & 7))) code |= 1 << b;
        }

        if (code == clear) {
            code_size = min_code_size + 1;
            next_code = end_of_info + 1;
            prev = -1;
            continue;
        }
        if (code == end_of_info) break;

        if (prev < 0) {
            if (code >= clear) throw IoError("GIF LZW stream starts with an undefined code");
            emit(code);
            prev = code;
            continue;
        }

        std::uint8_t head;
        if (code < next_code) {
            head = first[static_cast<std::size_t>(code)];
            emit(code);
        } else if (code == next_code) {
            head = first[static_cast<std::size_t>(prev)];
            emit(prev);
            out.push_back(head);
        } else {
            throw IoError("GIF LZW code out of sequence");
        }

        if (next_code < kMaxCodes) {
            const auto slot = static_cast<std::size_t>(next_code);
            prefix[slot] = static_cast<std::int16_t>(prev);
            suffix[slot] = head;
            first[slot] = first[static_cast<std::size_t>(prev)];
            ++next_code;
            if (next_code == (1 << code_size) && code_size < 12) ++code_size;
        }
        prev = code;
    }

    if (out.size() < pixel_count) throw IoError("GIF image data is truncated");
    out.resize(pixel_count);
    return out;
}

std::vector<int> row_order(int height, bool interlaced) {
    std::vector<int> rows;
    rows.reserve(static_cast<std::size_t>(height));
    if (!interlaced) {
        for (int y = 0; y < height; ++y) rows.push_back(y);
        return rows;
    }
    constexpr std::array<std::pair<int, int>, 4> passes{{{0, 8}, {4, 8}, {2, 4}, {1, 2}}};
    for (auto [start, step] : passes) {
        for (int y = start; y < height; y += step) rows.push_back(y);
    }
    return rows;
}

}  // namespace

RgbFrame decode_gif(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    auto sig = in.take(6);
    const std::string signature(sig.begin(), sig.end());
    if (signature != "GIF87a" && signature != "GIF89a") throw IoError("not a GIF stream");

    RgbFrame frame;
    frame.width = in.u16();
    frame.height = in.u16();
    const std::uint8_t flags = in.u8();
    const std::uint8_t background = in.u8();
    in.u8();  // pixel aspect ratio

    Palette global;
    if (flags & 0x80) global = read_palette(in, flags & 0x07);

    std::array<std::uint8_t, 3> bg_rgb{0, 0, 0};
    if (background < global.size()) bg_rgb = global[background];
    frame.rgb.resize(static_cast<std::size_t>(frame.width) * frame.height * 3);
    for (std::size_t i = 0; i < frame.rgb.size(); i += 3) {
        std::copy(bg_rgb.begin(), bg_rgb.end(), frame.rgb.begin() + static_cast<std::ptrdiff_t>(i));
    }

    std::optional<std::uint8_t> transparent;
    for (;;) {
        const std::uint8_t block = in.u8();
        if (block == 0x3B) throw IoError("GIF stream holds no image");
        if (block == 0x21) {
            const std::uint8_t label = in.u8();
            if (label == 0xF9) {
                auto gce = in.sub_blocks();
                if (gce.size() >= 4 && (gce[0] & 0x01)) transparent = gce[3];
            } else {
                in.skip_sub_blocks();
            }
            continue;
        }
        if (block != 0x2C) throw IoError("unexpected GIF block");

        const int left = in.u16();
        const int top = in.u16();
        const int w = in.u16();
        const int h = in.u16();
        const std::uint8_t image_flags = in.u8();
        Palette local;
        if (image_flags & 0x80) local = read_palette(in, image_flags & 0x07);
        const Palette& palette = local.empty() ? global : local;
        if (palette.empty()) throw IoError("GIF image has no colour table");

        const int min_code_size = in.u8();
        auto data = in.sub_blocks();
        auto indices = lzw_decode(data, min_code_size, static_cast<std::size_t>(w) * h);

        auto rows = row_order(h, (image_flags & 0x40) != 0);
        for (int r = 0; r < h; ++r) {
            const int y = top + rows[static_cast<std::size_t>(r)];
            if (y >= frame.height) continue;
            for (int c = 0; c < w; ++c) {
                const int x = left + c;
                if (x >= frame.width) break;
                const std::uint8_t idx = indices[static_cast<std::size_t>(r) * w + c];
                if (transparent && idx == *transparent) continue;
                const auto& rgb = idx < palette.size() ? palette[idx] : bg_rgb;
                auto* dst = &frame.rgb[(static_cast<std::size_t>(y) * frame.width + x) * 3];
                std::copy(rgb.begin(), rgb.end(), dst);
            }
        }
        return frame;
    }
}

}  // namespace rcbir::detail
