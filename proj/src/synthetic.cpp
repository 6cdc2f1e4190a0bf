#include "rcbir/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include "rcbir/errors.hpp"
#include "rcbir/image_io.hpp"

namespace rcbir {

namespace {

// mt19937_64's output sequence is fixed by the standard; the distributions
// are not, so bounded draws are done by hand to keep corpora identical
// across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    int uniform(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>(engine_() % span);
    }

private:
    std::mt19937_64 engine_;
};

enum class Texture { Smooth, Checkered, Striped, Speckled };

struct ClassSpec {
    const char* label;
    Texture texture;
    int cell;       // 3x3 grid cell the blob is centred in
    int blob_side;  // at 256 px
};

constexpr std::array<ClassSpec, 4> kClasses{{
    {"smooth", Texture::Smooth, 4, 52},
    {"checkered", Texture::Checkered, 0, 44},
    {"striped", Texture::Striped, 8, 48},
    {"speckled", Texture::Speckled, 2, 56},
}};

constexpr int kTile = 8;

// Blob tones at 16 levels: 12 (192..207), 13 (208..223), 14 (224..239) and
// 15 (240..255). Per-pixel noise stays inside a tone; each blob also gets a
// fixed number of randomly placed "dust" pixels in a neighbouring tone. The
// fixed count keeps a class tight in feature space while the placement makes
// every image's statistics its own.
std::uint8_t base_level(Texture texture, int bx, int by, const std::array<std::uint8_t, kTile * kTile>& tile,
                        Rng& rng) {
    switch (texture) {
        case Texture::Smooth: return static_cast<std::uint8_t>(228 + rng.uniform(-3, 3));
        case Texture::Checkered:
            return static_cast<std::uint8_t>(((bx + by) % 2 ? 236 : 200) + rng.uniform(-3, 3));
        case Texture::Striped: return static_cast<std::uint8_t>((by % 2 ? 236 : 200) + rng.uniform(-3, 3));
        case Texture::Speckled: return tile[static_cast<std::size_t>((by % kTile) * kTile + bx % kTile)];
    }
    return 220;
}

std::uint8_t dust_level(Texture texture, Rng& rng) {
    if (texture == Texture::Smooth) return static_cast<std::uint8_t>(247 + rng.uniform(-3, 3));
    return static_cast<std::uint8_t>(216 + rng.uniform(-3, 3));
}

constexpr int kDustPerMille = 100;

}  // namespace

std::vector<SyntheticImage> render_synthetic_corpus(const SyntheticOptions& options) {
    if (options.per_class < 2) throw ValidationError("need at least two images per class");
    if (options.size < 64) throw ValidationError("synthetic images must be at least 64 pixels wide");

    Rng rng(options.seed);
    std::array<std::uint8_t, kTile * kTile> tile{};
    for (auto& v : tile) v = static_cast<std::uint8_t>(rng.uniform(200, 247));

    const double scale = options.size / 256.0;
    const int cell_size = options.size / 3;
    const int jitter = static_cast<int>(8 * scale);

    std::vector<SyntheticImage> out;
    const int count = options.per_class * static_cast<int>(kClasses.size());
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const ClassSpec& spec = kClasses[static_cast<std::size_t>(i) % kClasses.size()];
        SyntheticImage item;
        char id[32];
        std::snprintf(id, sizeof id, "img_%03d", i);
        item.image_id = id;
        item.class_label = spec.label;

        GrayImage img(options.size, options.size);
        for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(30 + rng.uniform(-10, 10));

        const int side = std::max(4, static_cast<int>(spec.blob_side * scale));
        const int cx = (spec.cell % 3) * cell_size + cell_size / 2 + rng.uniform(-jitter, jitter);
        const int cy = (spec.cell / 3) * cell_size + cell_size / 2 + rng.uniform(-jitter, jitter);
        item.blob = {cx - side / 2, cy - side / 2, cx - side / 2 + side - 1, cy - side / 2 + side - 1};
        for (int y = item.blob.y1; y <= item.blob.y2; ++y) {
            for (int x = item.blob.x1; x <= item.blob.x2; ++x) {
                img.set(x, y, base_level(spec.texture, x - item.blob.x1, y - item.blob.y1, tile, rng));
            }
        }
        // Partial Fisher-Yates picks the dust positions without repeats.
        std::vector<int> cells(static_cast<std::size_t>(side * side));
        for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = static_cast<int>(c);
        const int dust = side * side * kDustPerMille / 1000;
        for (int d = 0; d < dust; ++d) {
            const int pick = rng.uniform(d, static_cast<int>(cells.size()) - 1);
            std::swap(cells[static_cast<std::size_t>(d)], cells[static_cast<std::size_t>(pick)]);
            const int c = cells[static_cast<std::size_t>(d)];
            img.set(item.blob.x1 + c % side, item.blob.y1 + c / side, dust_level(spec.texture, rng));
        }
        item.image = std::move(img);
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<SyntheticImage> write_synthetic_corpus(const SyntheticOptions& options,
                                                   const std::filesystem::path& dir) {
    auto corpus = render_synthetic_corpus(options);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    std::ofstream manifest(dir / "manifest.csv", std::ios::trunc);
    if (!manifest) throw IoError("cannot write manifest in " + dir.string());
    manifest << "image_id,class_label,path,x1,y1,x2,y2\n";
    for (const auto& item : corpus) {
        const std::string file = item.image_id + ".png";
        write_png(dir / file, item.image);
        manifest << item.image_id << ',' << item.class_label << ',' << file << ',' << item.blob.x1
                 << ',' << item.blob.y1 << ',' << item.blob.x2 << ',' << item.blob.y2 << '\n';
    }
    if (!manifest) throw IoError("cannot write manifest in " + dir.string());
    return corpus;
}

}  // namespace rcbir
