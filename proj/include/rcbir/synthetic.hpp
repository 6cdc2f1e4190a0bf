#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rcbir/image.hpp"
#include "rcbir/segmentation.hpp"

namespace rcbir {

struct SyntheticOptions {
    std::uint64_t seed = 7;
    int per_class = 25;
    int size = 256;
};

struct SyntheticImage {
    std::string image_id;
    std::string class_label;
    BoundingBox blob;  // ground-truth placement of the bright region
    GrayImage image;
};

/// Four labelled classes of dark noisy frames, each holding one bright
/// rectangular blob. Classes differ in the blob's internal texture (smooth,
/// checkered, striped, speckled) and in the grid cell it sits in. The
/// output depends only on the options.
[[nodiscard]] std::vector<SyntheticImage> render_synthetic_corpus(const SyntheticOptions& options);

/// Writes img_NNN.png files plus manifest.csv
/// (image_id,class_label,path,x1,y1,x2,y2) into dir, creating it if needed.
std::vector<SyntheticImage> write_synthetic_corpus(const SyntheticOptions& options,
                                                   const std::filesystem::path& dir);

}  // namespace rcbir
