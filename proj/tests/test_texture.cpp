#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rcbir/texture.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace rcbir;

namespace {

ToneRaster tones_of(int w, int h, int levels, std::vector<std::int16_t> t) {
    return ToneRaster{w, h, levels, std::move(t)};
}

// Number of unordered pixel pairs at displacement d for each angle in a full WxH frame.
std::uint64_t full_frame_pairs(Angle a, int w, int h, int d) {
    const auto uw = static_cast<std::uint64_t>(std::max(0, w - d));
    const auto uh = static_cast<std::uint64_t>(std::max(0, h - d));
    switch (a) {
        case Angle::Deg0: return uw * static_cast<std::uint64_t>(h);
        case Angle::Deg90: return static_cast<std::uint64_t>(w) * uh;
        default: return uw * uh;
    }
}

}  // namespace

TEST_CASE("gray quantization") {
    const GrayImage img(3, 1, std::vector<std::uint8_t>{255, 0, 128});
    const auto t = quantize_gray(img, nullptr, 16);
    CHECK(t.at(0, 0) == 15);
    CHECK(t.at(1, 0) == 0);
    CHECK(t.at(2, 0) == 8);
    for (int ng : {2, 4, 8, 256}) CHECK(quantize_gray(img, nullptr, ng).at(1, 0) == 0);
    CHECK(quantize_gray(img, nullptr, 256).at(0, 0) == 255);
}

TEST_CASE("quantization respects the mask and validates inputs") {
    const GrayImage img(2, 1, std::vector<std::uint8_t>{100, 200});
    const BinaryMask mask(2, 1, std::vector<std::uint8_t>{0, 1});
    const auto t = quantize_gray(img, &mask, 16);
    CHECK(t.at(0, 0) == ToneRaster::kAbsent);
    CHECK(t.at(1, 0) == 12);
    CHECK_THROWS_AS((void)quantize_gray(img, nullptr, 1), ValidationError);
    CHECK_THROWS_AS((void)quantize_gray(img, nullptr, 257), ValidationError);
    const BinaryMask wrong(3, 1);
    CHECK_THROWS_AS((void)quantize_gray(img, &wrong, 16), ValidationError);
}

TEST_CASE("co-occurrence of a 2x2 raster") {
    const auto t = tones_of(2, 2, 2, {0, 0, 1, 1});
    const auto h = cooccurrence(t, Angle::Deg0, 1);
    CHECK(h.count(0, 0) == 2);
    CHECK(h.count(1, 1) == 2);
    CHECK(h.count(0, 1) == 0);
    CHECK(h.count(1, 0) == 0);
    const auto v = cooccurrence(t, Angle::Deg90, 1);
    CHECK(v.count(0, 1) == 2);
    CHECK(v.count(1, 0) == 2);
    CHECK(v.count(0, 0) == 0);
    CHECK(v.count(1, 1) == 0);
    CHECK(v.probability(0, 1) == 0.5);
}

TEST_CASE("constant raster puts all mass on one diagonal cell") {
    const auto t = tones_of(5, 5, 8, std::vector<std::int16_t>(25, 3));
    for (Angle a : kAllAngles) {
        const auto m = cooccurrence(t, a, 1);
        CHECK(m.probability(3, 3) == 1.0);
        CHECK(m.total == m.count(3, 3));
    }
}

TEST_CASE("co-occurrence matches the set-predicate oracle") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 24; ++trial) {
        const int ng = 2 << (trial % 4);
        const auto t = testing::random_tones(rng, 9 + trial % 5, 7 + trial % 3, ng, trial % 3 == 0 ? 0.2 : 0.0);
        for (int d : {1, 2, 3}) {
            for (Angle a : kAllAngles) {
                CAPTURE(trial);
                CAPTURE(d);
                CHECK(cooccurrence(t, a, d).counts == oracle::glcm_brute_force(t, a, d));
            }
        }
    }
}

TEST_CASE("pair counts on a full frame") {
    std::mt19937_64 rng(3);
    for (int d : {1, 2, 5}) {
        const auto t = testing::random_tones(rng, 13, 11, 4);
        for (Angle a : kAllAngles) {
            const auto m = cooccurrence(t, a, d);
            CHECK(m.total == 2 * full_frame_pairs(a, 13, 11, d));
        }
    }
    CHECK_THROWS_AS((void)cooccurrence(tones_of(1, 1, 2, {0}), Angle::Deg0, 0), ValidationError);
}

TEST_CASE("rotating the raster swaps the angular matrices") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto t = testing::random_tones(rng, 10, 6, 8);
        const auto r = testing::rotate_cw(t);
        CHECK(cooccurrence(t, Angle::Deg0, 1).counts == cooccurrence(r, Angle::Deg90, 1).counts);
        CHECK(cooccurrence(t, Angle::Deg90, 1).counts == cooccurrence(r, Angle::Deg0, 1).counts);
        CHECK(cooccurrence(t, Angle::Deg45, 1).counts == cooccurrence(r, Angle::Deg135, 1).counts);
        CHECK(cooccurrence(t, Angle::Deg135, 1).counts == cooccurrence(r, Angle::Deg45, 1).counts);
    }
}

TEST_CASE("feature formulas") {
    const std::vector<double> single{0, 0, 0, 1};
    const auto a = features_from_probabilities(single, 2);
    CHECK(a.energy == 1.0);
    CHECK(a.entropy == 0.0);
    CHECK(a.contrast == 0.0);

    const std::vector<double> off{0, 0.5, 0.5, 0};
    const auto b = features_from_probabilities(off, 2);
    CHECK(b.energy == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b.entropy == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.contrast == doctest::Approx(1.0).epsilon(1e-12));

    const auto zero = features_from_probabilities(std::vector<double>(9, 0.0), 3);
    CHECK(zero == TextureFeatures{});
}

TEST_CASE("features match direct summation on random symmetric matrices") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int ng = 2 + trial % 15;
        const auto p = testing::random_symmetric_probabilities(rng, ng);
        const auto lib = features_from_probabilities(p, ng);
        const auto ref = oracle::features_direct(p, ng);
        CHECK(std::abs(lib.energy - ref.energy) <= 1e-12);
        CHECK(std::abs(lib.entropy - ref.entropy) <= 1e-12);
        CHECK(std::abs(lib.contrast - ref.contrast) <= 1e-12 * std::max(1.0, ref.contrast));
    }
}

TEST_CASE("region texture of a constant region") {
    const auto f = region_texture(GrayImage(8, 8, 77), nullptr);
    CHECK(f.energy == 1.0);
    CHECK(f.entropy == 0.0);
    CHECK(f.contrast == 0.0);
}

TEST_CASE("region texture averages the angular matrices") {
    // Rows alternate between tones 0 and 1. Horizontal pairs never change
    // tone; every vertical and diagonal pair does.
    GrayImage img(4, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) img.set(x, y, y % 2 ? 200 : 10);
    }
    const TextureParams params{2, 1};
    const auto f = region_texture(img, nullptr, params);

    const auto tones = quantize_gray(img, nullptr, 2);
    double contrast_sum = 0.0;
    std::vector<double> mean(4, 0.0);
    for (Angle a : kAllAngles) {
        const auto m = cooccurrence(tones, a, 1);
        contrast_sum += features_from_matrix(m).contrast;
        for (std::size_t i = 0; i < 4; ++i) mean[i] += m.probabilities[i] / 4.0;
    }
    // Contrast is linear in p, so it equals the mean of the per-angle values.
    CHECK(f.contrast == doctest::Approx(contrast_sum / 4.0).epsilon(1e-12));
    CHECK(f.contrast == doctest::Approx(0.75).epsilon(1e-12));
    // Energy and entropy are not linear; they come from the averaged matrix:
    // p00 = p11 = 1/8, p01 = p10 = 3/8.
    CHECK(mean[0] == doctest::Approx(0.125));
    CHECK(mean[1] == doctest::Approx(0.375));
    CHECK(f.energy == doctest::Approx(0.3125).epsilon(1e-12));
    const double h = -2 * 0.125 * std::log2(0.125) - 2 * 0.375 * std::log2(0.375);
    CHECK(f.entropy == doctest::Approx(h).epsilon(1e-12));
}

TEST_CASE("degenerate regions") {
    const GrayImage img(5, 5, 100);
    BinaryMask one(5, 5);
    one.set(2, 2, 1);
    CHECK_THROWS_AS((void)region_texture(img, &one), DegenerateRegionError);

    BinaryMask empty(5, 5);
    CHECK_THROWS_AS((void)region_texture(img, &empty), DegenerateRegionError);

    // Two pixels that touch only horizontally still give one usable angle.
    BinaryMask pair(5, 5);
    pair.set(1, 1, 1);
    pair.set(2, 1, 1);
    CHECK(region_texture(img, &pair) == TextureFeatures{1.0, 0.0, 0.0});

    CHECK_THROWS_AS((void)region_texture(img, nullptr, TextureParams{1, 1}), ValidationError);
}
