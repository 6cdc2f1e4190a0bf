// Acceptance suite: one PASS/FAIL line per criterion. Exit status is
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rcbir/cli.hpp"
#include "rcbir/evaluation.hpp"
#include "rcbir/image_io.hpp"
#include "rcbir/index_io.hpp"
#include "rcbir/reports.hpp"
#include "rcbir/retrieval.hpp"
#include "rcbir/synthetic.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/random_index.hpp"
#include "support/temp_dir.hpp"

using namespace rcbir;

namespace {

// Pinned limits.
constexpr int kHistogramCount = 1000;
constexpr int kHistogramPixels = 16384;
constexpr double kOtsuBudgetSeconds = 5.0;
constexpr int kFixedPointSlack = 1;
constexpr int kLabelingRasters = 500;
constexpr int kLabelingSide = 64;
constexpr int kGlcmRasters = 200;
constexpr int kGlcmSide = 16;
constexpr double kFeatureTolerance = 1e-12;
constexpr int kRoundTripIndices = 50;
constexpr int kByteFlips = 100;
constexpr double kEndToEndBudgetSeconds = 60.0;
constexpr double kMeanCandidateLimit = 100.0;

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome otsu_oracle() {
    std::vector<Histogram> hists;
    hists.reserve(kHistogramCount);
    for (int seed = 0; seed < kHistogramCount; ++seed) {
        hists.push_back(testing::gaussian_mixture_histogram(static_cast<std::uint64_t>(seed), kHistogramPixels));
    }
    int mismatches = 0;
    double lib_seconds = 0.0;
    const auto start = Clock::now();
    for (const auto& h : hists) {
        const auto t0 = Clock::now();
        const int lib = otsu_threshold(h).threshold;
        lib_seconds += seconds_since(t0);
        if (lib != oracle::otsu_exhaustive(h).threshold) ++mismatches;
    }
    const double total = seconds_since(start);
    std::ostringstream d;
    d << mismatches << " mismatches over " << kHistogramCount << " histograms, library " << std::fixed
      << std::setprecision(3) << lib_seconds << " s, with oracle " << total << " s";
    return {mismatches == 0 && total < kOtsuBudgetSeconds, d.str()};
}

Outcome iterative_fixed_point() {
    int bad = 0, max_iter = 0;
    for (int seed = 0; seed < kHistogramCount; ++seed) {
        const Histogram h = testing::gaussian_mixture_histogram(static_cast<std::uint64_t>(seed), kHistogramPixels);
        const auto r = iterative_threshold(h);
        const auto [m1, m2] = oracle::class_means(h, r.threshold, r.threshold);
        max_iter = std::max(max_iter, r.iterations);
        if (std::abs(r.threshold - std::lround((m1 + m2) / 2.0)) > kFixedPointSlack ||
            r.iterations > kMaxThresholdIterations) {
            ++bad;
        }
    }
    return {bad == 0, std::to_string(bad) + " violations, max iterations " + std::to_string(max_iter)};
}

Outcome labeling_oracle() {
    std::mt19937_64 rng(2024);
    int bad = 0;
    for (int i = 0; i < kLabelingRasters; ++i) {
        const double density = 0.1 + 0.8 * i / (kLabelingRasters - 1);
        const BinaryMask m = testing::random_mask(rng, kLabelingSide, kLabelingSide, density);
        const auto lib = label_regions(m);
        const auto roots = oracle::components_union_find(m);

        std::map<std::int32_t, std::size_t> forward;
        std::map<std::size_t, std::int32_t> backward;
        std::map<std::size_t, std::int64_t> oracle_volumes;
        bool ok = true;
        for (std::size_t p = 0; p < roots.size(); ++p) {
            const bool fg = m.pixels()[p] != 0;
            if (fg != (lib.labels[p] != 0)) ok = false;
            if (!fg) continue;
            ++oracle_volumes[roots[p]];
            const auto f = forward.emplace(lib.labels[p], roots[p]).first;
            const auto b = backward.emplace(roots[p], lib.labels[p]).first;
            if (f->second != roots[p] || b->second != lib.labels[p]) ok = false;
        }
        std::vector<std::int64_t> a(lib.volumes.begin() + 1, lib.volumes.end()), b;
        for (const auto& [root, v] : oracle_volumes) b.push_back(v);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (!ok || a != b || static_cast<std::size_t>(lib.region_count) != b.size()) ++bad;
    }
    return {bad == 0, std::to_string(bad) + " of " + std::to_string(kLabelingRasters) + " rasters differ"};
}

std::uint64_t expected_pairs(Angle a, int w, int h, int d) {
    const auto uw = static_cast<std::uint64_t>(w - d), uh = static_cast<std::uint64_t>(h - d);
    switch (a) {
        case Angle::Deg0: return 2 * uw * static_cast<std::uint64_t>(h);
        case Angle::Deg90: return 2 * static_cast<std::uint64_t>(w) * uh;
        default: return 2 * uw * uh;
    }
}

Outcome glcm_oracle() {
    std::mt19937_64 rng(77);
    constexpr int kLevels[] = {2, 4, 8, 16};
    int mismatches = 0, identity_failures = 0, asymmetric = 0;
    for (int i = 0; i < kGlcmRasters; ++i) {
        const int ng = kLevels[i % 4];
        const auto t = testing::random_tones(rng, kGlcmSide, kGlcmSide, ng);
        for (Angle a : kAllAngles) {
            const auto m = cooccurrence(t, a, 1);
            if (m.counts != oracle::glcm_brute_force(t, a, 1)) ++mismatches;
            if (m.total != expected_pairs(a, kGlcmSide, kGlcmSide, 1)) ++identity_failures;
            for (int r = 0; r < ng; ++r) {
                for (int c = 0; c < ng; ++c) {
                    if (m.count(r, c) != m.count(c, r)) ++asymmetric;
                }
            }
        }
    }
    std::ostringstream d;
    d << mismatches << " oracle mismatches, " << identity_failures << " pair-count failures, " << asymmetric
      << " asymmetric cells over " << kGlcmRasters * 4 << " matrices";
    return {mismatches == 0 && identity_failures == 0 && asymmetric == 0, d.str()};
}

Outcome feature_sanity() {
    const auto constant = region_texture(GrayImage(16, 16, 99), nullptr);
    const bool exact = constant.energy == 1.0 && constant.entropy == 0.0 && constant.contrast == 0.0;
    const std::vector<double> p{0.0, 0.5, 0.5, 0.0};
    const auto two = features_from_probabilities(p, 2);
    const bool close = std::abs(two.energy - 0.5) <= kFeatureTolerance &&
                       std::abs(two.entropy - 1.0) <= kFeatureTolerance &&
                       std::abs(two.contrast - 1.0) <= kFeatureTolerance;
    std::ostringstream d;
    d << std::setprecision(17) << "constant (" << constant.energy << ", " << constant.entropy << ", "
      << constant.contrast << "), two-cell (" << two.energy << ", " << two.entropy << ", " << two.contrast << ")";
    return {exact && close, d.str()};
}

Outcome location_semantics() {
    const int a = location_axis(0, 50, 256), b = location_axis(100, 160, 256), c = location_axis(10, 250, 256);
    const int centre = location_cell({108, 108, 147, 147}, 256, 256);
    const int top_left = location_cell({0, 0, 50, 50}, 256, 256);
    const int top_right = location_cell({200, 0, 250, 50}, 256, 256);
    std::ostringstream d;
    d << "axis (" << a << ", " << b << ", " << c << "), cells " << centre << ", " << top_left << ", " << top_right;
    return {a == 0 && b == 1 && c == 1 && centre == 4 && top_left == 0 && top_right == 2, d.str()};
}

struct SyntheticSetup {
    testing::TempDir dir;
    ImageIndex index;
    SyntheticSetup() {
        write_synthetic_corpus({7, 25, 256}, dir.path());
        index = build_index(scan_corpus(dir.path()), {{}, 0, 0});
    }
};

Outcome self_retrieval(const SyntheticSetup& s) {
    int ok = 0, total = 0;
    for (Mode mode : {Mode::Rbir, Mode::Lbir, Mode::Cbir}) {
        for (const auto& e : s.index.entries()) {
            ++total;
            const auto r = query(s.index, load_image(s.dir.path() / e.source_path), {mode, 10, std::nullopt});
            if (!r.hits.empty() && r.hits[0].image_id == e.image_id && r.hits[0].distance == 0.0) ++ok;
        }
    }
    return {ok == 300 && total == 300, std::to_string(ok) + "/" + std::to_string(total) + " queries return themselves first"};
}

Outcome bucket_soundness(const SyntheticSetup& s) {
    int unsound = 0;
    double candidates = 0.0;
    for (Mode mode : {Mode::Rbir, Mode::Lbir}) {
        for (const auto& e : s.index.entries()) {
            const auto r = query(s.index, load_image(s.dir.path() / e.source_path), {mode, 100, std::nullopt});
            for (const auto& h : r.hits) {
                const int stored = mode == Mode::Rbir ? h.combined_key : h.location_cell;
                if (!r.query_key || stored != *r.query_key) ++unsound;
            }
            if (mode == Mode::Rbir) candidates += static_cast<double>(r.candidates_examined);
        }
    }
    const double mean = candidates / static_cast<double>(s.index.entries().size());
    std::ostringstream d;
    d << unsound << " hits outside the query bucket, mean RBIR candidates " << mean << " of "
      << s.index.entries().size();
    return {unsound == 0 && mean < kMeanCandidateLimit, d.str()};
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::size_t field_count(const std::string& line) {
    return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

Outcome protocol_shape(const SyntheticSetup& s) {
    bool shape_ok = true;
    std::ostringstream d;
    std::vector<EvalReport> reports;
    for (Mode mode : {Mode::Rbir, Mode::Lbir, Mode::Cbir}) {
        reports.push_back(run_protocol(s.index, mode));
        const auto lines = split_lines(eval_csv({reports.back()}));
        // precision header, column header, 4 classes, average, blank,
        // recall header, column header, 4 classes, average.
        if (lines.size() != 15 || lines[1] != "class,1,2,3,4,5,6,7,8,9,10" || lines[8] != "recall@20") {
            shape_ok = false;
            continue;
        }
        for (int i = 2; i <= 6; ++i) shape_ok &= field_count(lines[static_cast<std::size_t>(i)]) == 11;
        for (int i = 10; i <= 14; ++i) shape_ok &= field_count(lines[static_cast<std::size_t>(i)]) == 2;
        shape_ok &= lines[6].rfind("average,", 0) == 0 && lines[14].rfind("average,", 0) == 0;
    }
    bool p1 = true;
    d << "P@1";
    for (const auto& r : reports) {
        d << ' ' << to_string(r.mode) << '=' << format_percent(r.average.precision[0]);
        p1 &= r.average.precision[0] == 100.0 && r.classes.size() == 4;
    }
    d << "; P@10";
    for (const auto& r : reports) d << ' ' << to_string(r.mode) << '=' << format_percent(r.average.precision[9]);
    d << "; recall@20";
    for (const auto& r : reports) d << ' ' << to_string(r.mode) << '=' << format_percent(r.average.recall);
    d << " (ordering reported, not asserted)";
    return {shape_ok && p1, d.str()};
}

Outcome index_round_trip() {
    std::mt19937_64 rng(31337);
    int unequal = 0;
    for (int i = 0; i < kRoundTripIndices; ++i) {
        const ImageIndex idx = testing::random_index(rng);
        if (!(deserialize_index(serialize_index(idx)) == idx)) ++unequal;
    }
    const auto bytes = serialize_index(testing::random_index(rng));
    std::uniform_int_distribution<std::size_t> where(0, bytes.size() - 1);
    std::uniform_int_distribution<int> value(1, 255);
    int loaded = 0, other = 0;
    for (int i = 0; i < kByteFlips; ++i) {
        auto bad = bytes;
        bad[where(rng)] ^= static_cast<std::uint8_t>(value(rng));
        try {
            (void)deserialize_index(bad);
            ++loaded;
        } catch (const CorruptIndexError&) {
        } catch (const VersionError&) {
        } catch (...) {
            ++other;
        }
    }
    std::ostringstream d;
    d << unequal << " of " << kRoundTripIndices << " round trips differ; " << loaded << " of " << kByteFlips
      << " corrupted files loaded, " << other << " raised another error";
    return {unequal == 0 && loaded == 0 && other == 0, d.str()};
}

Outcome end_to_end() {
    testing::TempDir dir;
    const std::string corpus = (dir / "d").string(), index = (dir / "idx.rcbir").string();
    std::ostringstream sink, err;
    const auto start = Clock::now();
    bool ok = run_cli({"gen-corpus", "--seed", "7", "--out", corpus}, sink, err) == 0;
    ok &= run_cli({"index", "build", "--input", corpus, "--out", index}, sink, err) == 0;
    for (int i = 0; i < 100 && ok; ++i) {
        std::ostringstream name;
        name << corpus << "/img_" << std::setw(3) << std::setfill('0') << i << ".png";
        ok &= run_cli({"query", "--index", index, "--image", name.str(), "--mode", "rbir"}, sink, err) == 0;
    }
    ok &= run_cli({"eval", "--index", index, "--mode", "rbir"}, sink, err) == 0;
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << std::fixed << std::setprecision(2) << elapsed << " s" << (ok ? "" : ", a step failed: " + err.str());
    return {ok && elapsed < kEndToEndBudgetSeconds, d.str()};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](const std::string& name, const std::function<Outcome()>& check) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
        if (!o.pass) ++failures;
    };

    report("otsu oracle equality", otsu_oracle);
    report("iterative threshold fixed point", iterative_fixed_point);
    report("labeling oracle equality", labeling_oracle);
    report("co-occurrence oracle equality", glcm_oracle);
    report("feature sanity", feature_sanity);
    report("location grid walk", location_semantics);

    const SyntheticSetup setup;
    report("self retrieval", [&] { return self_retrieval(setup); });
    report("bucket soundness and reduction", [&] { return bucket_soundness(setup); });
    report("protocol shape", [&] { return protocol_shape(setup); });
    report("index round trip", index_round_trip);
    report("end-to-end runtime", end_to_end);

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
