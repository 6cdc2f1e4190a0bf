#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rcbir/cli.hpp"
#include "rcbir/image_io.hpp"
#include "rcbir/reports.hpp"
#include "support/temp_dir.hpp"

using namespace rcbir;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::size_t columns(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1; }

struct Workspace {
    testing::TempDir dir;
    std::string corpus, index;
    Workspace() {
        corpus = (dir / "d").string();
        index = (dir / "idx.rcbir").string();
        REQUIRE(run({"gen-corpus", "--seed", "7", "--out", corpus}).code == 0);
        REQUIRE(run({"index", "build", "--input", corpus, "--out", index}).code == 0);
    }
};

Workspace& workspace() {
    static Workspace w;
    return w;
}

}  // namespace

TEST_CASE("end-to-end smoke run") {
    auto& w = workspace();
    const auto q = run({"query", "--index", w.index, "--image", w.corpus + "/img_000.png", "--mode", "rbir", "-k", "10"});
    REQUIRE(q.code == 0);
    const Json j = Json::parse(q.out);
    CHECK(j["mode"] == "rbir");
    REQUIRE_FALSE(j["results"].empty());
    CHECK(j["results"][0]["image_id"] == "img_000");
    CHECK(j["results"][0]["distance"] == 0.0);
    CHECK(j["results"].size() <= 10);

    const auto ex = run({"query", "--index", w.index, "--image", w.corpus + "/img_000.png", "--exclude-self"});
    REQUIRE(ex.code == 0);
    CHECK(Json::parse(ex.out)["results"][0]["image_id"] != "img_000");
}

TEST_CASE("segment writes a mask and a threshold report") {
    auto& w = workspace();
    const std::string mask = (w.dir / "m.pgm").string();
    const auto r = run({"segment", "--image", w.corpus + "/img_001.png", "--dump-mask", mask, "--json"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    for (const char* key : {"t_iterative", "t_otsu", "t_star", "iterations", "bbox", "area", "cell"}) {
        CHECK(j.contains(key));
    }
    const GrayImage m = load_image(mask);
    CHECK(m.width() == 256);
    std::size_t on = 0;
    for (auto p : m.pixels()) on += p == 255;
    CHECK(on == j["area"].get<std::size_t>());
}

TEST_CASE("eval CSV has 4 class rows, an average row and 10 precision columns") {
    auto& w = workspace();
    const auto r = run({"eval", "--index", w.index, "--mode", "lbir", "--csv"});
    REQUIRE(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() >= 13);
    CHECK(lines[0] == "precision,lbir");
    CHECK(lines[1] == "class,1,2,3,4,5,6,7,8,9,10");
    for (int i = 2; i <= 6; ++i) CHECK(columns(lines[static_cast<std::size_t>(i)]) == 11);
    CHECK(lines[6].rfind("average,100", 0) == 0);
    CHECK(lines[7].empty());
    CHECK(lines[8] == "recall@20");
    CHECK(lines[9] == "class,lbir");
    CHECK(lines.size() == 15);
}

TEST_CASE("eval JSON, all modes and plot") {
    auto& w = workspace();
    const std::string svg = (w.dir / "p.svg").string();
    const auto r = run({"eval", "--index", w.index, "--mode", "all", "--json", "--plot", svg});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    REQUIRE(j.is_array());
    CHECK(j.size() == 3);
    CHECK(std::filesystem::file_size(svg) > 100);
}

TEST_CASE("identical invocations give byte-identical output") {
    auto& w = workspace();
    const std::vector<std::string> args{"eval", "--index", w.index, "--mode", "rbir", "--csv"};
    CHECK(run(args).out == run(args).out);
    const std::vector<std::string> q{"query", "--index", w.index, "--image", w.corpus + "/img_005.png", "--mode", "cbir"};
    CHECK(run(q).out == run(q).out);
    CHECK(run({"index", "export", "--index", w.index, "--json"}).out ==
          run({"index", "export", "--index", w.index, "--json"}).out);
}

TEST_CASE("identical corpora index to identical files") {
    auto& w = workspace();
    testing::TempDir other;
    const std::string corpus = (other / "d").string(), index = (other / "i.rcbir").string();
    REQUIRE(run({"gen-corpus", "--seed", "7", "--out", corpus}).code == 0);
    setenv("SOURCE_DATE_EPOCH", "1000", 1);
    REQUIRE(run({"index", "build", "--input", corpus, "--out", index}).code == 0);
    const auto first = read_file_bytes(index);
    REQUIRE(run({"index", "build", "--input", w.corpus, "--out", index}).code == 0);
    unsetenv("SOURCE_DATE_EPOCH");
    CHECK(read_file_bytes(index) == first);
}

TEST_CASE("usage errors exit 2") {
    auto& w = workspace();
    const auto unknown = run({"query", "--index", w.index, "--image", "x.png", "--bogus"});
    CHECK(unknown.code == 2);
    CHECK(unknown.out.empty());
    CHECK(unknown.err.find("--mode") != std::string::npos);
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"query", "--index", w.index, "--image", "x.png", "--mode", "xbir"}).code == 2);
    CHECK(run({"query", "--index", w.index}).code == 2);
}

TEST_CASE("help goes to standard output") {
    for (const char* sub : {"gen-corpus", "index", "query", "eval", "segment", "serve", "features"}) {
        const auto r = run({sub, "--help"});
        CHECK(r.code == 0);
        CHECK_FALSE(r.out.empty());
    }
}

TEST_CASE("domain errors exit 1") {
    auto& w = workspace();
    const std::string flat = (w.dir / "flat.png").string();
    write_png(flat, GrayImage(64, 64, 100));
    const auto seg = run({"segment", "--image", flat, "--json"});
    CHECK(seg.code == 1);
    CHECK(Json::parse(seg.out)["error"] == "no_region");
    CHECK(seg.err.find("no_region") != std::string::npos);

    CHECK(run({"query", "--index", w.index, "--image", flat}).code == 1);
    CHECK(run({"query", "--index", w.index, "--image", flat, "--mode", "cbir"}).code == 0);

    const std::string junk = (w.dir / "junk.rcbir").string();
    write_file_bytes(junk, std::vector<std::uint8_t>{'n', 'o', 'p', 'e', 0, 0, 0, 0, 0, 0});
    const auto bad = run({"query", "--index", junk, "--image", flat});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("corrupt_index") != std::string::npos);
}

TEST_CASE("features subcommand") {
    auto& w = workspace();
    const auto r = run({"features", "--image", w.corpus + "/img_000.png", w.corpus + "/img_001.png"});
    REQUIRE(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "image_id,energy,entropy,contrast");
    CHECK(lines[1].rfind("img_000,", 0) == 0);
}
