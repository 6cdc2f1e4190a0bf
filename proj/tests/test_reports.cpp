#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rcbir/reports.hpp"

using namespace rcbir;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

EvalReport small_report(Mode mode) {
    EvalReport r;
    r.mode = mode;
    for (const char* label : {"a", "b"}) {
        ClassScores s;
        s.label = label;
        s.size = 3;
        s.precision.fill(50.0);
        s.recall = 100.0 / 3.0;
        r.classes.push_back(s);
    }
    r.average = r.classes[0];
    r.average.label = "average";
    return r;
}

}  // namespace

TEST_CASE("percent formatting") {
    CHECK(format_percent(100.0) == "100");
    CHECK(format_percent(83.3333333) == "83.33");
    CHECK(format_percent(72.5) == "72.5");
    CHECK(format_percent(0.0) == "0");
    CHECK(format_percent(66.666) == "66.67");
}

TEST_CASE("query result JSON shape") {
    QueryResult r;
    r.mode = Mode::Lbir;
    r.query_key = 4;
    r.candidates_examined = 2;
    r.hits.push_back({"x", "cls", 0.25, 17, 4, {1, 2, 3, 4}});
    r.hits.push_back({"y", std::nullopt, 0.5, 18, 4, {0, 0, 1, 1}});
    const Json j = to_json(r);
    CHECK(j["mode"] == "lbir");
    CHECK(j["query_key"] == 4);
    CHECK(j["candidates_examined"] == 2);
    REQUIRE(j["results"].size() == 2);
    CHECK(j["results"][0]["image_id"] == "x");
    CHECK(j["results"][0]["class_label"] == "cls");
    CHECK(j["results"][0]["distance"] == 0.25);
    CHECK(j["results"][0]["cell"] == 4);
    CHECK(j["results"][0]["bbox"] == Json{{"x1", 1}, {"y1", 2}, {"x2", 3}, {"y2", 4}});
    CHECK(j["results"][1]["class_label"].is_null());

    r.query_key.reset();
    CHECK(to_json(r)["query_key"].is_null());
}

TEST_CASE("threshold report JSON") {
    ThresholdReport t;
    t.t_iterative = 105;
    t.t_otsu = 10;
    t.t_star = 115;
    t.iterations = 1;
    const Json j = to_json(t);
    CHECK(j == Json{{"t_iterative", 105}, {"t_otsu", 10}, {"t_star", 115}, {"iterations", 1}});
}

TEST_CASE("eval CSV layout") {
    const auto text = eval_csv({small_report(Mode::Rbir), small_report(Mode::Cbir)});
    const auto lines = lines_of(text);
    REQUIRE(lines.size() == 2 * 6 + 5);
    CHECK(lines[0] == "precision,rbir");
    CHECK(lines[1] == "class,1,2,3,4,5,6,7,8,9,10");
    CHECK(lines[2] == "a,50,50,50,50,50,50,50,50,50,50");
    CHECK(lines[4].rfind("average,", 0) == 0);
    CHECK(lines[5].empty());
    CHECK(lines[6] == "precision,cbir");
    CHECK(lines[12] == "recall@20");
    CHECK(lines[13] == "class,rbir,cbir");
    CHECK(lines[14] == "a,33.33,33.33");
    CHECK(lines[15] == "b,33.33,33.33");
    CHECK(lines[16] == "average,33.33,33.33");
}

TEST_CASE("features CSV") {
    CHECK(features_csv_header() == "image_id,energy,entropy,contrast\n");
    const auto row = features_csv_row("img", {1.0, 0.0, 0.5});
    CHECK(row.rfind("img,1", 0) == 0);
    CHECK(row.back() == '\n');
}

TEST_CASE("precision chart is an SVG with one line per mode") {
    const auto svg = precision_svg({small_report(Mode::Rbir), small_report(Mode::Lbir)});
    CHECK(svg.rfind("<svg", 0) == 0);
    std::size_t lines = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++lines;
    CHECK(lines == 2);
    CHECK(svg.find("rbir") != std::string::npos);
}
