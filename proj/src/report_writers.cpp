#include "rcbir/reports.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace rcbir {

Json to_json(const BoundingBox& bbox) {
    return Json{{"x1", bbox.x1}, {"y1", bbox.y1}, {"x2", bbox.x2}, {"y2", bbox.y2}};
}

Json to_json(const TextureFeatures& f) {
    return Json{{"energy", f.energy}, {"entropy", f.entropy}, {"contrast", f.contrast}};
}

Json to_json(const ThresholdReport& report) {
    return Json{{"t_iterative", report.t_iterative},
                {"t_otsu", report.t_otsu},
                {"t_star", report.t_star},
                {"iterations", report.iterations}};
}

Json to_json(const QueryResult& result) {
    Json results = Json::array();
    for (const auto& h : result.hits) {
        results.push_back(Json{{"image_id", h.image_id},
                               {"class_label", h.class_label ? Json(*h.class_label) : Json(nullptr)},
                               {"distance", h.distance},
                               {"bbox", to_json(h.roi_bbox)},
                               {"cell", h.location_cell}});
    }
    return Json{{"mode", std::string(to_string(result.mode))},
                {"query_key", result.query_key ? Json(*result.query_key) : Json(nullptr)},
                {"candidates_examined", result.candidates_examined},
                {"results", std::move(results)}};
}

Json to_json(const IndexEntry& e) {
    return Json{{"image_id", e.image_id},
                {"class_label", e.class_label ? Json(*e.class_label) : Json(nullptr)},
                {"features", to_json(e.features)},
                {"global_features", to_json(e.global_features)},
                {"roi_bbox", to_json(e.roi_bbox)},
                {"roi_area", e.roi_area},
                {"location_cell", e.location_cell},
                {"combined_key", e.combined_key},
                {"source_path", e.source_path},
                {"width", e.width},
                {"height", e.height}};
}

Json to_json(const ImageIndex& index) {
    auto range = [](const FeatureRange& r) { return Json{{"min", r.min}, {"max", r.max}}; };
    const auto& cal = index.calibration();
    Json entries = Json::array();
    for (const auto& e : index.entries()) entries.push_back(to_json(e));
    Json skipped = Json::array();
    for (const auto& s : index.skipped()) {
        skipped.push_back(Json{{"image_id", s.image_id},
                               {"source_path", s.source_path},
                               {"reason", s.reason},
                               {"detail", s.detail}});
    }
    Json combined = Json::object();
    for (int key : index.occupied_combined_keys()) {
        Json ids = Json::array();
        for (auto pos : index.combined_bucket(key)) ids.push_back(index.entries()[pos].image_id);
        combined[std::to_string(key)] = std::move(ids);
    }
    Json location = Json::object();
    for (int cell = 0; cell < kLocationCellCount; ++cell) {
        Json ids = Json::array();
        for (auto pos : index.location_bucket(cell)) ids.push_back(index.entries()[pos].image_id);
        location[std::to_string(cell)] = std::move(ids);
    }
    const auto& meta = index.metadata();
    return Json{{"version", meta.version},
                {"levels", meta.levels},
                {"distance", meta.distance},
                {"created_unix", meta.created_unix},
                {"calibration",
                 {{"energy", range(cal.energy)},
                  {"entropy", range(cal.entropy)},
                  {"contrast", range(cal.contrast)}}},
                {"entries", std::move(entries)},
                {"skipped", std::move(skipped)},
                {"combined_buckets", std::move(combined)},
                {"location_buckets", std::move(location)}};
}

Json to_json(const EvalReport& report) {
    auto row = [](const ClassScores& s) {
        return Json{{"class", s.label},
                    {"size", s.size},
                    {"precision", Json(std::vector<double>(s.precision.begin(), s.precision.end()))},
                    {"recall_at_20", s.recall}};
    };
    Json classes = Json::array();
    for (const auto& c : report.classes) classes.push_back(row(c));
    Json queries = Json::array();
    for (const auto& q : report.queries) {
        queries.push_back(Json{{"image_id", q.image_id},
                               {"class_label", q.class_label},
                               {"candidates_examined", q.candidates_examined},
                               {"ranked_classes", q.ranked_classes},
                               {"precision", Json(std::vector<double>(q.precision.begin(), q.precision.end()))},
                               {"recall_at_20", q.recall}});
    }
    return Json{{"mode", std::string(to_string(report.mode))},
                {"include_self", report.include_self},
                {"corpus", report.corpus},
                {"mean_candidates_examined", report.mean_candidates_examined},
                {"classes", std::move(classes)},
                {"average", row(report.average)},
                {"queries", std::move(queries)}};
}

std::string features_csv_header() { return "image_id,energy,entropy,contrast\n"; }

std::string features_csv_row(const std::string& image_id, const TextureFeatures& f) {
    char buf[128];
    std::snprintf(buf, sizeof buf, ",%.10g,%.10g,%.10g\n", f.energy, f.entropy, f.contrast);
    return image_id + buf;
}

std::string format_percent(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", std::round(value * 100.0) / 100.0);
    std::string s = buf;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

std::string eval_csv(const std::vector<EvalReport>& reports) {
    std::ostringstream out;
    for (const auto& r : reports) {
        out << "precision," << to_string(r.mode) << '\n' << "class";
        for (std::size_t k = 1; k <= kPrecisionDepth; ++k) out << ',' << k;
        out << '\n';
        auto write_row = [&out](const ClassScores& s) {
            out << s.label;
            for (double p : s.precision) out << ',' << format_percent(p);
            out << '\n';
        };
        for (const auto& c : r.classes) write_row(c);
        write_row(r.average);
        out << '\n';
    }
    if (reports.empty()) return out.str();

    out << "recall@" << kRecallDepth << '\n' << "class";
    for (const auto& r : reports) out << ',' << to_string(r.mode);
    out << '\n';
    const auto& first = reports.front();
    for (std::size_t i = 0; i <= first.classes.size(); ++i) {
        const bool avg = i == first.classes.size();
        out << (avg ? first.average.label : first.classes[i].label);
        for (const auto& r : reports) {
            const ClassScores& s = avg ? r.average : r.classes[i];
            out << ',' << format_percent(s.recall);
        }
        out << '\n';
    }
    return out.str();
}

std::string precision_svg(const std::vector<EvalReport>& reports) {
    constexpr int kWidth = 640, kHeight = 400, kLeft = 60, kRight = 140, kTop = 30, kBottom = 50;
    constexpr int kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;
    constexpr const char* kColours[] = {"#1b6ca8", "#d1495b", "#2e8b57", "#8e6c8a"};

    auto px = [](std::size_t k) { return kLeft + static_cast<double>(k - 1) * kPlotW / (kPrecisionDepth - 1); };
    auto py = [](double pct) { return kTop + (100.0 - pct) * kPlotH / 100.0; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kLeft << "\" y=\"18\">Average precision for top 10 retrievals</text>\n";
    for (int pct = 0; pct <= 100; pct += 20) {
        svg << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + kPlotW << "\" y1=\"" << py(pct)
            << "\" y2=\"" << py(pct) << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(pct) + 4 << "\" text-anchor=\"end\">" << pct
            << "</text>\n";
    }
    for (std::size_t k = 1; k <= kPrecisionDepth; ++k) {
        svg << "<text x=\"" << px(k) << "\" y=\"" << kTop + kPlotH + 18 << "\" text-anchor=\"middle\">" << k
            << "</text>\n";
    }
    svg << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\">number of retrievals</text>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW << "\" height=\"" << kPlotH
        << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (std::size_t m = 0; m < reports.size(); ++m) {
        const char* colour = kColours[m % std::size(kColours)];
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
        for (std::size_t k = 1; k <= kPrecisionDepth; ++k) {
            svg << (k > 1 ? " " : "") << px(k) << ',' << py(reports[m].average.precision[k - 1]);
        }
        svg << "\"/>\n";
        const double ly = kTop + 20.0 + 20.0 * static_cast<double>(m);
        svg << "<line x1=\"" << kLeft + kPlotW + 15 << "\" x2=\"" << kLeft + kPlotW + 40 << "\" y1=\"" << ly
            << "\" y2=\"" << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << kLeft + kPlotW + 46 << "\" y=\"" << ly + 4 << "\">" << to_string(reports[m].mode)
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace rcbir
