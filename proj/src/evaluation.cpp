#include "rcbir/evaluation.hpp"

#include <algorithm>
#include <map>

#include "rcbir/errors.hpp"

namespace rcbir {

namespace {

std::size_t matches_in_top(const QueryResult& result, std::string_view query_class, std::size_t n) {
    const std::size_t limit = std::min(n, result.hits.size());
    return static_cast<std::size_t>(std::count_if(
        result.hits.begin(), result.hits.begin() + static_cast<std::ptrdiff_t>(limit),
        [&](const RankedHit& h) { return h.class_label && *h.class_label == query_class; }));
}

}  // namespace

double precision_at_k(const QueryResult& result, std::string_view query_class, std::size_t k) {
    if (k == 0) throw ValidationError("precision depth must be at least 1");
    return 100.0 * static_cast<double>(matches_in_top(result, query_class, k)) /
           static_cast<double>(k);
}

double recall_at_n(const QueryResult& result, std::string_view query_class, std::size_t n,
                   std::size_t class_size, bool self_included) {
    const std::size_t relevant = self_included ? class_size : (class_size ? class_size - 1 : 0);
    if (relevant == 0) return 0.0;
    return 100.0 * static_cast<double>(matches_in_top(result, query_class, n)) /
           static_cast<double>(relevant);
}

EvalReport run_protocol(const ImageIndex& index, Mode mode, const EvalOptions& options) {
    const auto& entries = index.entries();
    if (entries.empty()) throw ValidationError("index holds no entries");

    std::vector<std::string> order;
    std::map<std::string, std::size_t, std::less<>> class_size;
    for (const auto& e : entries) {
        if (!e.class_label) throw ValidationError("entry " + e.image_id + " has no class label");
        if (class_size[*e.class_label]++ == 0) order.push_back(*e.class_label);
    }

    EvalReport report;
    report.mode = mode;
    report.include_self = options.include_self;
    report.corpus = std::to_string(entries.size()) + " images, " + std::to_string(order.size()) +
                    " classes";

    QueryOptions qopt;
    qopt.mode = mode;
    qopt.k = std::max(kPrecisionDepth, kRecallDepth);

    std::map<std::string, ClassScores, std::less<>> sums;
    double candidates = 0.0;
    report.queries.reserve(entries.size());
    for (const auto& e : entries) {
        if (!options.include_self) qopt.exclude_id = e.image_id;
        const QueryResult result = run_query(index, probe_entry(e), qopt);

        QueryLog log;
        log.image_id = e.image_id;
        log.class_label = *e.class_label;
        log.candidates_examined = result.candidates_examined;
        for (const auto& h : result.hits) log.ranked_classes.push_back(h.class_label.value_or(""));
        for (std::size_t k = 1; k <= kPrecisionDepth; ++k) {
            log.precision[k - 1] = precision_at_k(result, log.class_label, k);
        }
        log.recall = recall_at_n(result, log.class_label, kRecallDepth, class_size[log.class_label],
                                 options.include_self);

        ClassScores& s = sums[log.class_label];
        for (std::size_t k = 0; k < kPrecisionDepth; ++k) s.precision[k] += log.precision[k];
        s.recall += log.recall;
        candidates += static_cast<double>(result.candidates_examined);
        report.queries.push_back(std::move(log));
    }

    report.average.label = "average";
    report.average.size = entries.size();
    for (const auto& label : order) {
        ClassScores row = sums[label];
        row.label = label;
        row.size = class_size[label];
        const auto n = static_cast<double>(row.size);
        for (double& p : row.precision) p /= n;
        row.recall /= n;
        for (std::size_t k = 0; k < kPrecisionDepth; ++k) report.average.precision[k] += row.precision[k];
        report.average.recall += row.recall;
        report.classes.push_back(std::move(row));
    }
    const auto class_count = static_cast<double>(report.classes.size());
    for (double& p : report.average.precision) p /= class_count;
    report.average.recall /= class_count;
    report.mean_candidates_examined = candidates / static_cast<double>(entries.size());
    return report;
}

}  // namespace rcbir
