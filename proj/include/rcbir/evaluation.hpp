#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rcbir/retrieval.hpp"

namespace rcbir {

inline constexpr std::size_t kPrecisionDepth = 10;
inline constexpr std::size_t kRecallDepth = 20;

/// 100 * (same-class hits among the first min(k, returned)) / k.
[[nodiscard]] double precision_at_k(const QueryResult& result, std::string_view query_class,
                                    std::size_t k);

/// 100 * (same-class hits among the first n) / relevant, where relevant is
/// class_size - 1 when the query is left out of its own ranking and
/// class_size when it is not. Returns 0 when nothing is relevant.
[[nodiscard]] double recall_at_n(const QueryResult& result, std::string_view query_class,
                                 std::size_t n, std::size_t class_size, bool self_included = false);

struct ClassScores {
    std::string label;
    std::size_t size = 0;
    std::array<double, kPrecisionDepth> precision{};  // percent, k = 1..10
    double recall = 0.0;                              // percent, n = 20
};

struct QueryLog {
    std::string image_id;
    std::string class_label;
    std::size_t candidates_examined = 0;
    std::vector<std::string> ranked_classes;  // labels of the top 20 hits
    std::array<double, kPrecisionDepth> precision{};
    double recall = 0.0;
};

struct EvalReport {
    Mode mode = Mode::Rbir;
    bool include_self = false;
    std::string corpus;                // short description of the evaluated index
    std::vector<ClassScores> classes;  // in first-appearance order
    ClassScores average;               // arithmetic mean of the class rows
    double mean_candidates_examined = 0.0;
    std::vector<QueryLog> queries;
};

struct EvalOptions {
    bool include_self = false;
};

/// Uses every indexed image as a query against the index and averages the
/// scores per class. Throws ValidationError if an entry has no class label.
[[nodiscard]] EvalReport run_protocol(const ImageIndex& index, Mode mode,
                                      const EvalOptions& options = {});

}  // namespace rcbir
