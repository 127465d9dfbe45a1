// Hand-computed metric mini-rankings. Expected values are written as
// fractions worked out on paper; nothing here calls the metric code.
#pragma once

#include <string>
#include <vector>

#include "fixtures.hpp"
#include "p2k/metrics.hpp"

namespace p2k::testing {

enum class Metric { Recall, AC, ILD };

struct MetricCase {
    const char* name;
    Metric metric;
    std::size_t k;
    Rankings rankings;
    std::vector<BenchmarkQuery> queries;
    double expected;
};

/// Gallery the AC and ILD cases look up.
inline std::vector<GalleryItem> metric_gallery() {
    return {
        {"m1", dict("t:a; t:b"), {}}, {"m2", dict("t:a; t:c"), {}}, {"m3", dict("t:d"), {}},
        {"m4", VisualDictionary{}, {}}, {"m5", VisualDictionary{}, {}}, {"m6", dict("t:a; t:b"), {}},
    };
}

inline BenchmarkQuery metric_query(const std::string& id, const std::string& target, const std::string& pos,
                                   const std::string& neg) {
    BenchmarkQuery q;
    q.query_id = id;
    q.target_id = target;
    auto p = dict(pos), n = dict(neg);
    q.positive_constraints.assign(p.begin(), p.end());
    q.negative_constraints.assign(n.begin(), n.end());
    return q;
}

/// Ranking of `length` filler ids with `target` placed at 1-based `rank`.
inline std::vector<std::string> ranked(const std::string& target, std::size_t rank, std::size_t length) {
    std::vector<std::string> ids;
    for (std::size_t i = 1; i <= length; ++i) ids.push_back(i == rank ? target : "f" + std::to_string(i));
    return ids;
}

inline std::vector<MetricCase> metric_cases() {
    auto q = [](const std::string& id, const std::string& target) { return metric_query(id, target, "", ""); };
    Rankings four{{"q1", ranked("t1", 1, 100)}, {"q2", ranked("t2", 3, 100)},
                  {"q3", ranked("t3", 12, 100)}, {"q4", ranked("t4", 60, 100)}};
    std::vector<BenchmarkQuery> four_q{q("q1", "t1"), q("q2", "t2"), q("q3", "t3"), q("q4", "t4")};

    return {
        {"recall ranks {1,3,12,60} @10", Metric::Recall, 10, four, four_q, 2.0 / 4.0},
        {"recall ranks {1,3,12,60} @50", Metric::Recall, 50, four, four_q, 3.0 / 4.0},
        {"recall ranks {1,3,12,60} @1", Metric::Recall, 1, four, four_q, 1.0 / 4.0},
        {"recall ranks {1,3,12,60} @100", Metric::Recall, 100, four, four_q, 1.0},
        {"recall target always first", Metric::Recall, 1,
         {{"q1", ranked("t1", 1, 5)}, {"q2", ranked("t2", 1, 5)}}, {q("q1", "t1"), q("q2", "t2")}, 1.0},
        {"recall target absent", Metric::Recall, 5, {{"q1", ranked("zz", 1, 5)}}, {q("q1", "t1")}, 0.0},
        {"recall short list", Metric::Recall, 10, {{"q1", ranked("t1", 2, 3)}}, {q("q1", "t1")}, 1.0},

        {"ac 3 of 4", Metric::AC, 4, {{"a", {"m1", "m2", "m3", "m6"}}}, {metric_query("a", "m1", "t:a", "")}, 3.0 / 4.0},
        {"ac negative excludes", Metric::AC, 4, {{"a", {"m1", "m2", "m3", "m6"}}},
         {metric_query("a", "m1", "t:a", "t:c")}, 2.0 / 4.0},
        {"ac vacuous", Metric::AC, 4, {{"a", {"m1", "m2", "m3", "m4"}}}, {metric_query("a", "m1", "", "")}, 1.0},
        {"ac 1 of 2", Metric::AC, 2, {{"a", {"m1", "m3", "m2"}}}, {metric_query("a", "m1", "t:a", "")}, 1.0 / 2.0},
        {"ac two queries", Metric::AC, 4,
         {{"a", {"m1", "m2", "m3", "m6"}}, {"b", {"m3", "m4", "m5", "m1"}}},
         {metric_query("a", "m1", "t:a", ""), metric_query("b", "m3", "t:d", "")}, (3.0 / 4.0 + 1.0 / 4.0) / 2.0},
        {"ac none", Metric::AC, 1, {{"a", {"m2"}}}, {metric_query("a", "m1", "t:a", "t:c")}, 0.0},
        {"ac exact positives", Metric::AC, 2, {{"a", {"m1", "m6"}}}, {metric_query("a", "m1", "t:a; t:b", "t:d")}, 1.0},

        {"ild worked example", Metric::ILD, 3, {{"a", {"m1", "m2", "m3"}}}, {}, (2.0 / 3.0 + 1.0 + 1.0) / 3.0},
        {"ild identical", Metric::ILD, 2, {{"a", {"m1", "m6"}}}, {}, 0.0},
        {"ild disjoint", Metric::ILD, 2, {{"a", {"m1", "m3"}}}, {}, 1.0},
        {"ild both empty", Metric::ILD, 2, {{"a", {"m4", "m5"}}}, {}, 0.0},
        {"ild single item", Metric::ILD, 10, {{"a", {"m1"}}}, {}, 0.0},
        {"ild two queries", Metric::ILD, 2, {{"a", {"m1", "m2", "m3"}}, {"b", {"m3", "m4"}}}, {},
         (2.0 / 3.0 + 1.0) / 2.0},
    };
}

inline double evaluate(const MetricCase& c, const GalleryIndex& gallery) {
    switch (c.metric) {
        case Metric::Recall: return recall_at_k(c.rankings, c.queries, c.k);
        case Metric::AC: return attribute_consistency_at_k(c.rankings, c.queries, gallery, c.k);
        case Metric::ILD: return intra_list_diversity_at_k(c.rankings, gallery, c.k);
    }
    return -1.0;
}

}  // namespace p2k::testing
