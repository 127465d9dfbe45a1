#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "p2k/embedding.hpp"
#include "p2k/gallery_index.hpp"
#include "p2k/json_io.hpp"
#include "p2k/metrics.hpp"
#include "p2k/ranking.hpp"

namespace p2k {

/// Ablation switches. Positive constraints cannot be disabled.
struct BenchmarkToggles {
    bool use_pos = true;
    bool use_neg = true;
    bool use_open = true;
    bool use_mmr = true;
};

struct BenchmarkConfig {
    IntentWeights weights;
    RerankParams rerank;  // rerank.k is raised to the largest cutoff
    BenchmarkToggles toggles;
    std::vector<std::size_t> cutoffs{1, 5, 10, 50};
    std::optional<std::string> decompose_endpoint;
};

struct PerQueryRow {
    std::string query_id;
    std::size_t target_rank = 0;  // 1-based; 0 when the target is not in the list
    double ac = 0.0;              // at the largest cutoff
    double ild = 0.0;
};

struct QueryFailure {
    std::string query_id;
    std::string code;
    std::string message;
};

/// Metric values are fractions in [0, 1]; the renderers scale them by 100.
struct MetricsReport {
    std::map<std::size_t, double> recall_at;
    std::map<std::size_t, double> ac_at;
    std::map<std::size_t, double> ild_at;
    std::vector<PerQueryRow> rows;
    std::vector<QueryFailure> failures;
    Rankings rankings;
    json config_echo;

    bool ok() const noexcept { return failures.empty(); }
};

BenchmarkQuery benchmark_query_from_json(const json& j);
json to_json(const BenchmarkQuery& q);
std::vector<BenchmarkQuery> load_queries_jsonl(const std::filesystem::path& path);
void save_queries_jsonl(const std::filesystem::path& path, std::span<const BenchmarkQuery> queries);

/// parse -> merge -> score -> optional rerank for every query. A failing query
/// is recorded in `failures` and left out of the metrics; the run continues.
MetricsReport run_benchmark(const GalleryIndex& index, const EmbedderConfig& cfg,
                            std::span<const BenchmarkQuery> queries, const BenchmarkConfig& config);

/// Loads a gallery (JSONL, or a saved index when the file starts with the
/// index magic) and a queries JSONL, then runs the benchmark.
MetricsReport run_benchmark(const std::filesystem::path& gallery, const std::filesystem::path& queries,
                            const EmbedderConfig& cfg, const BenchmarkConfig& config);

/// Round to two decimals after scaling by 100.
double as_percent(double fraction);

json report_to_json(const MetricsReport& report, bool include_rankings = false);
std::string report_to_table(const MetricsReport& report);

}  // namespace p2k
