#include "p2k/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "p2k/edit_parser.hpp"
#include "p2k/error.hpp"
#include "p2k/pipeline.hpp"

namespace p2k {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

bool looks_like_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[4] = {};
    in.read(magic, 4);
    return in.gcount() == 4 && std::string_view(magic, 4) == "P2K1";
}

std::string required_string(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_string()) {
        throw Error(ErrorCode::InvalidArgument, std::string("query row needs a string \"") + field + "\"");
    }
    return j[field].get<std::string>();
}

json percent_map(const std::map<std::size_t, double>& values) {
    json out = json::object();
    for (const auto& [k, v] : values) out[std::to_string(k)] = as_percent(v);
    return out;
}

}  // namespace

BenchmarkQuery benchmark_query_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "query row must be an object");
    BenchmarkQuery q;
    q.query_id = required_string(j, "query_id");
    q.edit = j.contains("edit") ? required_string(j, "edit") : "";
    q.target_id = required_string(j, "target_id");
    q.reference = dictionary_from_json(j.value("reference", json::array()));
    q.positive_constraints = entries_from_json(j.value("positive_constraints", json::array()));
    q.negative_constraints = entries_from_json(j.value("negative_constraints", json::array()));
    for (const auto& neg : q.negative_constraints) {
        if (std::find(q.positive_constraints.begin(), q.positive_constraints.end(), neg) !=
            q.positive_constraints.end()) {
            throw Error(ErrorCode::ContradictoryUpdates,
                        "query '" + q.query_id + "' both requires and excludes " + neg.key() + ":" + neg.value());
        }
    }
    return q;
}

json to_json(const BenchmarkQuery& q) {
    return {{"query_id", q.query_id},
            {"reference", to_json(q.reference)},
            {"edit", q.edit},
            {"target_id", q.target_id},
            {"positive_constraints", to_json(std::span<const AttributeEntry>(q.positive_constraints))},
            {"negative_constraints", to_json(std::span<const AttributeEntry>(q.negative_constraints))}};
}

std::vector<BenchmarkQuery> load_queries_jsonl(const std::filesystem::path& path) {
    auto rows = read_jsonl(path);
    std::vector<BenchmarkQuery> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        try {
            out.push_back(benchmark_query_from_json(rows[i]));
        } catch (const Error& e) {
            throw Error(e.code(), path.string() + " row " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

void save_queries_jsonl(const std::filesystem::path& path, std::span<const BenchmarkQuery> queries) {
    std::vector<json> rows;
    rows.reserve(queries.size());
    for (const auto& q : queries) rows.push_back(to_json(q));
    write_jsonl(path, rows);
}

double as_percent(double fraction) { return std::round(fraction * 10000.0) / 100.0; }

MetricsReport run_benchmark(const GalleryIndex& index, const EmbedderConfig& cfg,
                            std::span<const BenchmarkQuery> queries, const BenchmarkConfig& config) {
    if (!config.toggles.use_pos) {
        throw Error(ErrorCode::InvalidArgument, "positive constraints cannot be disabled");
    }
    if (config.cutoffs.empty() || std::find(config.cutoffs.begin(), config.cutoffs.end(), 0u) != config.cutoffs.end()) {
        throw Error(ErrorCode::InvalidArgument, "cutoffs must be a non-empty list of positive integers");
    }
    index.check_fingerprint(cfg);

    const std::size_t depth = *std::max_element(config.cutoffs.begin(), config.cutoffs.end());
    RetrievalOptions options;
    options.weights = config.weights;
    options.rerank = config.rerank;
    options.rerank.k = depth;
    options.rerank.pool_size = std::max(config.rerank.pool_size, depth);
    options.use_mmr = config.toggles.use_mmr;
    options.toggles.use_neg = config.toggles.use_neg;
    options.toggles.use_open = config.toggles.use_open;

    MetricsReport report;
    std::vector<BenchmarkQuery> succeeded;
    for (const auto& q : queries) {
        try {
            if (!index.find(q.target_id)) {
                throw Error(ErrorCode::UnknownCandidateId, "target '" + q.target_id + "' is not in the gallery");
            }
            EditProgram edit =
                config.decompose_endpoint ? decompose_remote(q.edit, *config.decompose_endpoint) : parse_edit(q.edit);
            auto result = retrieve(index, cfg, q.reference, std::move(edit), options);

            std::vector<std::string> ids;
            ids.reserve(result.results.size());
            for (const auto& r : result.results) ids.push_back(r.id);

            PerQueryRow row;
            row.query_id = q.query_id;
            auto hit = std::find(ids.begin(), ids.end(), q.target_id);
            row.target_rank = hit == ids.end() ? 0 : static_cast<std::size_t>(hit - ids.begin()) + 1;
            row.ac = list_attribute_consistency(ids, q, index, depth);
            row.ild = list_diversity(ids, index, depth);

            report.rankings[q.query_id] = std::move(ids);
            report.rows.push_back(std::move(row));
            succeeded.push_back(q);
        } catch (const Error& e) {
            report.failures.push_back({q.query_id, std::string(to_string(e.code())), e.what()});
        }
    }

    for (std::size_t k : config.cutoffs) {
        report.recall_at[k] = recall_at_k(report.rankings, succeeded, k);
        report.ac_at[k] = attribute_consistency_at_k(report.rankings, succeeded, index, k);
        report.ild_at[k] = intra_list_diversity_at_k(report.rankings, index, k);
    }

    report.config_echo = {
        {"alpha", config.weights.alpha},
        {"beta", config.weights.beta},
        {"lambda", config.rerank.lambda},
        {"pool", options.rerank.pool_size},
        {"k", depth},
        {"cutoffs", config.cutoffs},
        {"use_pos", config.toggles.use_pos},
        {"use_neg", config.toggles.use_neg},
        {"use_open", config.toggles.use_open},
        {"use_mmr", config.toggles.use_mmr},
        {"embedder_fingerprint", hex64(cfg.fingerprint())},
        {"dimension", cfg.dimension},
        {"gallery_size", index.size()},
        {"queries", queries.size()},
        {"failed", report.failures.size()},
    };
    return report;
}

MetricsReport run_benchmark(const std::filesystem::path& gallery, const std::filesystem::path& queries,
                            const EmbedderConfig& cfg, const BenchmarkConfig& config) {
    GalleryIndex index = looks_like_index(gallery) ? load_index(gallery) : build_index(load_gallery_jsonl(gallery), cfg);
    auto qs = load_queries_jsonl(queries);
    return run_benchmark(index, cfg, qs, config);
}

json report_to_json(const MetricsReport& report, bool include_rankings) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"query_id", r.query_id},
                        {"target_rank", r.target_rank},
                        {"ac", as_percent(r.ac)},
                        {"ild", as_percent(r.ild)}});
    }
    json failures = json::array();
    for (const auto& f : report.failures) {
        failures.push_back({{"query_id", f.query_id}, {"code", f.code}, {"message", f.message}});
    }
    json out = {{"recall_at", percent_map(report.recall_at)},
                {"ac_at", percent_map(report.ac_at)},
                {"ild_at", percent_map(report.ild_at)},
                {"per_query", std::move(rows)},
                {"failures", std::move(failures)},
                {"config", report.config_echo}};
    if (include_rankings) out["rankings"] = report.rankings;
    return out;
}

std::string report_to_table(const MetricsReport& report) {
    std::ostringstream os;
    char buf[64];
    os << "metric ";
    for (const auto& [k, v] : report.recall_at) {
        std::snprintf(buf, sizeof buf, "%9s", ("@" + std::to_string(k)).c_str());
        os << buf;
    }
    os << '\n';
    auto line = [&](const char* name, const std::map<std::size_t, double>& values) {
        std::snprintf(buf, sizeof buf, "%-7s", name);
        os << buf;
        for (const auto& [k, v] : values) {
            std::snprintf(buf, sizeof buf, "%9.2f", as_percent(v));
            os << buf;
        }
        os << '\n';
    };
    line("Recall", report.recall_at);
    line("AC", report.ac_at);
    line("ILD", report.ild_at);
    os << "queries: " << report.rows.size() << " ok, " << report.failures.size() << " failed\n";
    for (const auto& f : report.failures) os << "  " << f.query_id << ": " << f.code << ": " << f.message << '\n';
    return os.str();
}

}  // namespace p2k
