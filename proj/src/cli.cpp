#include "p2k/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "p2k/benchmark.hpp"
#include "p2k/edit_parser.hpp"
#include "p2k/error.hpp"
#include "p2k/json_io.hpp"
#include "p2k/pipeline.hpp"
#include "p2k/service.hpp"
#include "p2k/synthetic.hpp"

namespace p2k {

namespace {

struct EmbedderFlags {
    std::optional<std::size_t> dimension;
    std::string endpoint;
    std::size_t batch_size = 64;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--dim", dimension, "Embedding dimension (default: the index's, or 256)");
        cmd.add_option("--embed-endpoint", endpoint, "Remote embedding service; local hashing when omitted")
            ->envname("P2K_EMBED_ENDPOINT");
        cmd.add_option("--batch-size", batch_size, "Texts per remote embedding request")->check(CLI::PositiveNumber);
    }

    EmbedderConfig resolve(std::optional<std::size_t> index_dimension = std::nullopt) const {
        EmbedderConfig cfg;
        if (!endpoint.empty()) {
            cfg.kind = EmbedderKind::Remote;
            cfg.endpoint = endpoint;
        }
        cfg.dimension = dimension.value_or(index_dimension.value_or(256));
        cfg.batch_size = batch_size;
        return cfg;
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A JSON entry array, an object with "dictionary", or serialized "key:value; ..." text.
VisualDictionary load_reference(const std::string& path) {
    std::string text = read_file(path);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) return deserialize(text);
    if (j.is_object() && j.contains("dictionary")) return dictionary_from_json(j["dictionary"]);
    return dictionary_from_json(j);
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

void print_results_table(std::ostream& out, const RetrievalResult& result) {
    out << "parsed edit:  " << render_structured(result.parsed_edit) << '\n';
    auto split = split_by_polarity(result.merged_query);
    out << "query (+):    " << serialize(split.positive) << '\n';
    out << "query (0):    " << serialize(split.open) << '\n';
    out << "query (-):    " << serialize(split.negative) << '\n';
    char buf[256];
    std::snprintf(buf, sizeof buf, "%5s  %-24s %9s %9s %9s %9s %6s\n", "rank", "id", "p", "o", "n", "R", "pool");
    out << buf;
    for (const auto& r : result.results) {
        std::snprintf(buf, sizeof buf, "%5zu  %-24s %9s %9s %9s %9s %6zu\n", r.rank, r.id.c_str(), fixed4(r.p).c_str(),
                      fixed4(r.o).c_str(), fixed4(r.n).c_str(), fixed4(r.relevance).c_str(), r.pool_rank);
        out << buf;
    }
}

json results_json(const RetrievalResult& result) {
    json rows = json::array();
    for (const auto& r : result.results) {
        rows.push_back({{"id", r.id},
                        {"p", r.p},
                        {"o", r.o},
                        {"n", r.n},
                        {"relevance", r.relevance},
                        {"rank", r.rank},
                        {"pool_rank", r.pool_rank}});
    }
    json merged = json::array();
    for (const auto& e : result.merged_query) merged.push_back(to_json(e));
    return {{"results", rows}, {"parsed_edit", to_json(result.parsed_edit)}, {"merged_query", merged}};
}

Schema load_schema(const std::string& path) {
    json j = json::parse(read_file(path));
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "schema must map keys to arrays of values");
    Schema schema;
    for (const auto& [key, values] : j.items()) {
        if (!values.is_array()) throw Error(ErrorCode::InvalidArgument, "schema values for '" + key + "' must be an array");
        for (const auto& v : values) schema[key].insert(v.get<std::string>());
    }
    return schema;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Attribute-dictionary composed retrieval engine"};
    app.require_subcommand(1);
    std::string format = "table";
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "Output encoding")->check(CLI::IsMember({"json", "table"}));
    };

    // index build | inspect
    auto* index_cmd = app.add_subcommand("index", "Build or inspect a gallery index");
    index_cmd->require_subcommand(1);
    auto* build_cmd = index_cmd->add_subcommand("build", "Embed a gallery JSONL into an index file");
    std::string gallery_path, index_out;
    EmbedderFlags build_embed;
    build_cmd->add_option("--gallery", gallery_path, "Gallery JSONL")->required()->check(CLI::ExistingFile);
    build_cmd->add_option("--out", index_out, "Index file to write")->required();
    build_embed.add_to(*build_cmd);

    auto* inspect_cmd = index_cmd->add_subcommand("inspect", "Describe an index file");
    std::string inspect_path;
    inspect_cmd->add_option("--index", inspect_path, "Index file")->required()->check(CLI::ExistingFile);
    add_format(inspect_cmd);

    // query
    auto* query_cmd = app.add_subcommand("query", "Run one composed query");
    std::string query_index, reference_path, reference_id, edit, decompose;
    EmbedderFlags query_embed;
    IntentWeights weights;
    RerankParams rerank;
    bool no_mmr = false;
    query_cmd->add_option("--index", query_index, "Index file")->envname("P2K_INDEX")->required();
    auto* ref_opt = query_cmd->add_option("--reference", reference_path, "Reference dictionary file");
    query_cmd->add_option("--reference-id", reference_id, "Use a gallery item's dictionary as the reference")
        ->excludes(ref_opt);
    query_cmd->add_option("--edit", edit, "Edit instruction");
    query_cmd->add_option("--alpha", weights.alpha, "Positive vs negative balance")->check(CLI::Range(0.0, 1.0));
    query_cmd->add_option("--beta", weights.beta, "Anchor weight")->check(CLI::NonNegativeNumber);
    query_cmd->add_option("--lambda", rerank.lambda, "Diversity weight")->check(CLI::Range(0.0, 1.0));
    query_cmd->add_option("--k", rerank.k, "Results to return")->check(CLI::PositiveNumber);
    query_cmd->add_option("--pool", rerank.pool_size, "Candidate pool for reranking")->check(CLI::PositiveNumber);
    query_cmd->add_flag("--no-mmr", no_mmr, "Skip reranking");
    query_cmd->add_option("--decompose-endpoint", decompose, "Remote edit decomposition service");
    query_embed.add_to(*query_cmd);
    add_format(query_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Run a benchmark and report Recall/AC/ILD");
    std::string eval_gallery, eval_queries, report_out, eval_decompose;
    EmbedderFlags eval_embed;
    BenchmarkConfig bench;
    bool no_neg = false, no_open = false, eval_no_mmr = false, with_rankings = false;
    eval_cmd->add_option("--gallery", eval_gallery, "Gallery JSONL or index file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--queries", eval_queries, "Queries JSONL")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--alpha", bench.weights.alpha)->check(CLI::Range(0.0, 1.0));
    eval_cmd->add_option("--beta", bench.weights.beta)->check(CLI::NonNegativeNumber);
    eval_cmd->add_option("--lambda", bench.rerank.lambda)->check(CLI::Range(0.0, 1.0));
    eval_cmd->add_option("--pool", bench.rerank.pool_size)->check(CLI::PositiveNumber);
    eval_cmd->add_option("--cutoffs", bench.cutoffs, "Metric cutoffs K")->delimiter(',');
    eval_cmd->add_flag("--no-neg", no_neg, "Drop negative constraints");
    eval_cmd->add_flag("--no-open", no_open, "Drop open anchors");
    eval_cmd->add_flag("--no-mmr", eval_no_mmr, "Skip reranking");
    eval_cmd->add_flag("--rankings", with_rankings, "Include per-query rankings in the JSON report");
    eval_cmd->add_option("--out", report_out, "Also write the JSON report here");
    eval_cmd->add_option("--decompose-endpoint", eval_decompose, "Remote edit decomposition service");
    eval_embed.add_to(*eval_cmd);
    add_format(eval_cmd);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic benchmark");
    std::uint64_t seed = 42;
    std::size_t n_items = 1000, n_queries = 100;
    std::string schema_path, synth_gallery = "gallery.jsonl", synth_queries = "queries.jsonl";
    synth_cmd->add_option("--seed", seed);
    synth_cmd->add_option("--items", n_items);
    synth_cmd->add_option("--queries", n_queries);
    synth_cmd->add_option("--schema", schema_path, "JSON object key -> [values]")->check(CLI::ExistingFile);
    synth_cmd->add_option("--gallery-out", synth_gallery);
    synth_cmd->add_option("--queries-out", synth_queries);

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP query API");
    std::string config_path, serve_index, listen;
    serve_cmd->add_option("--config", config_path, "Flat JSON service config")->check(CLI::ExistingFile);
    serve_cmd->add_option("--index", serve_index, "Index file");
    serve_cmd->add_option("--listen", listen, "host:port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (build_cmd->parsed()) {
            auto cfg = build_embed.resolve();
            auto index = build_index(load_gallery_jsonl(gallery_path), cfg);
            save_index(index, index_out);
            out << "indexed " << index.size() << " items (dimension " << index.dimension() << ") -> " << index_out
                << '\n';
        } else if (inspect_cmd->parsed()) {
            auto index = load_index(inspect_path);
            char fp[19];
            std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(index.fingerprint()));
            if (format == "json") {
                out << json{{"gallery_size", index.size()}, {"dimension", index.dimension()}, {"fingerprint", fp}}.dump()
                    << '\n';
            } else {
                out << "items:       " << index.size() << "\ndimension:   " << index.dimension()
                    << "\nfingerprint: " << fp << '\n';
            }
        } else if (query_cmd->parsed()) {
            auto index = load_index(query_index);
            auto cfg = query_embed.resolve(index.dimension());
            VisualDictionary reference;
            if (!reference_id.empty()) {
                reference = index.item(index.row_of(reference_id)).dictionary;
            } else if (!reference_path.empty()) {
                reference = load_reference(reference_path);
            }
            EditProgram program = decompose.empty() ? parse_edit(edit) : decompose_remote(edit, decompose);
            RetrievalOptions options;
            options.weights = weights;
            options.rerank = rerank;
            options.rerank.pool_size = std::max(rerank.pool_size, rerank.k);
            options.use_mmr = !no_mmr;
            auto result = retrieve(index, cfg, reference, std::move(program), options);
            if (format == "json") {
                out << results_json(result).dump() << '\n';
            } else {
                print_results_table(out, result);
            }
        } else if (eval_cmd->parsed()) {
            bench.toggles.use_neg = !no_neg;
            bench.toggles.use_open = !no_open;
            bench.toggles.use_mmr = !eval_no_mmr;
            if (!eval_decompose.empty()) bench.decompose_endpoint = eval_decompose;
            std::optional<std::size_t> index_dim;
            {
                std::ifstream probe(eval_gallery, std::ios::binary);
                char magic[4] = {};
                probe.read(magic, 4);
                if (probe.gcount() == 4 && std::string_view(magic, 4) == "P2K1") {
                    index_dim = load_index(eval_gallery).dimension();
                }
            }
            auto report = run_benchmark(eval_gallery, eval_queries, eval_embed.resolve(index_dim), bench);
            auto j = report_to_json(report, with_rankings);
            if (!report_out.empty()) {
                std::ofstream f(report_out, std::ios::binary | std::ios::trunc);
                if (!f) throw Error(ErrorCode::Io, "cannot write " + report_out);
                f << j.dump(2) << '\n';
            }
            if (format == "json") {
                out << j.dump(2) << '\n';
            } else {
                out << report_to_table(report);
            }
            return report.ok() ? 0 : 1;
        } else if (synth_cmd->parsed()) {
            auto schema = schema_path.empty() ? default_schema() : load_schema(schema_path);
            auto data = generate_synthetic(seed, schema, n_items, n_queries);
            save_gallery_jsonl(synth_gallery, data.items);
            save_queries_jsonl(synth_queries, data.queries);
            out << "wrote " << data.items.size() << " items -> " << synth_gallery << ", " << data.queries.size()
                << " queries -> " << synth_queries << '\n';
        } else if (serve_cmd->parsed()) {
            ServiceConfig config;
            if (!config_path.empty()) config = service_config_from_json(json::parse(read_file(config_path)));
            apply_env_overrides(config);
            if (!serve_index.empty()) config.index_path = serve_index;
            if (!listen.empty()) parse_listen(listen, config.host, config.port);
            QueryService service(std::move(config));
            out << "serving " << service.snapshot()->size() << " items on " << service.config().host << ':'
                << service.config().port << std::endl;
            if (!service.listen()) throw Error(ErrorCode::Io, "cannot listen on " + service.config().host);
        }
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        if (!e.payload().empty()) err << "payload: " << e.payload() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace p2k
