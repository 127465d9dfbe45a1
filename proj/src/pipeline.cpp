#include "p2k/pipeline.hpp"

#include <unordered_map>

#include "p2k/error.hpp"

namespace p2k {

RetrievalResult retrieve(const GalleryIndex& index, const EmbedderConfig& cfg, const VisualDictionary& reference,
                         EditProgram edit, const RetrievalOptions& options) {
    options.weights.validate();
    options.rerank.validate();
    index.check_fingerprint(cfg);

    RetrievalResult out;
    out.merged_query = merge(reference, edit.updates);
    out.parsed_edit = std::move(edit);

    auto split = split_by_polarity(out.merged_query);
    if (!options.toggles.use_neg) split.negative.clear();
    if (!options.toggles.use_open) split.open.clear();

    out.pool = score_pool(embed_query(split, cfg), index, options.weights, options.rerank.pool_size);
    if (out.pool.empty()) return out;

    std::size_t k = std::min(options.rerank.k, out.pool.size());
    std::unordered_map<std::string_view, std::size_t> pool_pos;
    for (std::size_t i = 0; i < out.pool.size(); ++i) pool_pos.emplace(out.pool[i].id, i);

    std::vector<std::size_t> order;
    if (options.use_mmr) {
        RerankParams params = options.rerank;
        params.k = k;
        for (const auto& id : mmr_rerank(out.pool, index, params)) order.push_back(pool_pos.at(id));
    } else {
        for (std::size_t i = 0; i < k; ++i) order.push_back(i);
    }

    out.results.reserve(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto& c = out.pool[order[r]];
        out.results.push_back({c.id, c.p, c.o, c.n, c.relevance, r + 1, order[r] + 1});
    }
    return out;
}

}  // namespace p2k
