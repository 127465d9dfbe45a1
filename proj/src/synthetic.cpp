#include "p2k/synthetic.hpp"

#include <algorithm>
#include <unordered_set>

#include "p2k/edit_parser.hpp"
#include "p2k/error.hpp"

namespace p2k {

namespace {

std::string padded_id(const char* prefix, std::size_t i, int width) {
    std::string digits = std::to_string(i);
    if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
    return prefix + digits;
}

int id_width(std::size_t n) {
    int width = 1;
    for (std::size_t v = n > 0 ? n - 1 : 0; v >= 10; v /= 10) ++width;
    return std::max(width, 6);
}

// Schema flattened into canonical entries, one vector of values per key.
struct CanonicalSchema {
    std::vector<std::string> keys;
    std::vector<std::vector<AttributeEntry>> values;
};

CanonicalSchema canonical_schema(const Schema& schema) {
    if (schema.empty()) throw Error(ErrorCode::SchemaTooSmall, "schema has no keys");
    CanonicalSchema out;
    for (const auto& [key, values] : schema) {
        if (values.size() < 2) {
            throw Error(ErrorCode::SchemaTooSmall, "schema key '" + key + "' needs at least two values");
        }
        std::vector<AttributeEntry> entries;
        for (const auto& v : values) entries.push_back(canonicalize(key, v));
        std::sort(entries.begin(), entries.end());
        entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
        if (entries.size() < 2) {
            throw Error(ErrorCode::SchemaTooSmall, "schema key '" + key + "' has fewer than two distinct values");
        }
        out.keys.push_back(entries.front().key());
        out.values.push_back(std::move(entries));
    }
    return out;
}

}  // namespace

Schema default_schema() {
    return {
        {"color", {"black", "blue", "red", "white"}},
        {"fabric", {"cotton", "denim", "silk", "wool"}},
        {"fit", {"loose", "oversized", "regular", "slim"}},
        {"neckline", {"collar", "crew", "turtleneck", "v-neck"}},
        {"pattern", {"floral", "plaid", "solid", "striped"}},
        {"sleeve", {"long", "short", "sleeveless", "three quarter"}},
    };
}

SyntheticBenchmark generate_synthetic(std::uint64_t seed, const Schema& schema, std::size_t n_items,
                                      std::size_t n_queries) {
    const auto cs = canonical_schema(schema);

    double combinations = 1.0;
    for (const auto& v : cs.values) combinations *= static_cast<double>(v.size());
    if (static_cast<double>(n_items) > combinations) {
        throw Error(ErrorCode::SchemaTooSmall, "schema admits only " + std::to_string(combinations) +
                                                   " distinct dictionaries, asked for " + std::to_string(n_items));
    }
    if (n_queries > 0 && n_items == 0) {
        throw Error(ErrorCode::SchemaTooSmall, "queries need at least one gallery item");
    }

    SplitMix64 rng(seed);
    SyntheticBenchmark out;
    out.items.reserve(n_items);

    // One value index per key, per item.
    std::vector<std::vector<std::size_t>> choices;
    std::unordered_set<std::string> seen;
    const int item_width = id_width(n_items);
    while (out.items.size() < n_items) {
        std::vector<std::size_t> pick(cs.keys.size());
        std::vector<AttributeEntry> entries;
        for (std::size_t k = 0; k < cs.keys.size(); ++k) {
            pick[k] = rng.uniform(cs.values[k].size());
            entries.push_back(cs.values[k][pick[k]]);
        }
        VisualDictionary dict(std::move(entries));
        if (!seen.insert(serialize(dict)).second) continue;  // redraw duplicates
        out.items.push_back({padded_id("item-", out.items.size(), item_width), std::move(dict), {}});
        choices.push_back(std::move(pick));
    }

    const int query_width = id_width(n_queries);
    for (std::size_t q = 0; q < n_queries; ++q) {
        std::size_t target = rng.uniform(n_items);
        std::size_t n_mutate = std::min<std::size_t>(1 + rng.uniform(2), cs.keys.size());

        std::vector<std::size_t> key_order(cs.keys.size());
        for (std::size_t i = 0; i < key_order.size(); ++i) key_order[i] = i;
        for (std::size_t i = 0; i < n_mutate; ++i) {
            std::size_t j = i + rng.uniform(key_order.size() - i);
            std::swap(key_order[i], key_order[j]);
        }
        key_order.resize(n_mutate);
        std::sort(key_order.begin(), key_order.end());

        BenchmarkQuery query;
        query.query_id = padded_id("q-", q, query_width);
        query.target_id = out.items[target].id;

        std::vector<AttributeEntry> reference;
        std::vector<std::size_t> ref_pick = choices[target];
        for (std::size_t k : key_order) {
            std::size_t actual = choices[target][k];
            std::size_t displaced = rng.uniform(cs.values[k].size() - 1);
            if (displaced >= actual) ++displaced;
            ref_pick[k] = displaced;
            query.positive_constraints.push_back(cs.values[k][actual]);
            query.negative_constraints.push_back(cs.values[k][displaced]);
        }
        for (std::size_t k = 0; k < cs.keys.size(); ++k) reference.push_back(cs.values[k][ref_pick[k]]);
        query.reference = VisualDictionary(std::move(reference));

        EditProgram edit;
        for (const auto& e : query.positive_constraints) edit.updates.push_back({e, Polarity::Positive});
        for (const auto& e : query.negative_constraints) edit.updates.push_back({e, Polarity::Negative});
        query.edit = render_structured(edit);
        out.queries.push_back(std::move(query));
    }
    return out;
}

}  // namespace p2k
