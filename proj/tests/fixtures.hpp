// Shared test fixtures and independent oracles. Nothing here calls the code
// paths it is used to check: the oracles work on plain strings, std::set and
// their own dot products.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "p2k/dictionary.hpp"
#include "p2k/edit_parser.hpp"
#include "p2k/gallery_index.hpp"
#include "p2k/ranking.hpp"

namespace p2k::testing {

// ---------------------------------------------------------------------------
// Compact notation: "color:red; pattern:striped" for dictionaries and
// "+color:red -pattern:striped 0fit:slim" for signed sets.
// ---------------------------------------------------------------------------

inline VisualDictionary dict(const std::string& text) { return deserialize(text); }

inline SignedEntry signed_entry(const std::string& key, const std::string& value, Polarity p) {
    return {canonicalize(key, value), p};
}

using Triple = std::tuple<std::string, std::string, int>;

/// "+k:v; -k:v; 0k:v" -> set of (key, value, polarity).
inline std::set<Triple> triples(const std::string& text) {
    std::set<Triple> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t semi = text.find(';', pos);
        std::string item = text.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
        pos = semi == std::string::npos ? text.size() : semi + 1;
        auto b = item.find_first_not_of(' ');
        if (b == std::string::npos) continue;
        item = item.substr(b);
        int pol = item[0] == '+' ? 1 : item[0] == '-' ? -1 : 0;
        auto colon = item.find(':');
        std::string key = item.substr(1, colon - 1);
        std::string value = item.substr(colon + 1);
        while (!value.empty() && value.back() == ' ') value.pop_back();
        out.insert({key, value, pol});
    }
    return out;
}

inline std::set<Triple> triples(const QueryDictionary& q) {
    std::set<Triple> out;
    for (const auto& e : q) out.insert({e.entry.key(), e.entry.value(), static_cast<int>(e.polarity)});
    return out;
}

inline std::vector<SignedEntry> updates(const std::string& text) {
    std::vector<SignedEntry> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t semi = text.find(';', pos);
        std::string item = text.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
        pos = semi == std::string::npos ? text.size() : semi + 1;
        auto b = item.find_first_not_of(' ');
        if (b == std::string::npos) continue;
        item = item.substr(b);
        auto colon = item.find(':');
        out.push_back(signed_entry(item.substr(1, colon - 1), item.substr(colon + 1),
                                   item[0] == '+' ? Polarity::Positive : Polarity::Negative));
    }
    return out;
}

/// Set-algebra reading of merge: updates verbatim, plus every reference pair
/// whose key no update mentions, as an anchor. nullopt = contradiction.
inline std::optional<std::set<Triple>> merge_oracle(const std::vector<std::pair<std::string, std::string>>& reference,
                                                    const std::vector<Triple>& edits) {
    std::set<std::pair<std::string, std::string>> plus, minus;
    std::set<std::string> keys;
    for (const auto& [k, v, p] : edits) {
        (p > 0 ? plus : minus).insert({k, v});
        keys.insert(k);
    }
    for (const auto& kv : plus) {
        if (minus.count(kv)) return std::nullopt;
    }
    std::set<Triple> out(edits.begin(), edits.end());
    for (const auto& [k, v] : reference) {
        if (!keys.count(k)) out.insert({k, v, 0});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Merge table: reference, structured updates, expected signed set or "ERR".
// ---------------------------------------------------------------------------

struct MergeCase {
    const char* reference;
    const char* edits;
    const char* expected;
};

inline const std::vector<MergeCase>& merge_cases() {
    static const std::vector<MergeCase> cases = {
        {"", "", ""},
        {"color:blue; pattern:floral", "", "0color:blue; 0pattern:floral"},
        {"color:blue; pattern:floral", "+color:red", "+color:red; 0pattern:floral"},
        {"pattern:striped", "-pattern:striped", "-pattern:striped"},
        {"color:blue", "+color:blue", "+color:blue"},
        {"color:blue; color:white", "+color:red", "+color:red"},
        {"color:blue; fit:slim", "-color:blue", "-color:blue; 0fit:slim"},
        {"color:blue; fit:slim", "-color:green", "-color:green; 0fit:slim"},
        {"", "+color:red", "+color:red"},
        {"", "-color:red", "-color:red"},
        {"", "+color:red; -color:red", "ERR"},
        {"color:red", "+color:red; -color:red", "ERR"},
        {"a:b", "+c:d", "+c:d; 0a:b"},
        {"a:b; c:d; e:f", "+c:x", "+c:x; 0a:b; 0e:f"},
        {"a:b; c:d; e:f", "-c:d; -e:f", "-c:d; -e:f; 0a:b"},
        {"a:b; c:d", "+a:x; +a:y", "+a:x; +a:y; 0c:d"},
        {"a:b; c:d", "+a:x; -a:y", "+a:x; -a:y; 0c:d"},
        {"a:b", "+a:x; +a:x", "+a:x"},
        {"a:b", "-a:x; -a:x", "-a:x"},
        {"a:b; a:c; d:e", "-a:c", "-a:c; 0d:e"},
        {"Color:Red", "+pattern:striped", "+pattern:striped; 0color:red"},
        {"color:red; pattern:plain", "+pattern:striped; -color:red", "+pattern:striped; -color:red"},
        {"color:red", "+color:red; +pattern:dots", "+color:red; +pattern:dots"},
        {"sleeve:long; fit:slim; color:black", "+sleeve:short", "+sleeve:short; 0fit:slim; 0color:black"},
        {"sleeve:long; fit:slim; color:black", "-sleeve:long; +sleeve:short",
         "+sleeve:short; -sleeve:long; 0fit:slim; 0color:black"},
        {"x:1; y:2; z:3", "-x:9; -y:9; -z:9", "-x:9; -y:9; -z:9"},
        {"x:1; y:2; z:3", "+w:4", "+w:4; 0x:1; 0y:2; 0z:3"},
        {"x:1", "+x:1; -x:2", "+x:1; -x:2"},
        {"x:1", "-x:1; +x:2", "+x:2; -x:1"},
        {"x:1; y:2", "+x:2; -x:2", "ERR"},
        {"", "+a:b; +c:d; -a:b", "ERR"},
        {"a:b", "-a:b; +c:d; +a:b", "ERR"},
        {"neckline:crew; color:blue", "+neckline:v-neck", "+neckline:v-neck; 0color:blue"},
        {"fabric:denim", "-fabric:silk", "-fabric:silk"},
        {"color:blue; pattern:floral; fit:loose", "+color:red; -pattern:floral",
         "+color:red; -pattern:floral; 0fit:loose"},
        {"sleeve type:long", "+sleeve type:short", "+sleeve type:short"},
        {"sleeve type:long; color:red", "+sleeve:short", "+sleeve:short; 0sleeve type:long; 0color:red"},
        {"COLOR: Dark  Blue", "-color:dark blue", "-color:dark blue"},
        {"color:dark blue; fit:slim", "+color:light blue", "+color:light blue; 0fit:slim"},
        {"a:b; c:d; e:f; g:h", "", "0a:b; 0c:d; 0e:f; 0g:h"},
        {"a:b; c:d; e:f; g:h", "+c:z; -g:h", "+c:z; -g:h; 0a:b; 0e:f"},
        {"a:b; c:d", "+e:f; -g:h", "+e:f; -g:h; 0a:b; 0c:d"},
        {"a:b", "+a:b; -a:c; +a:d", "+a:b; +a:d; -a:c"},
        {"a:b; b:a", "+b:b", "+b:b; 0a:b"},
        {"k:v", "-k:v; -k:w", "-k:v; -k:w"},
        {"k:v; m:n", "+k:v; +m:n", "+k:v; +m:n"},
        {"k:v; m:n", "-k:v; -m:n", "-k:v; -m:n"},
        {"k:v; m:n", "+k:w; -k:w", "ERR"},
        {"color:red; color:blue; pattern:striped", "-color:red", "-color:red; 0pattern:striped"},
        {"color:red; color:blue; pattern:striped", "", "0color:blue; 0color:red; 0pattern:striped"},
    };
    return cases;
}

// ---------------------------------------------------------------------------
// Parser golden corpus (hand-annotated).
// ---------------------------------------------------------------------------

enum class ParseOutcome { Ok, Unparsable, Contradiction };

struct ParseCase {
    const char* text;
    ParseOutcome outcome;
    const char* expected;              // structured rendering for Ok
    std::vector<TextSpan> spans;       // expected spans (Ok), or the error span (Unparsable)
};

inline const std::vector<ParseCase>& parser_corpus() {
    using O = ParseOutcome;
    static const std::vector<ParseCase> corpus = {
        {"+color:red; -pattern:striped", O::Ok, "+color:red; -pattern:striped", {{0, 10}, {12, 28}}},
        {"change color to red and without pattern striped", O::Ok, "+color:red; -pattern:striped",
         {{0, 19}, {24, 47}}},
        {"+color:red", O::Ok, "+color:red", {{0, 10}}},
        {"-pattern:floral", O::Ok, "-pattern:floral", {{0, 15}}},
        {"+Color:Red", O::Ok, "+color:red", {}},
        {"+sleeve type:long", O::Ok, "+sleeve type:long", {}},
        {" +color : red ,  -fit:slim ", O::Ok, "+color:red; -fit:slim", {{1, 13}, {17, 26}}},
        {"add pattern floral", O::Ok, "+pattern:floral", {{0, 18}}},
        {"set color to navy blue", O::Ok, "+color:navy blue", {}},
        {"set color navy", O::Ok, "+color:navy", {}},
        {"make fit oversized", O::Ok, "+fit:oversized", {}},
        {"with sleeve long", O::Ok, "+sleeve:long", {}},
        {"remove pattern striped", O::Ok, "-pattern:striped", {}},
        {"drop collar shirt collar", O::Ok, "-collar:shirt collar", {}},
        {"no pattern polka dots", O::Ok, "-pattern:polka dots", {}},
        {"without fabric silk", O::Ok, "-fabric:silk", {}},
        {"change color to dark green", O::Ok, "+color:dark green", {}},
        {"Change Color To Red", O::Ok, "+color:red", {}},
        {"add color red, remove pattern striped; with fit slim", O::Ok,
         "+color:red; -pattern:striped; +fit:slim", {{0, 13}, {15, 37}, {39, 52}}},
        {"add color red and add pattern floral and no fabric wool", O::Ok,
         "+color:red; +pattern:floral; -fabric:wool", {}},
        {"+color:red; +color:blue", O::Ok, "+color:red; +color:blue", {}},
        {"-color:red; -color:blue", O::Ok, "-color:red; -color:blue", {}},
        {"", O::Ok, "", {}},
        {"  ;  , ", O::Ok, "", {}},
        {"+color:red;", O::Ok, "+color:red", {{0, 10}}},
        {"make it fabulous", O::Unparsable, "", {{0, 16}}},
        {"+color:red; color red", O::Unparsable, "", {{12, 21}}},
        {"+color", O::Unparsable, "", {{0, 6}}},
        {"+color:red; -color:red", O::Contradiction, "", {}},
        {"add color", O::Unparsable, "", {{0, 9}}},
    };
    return corpus;
}

// ---------------------------------------------------------------------------
// Ranking oracles.
// ---------------------------------------------------------------------------

inline double oracle_dot(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return s;
}

/// Greedy MMR recomputed from scratch at every step: the full objective is
/// evaluated for every remaining candidate against the whole selected set.
inline std::vector<std::string> mmr_oracle(const std::vector<ScoredCandidate>& pool, const GalleryIndex& index,
                                           double lambda, std::size_t k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& c : pool) {
        lo = std::min(lo, c.relevance);
        hi = std::max(hi, c.relevance);
    }
    auto rel_hat = [&](const ScoredCandidate& c) { return hi > lo ? (c.relevance - lo) / (hi - lo) : 0.0; };
    auto dist = [&](const std::string& a, const std::string& b) {
        double cos = oracle_dot(index.row(*index.find(a)), index.row(*index.find(b)));
        cos = std::clamp(cos, -1.0, 1.0);
        if (cos == 0.0) cos = 0.0;
        return (1.0 - cos) / 2.0;
    };

    std::vector<std::string> selected;
    while (selected.size() < k) {
        const ScoredCandidate* best = nullptr;
        double best_obj = 0.0;
        for (const auto& c : pool) {
            if (std::find(selected.begin(), selected.end(), c.id) != selected.end()) continue;
            double min_d = 1.0;
            for (const auto& s : selected) min_d = std::min(min_d, dist(c.id, s));
            double obj = (1.0 - lambda) * rel_hat(c) + lambda * min_d;
            if (!best || obj > best_obj || (obj == best_obj && c.id < best->id)) {
                best = &c;
                best_obj = obj;
            }
        }
        selected.push_back(best->id);
    }
    return selected;
}

/// Random gallery over a small vocabulary so near-duplicates and ties are common.
inline std::vector<GalleryItem> random_gallery(std::mt19937_64& rng, std::size_t n) {
    static const std::vector<std::string> keys{"color", "pattern", "fit"};
    static const std::vector<std::string> values{"red", "blue", "plain", "striped"};
    std::vector<GalleryItem> items;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<AttributeEntry> entries;
        std::size_t m = rng() % 4;
        for (std::size_t j = 0; j < m; ++j) entries.push_back(canonicalize(keys[rng() % keys.size()], values[rng() % values.size()]));
        items.push_back({"g" + std::to_string(100 + i), VisualDictionary(std::move(entries)), {}});
    }
    return items;
}

/// Pool of `n` distinct gallery rows with random relevance; coarse values make ties likely.
inline std::vector<ScoredCandidate> random_pool(std::mt19937_64& rng, const GalleryIndex& index, std::size_t n) {
    std::vector<std::size_t> rows(index.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::shuffle(rows.begin(), rows.end(), rng);
    std::vector<ScoredCandidate> pool;
    for (std::size_t i = 0; i < n && i < rows.size(); ++i) {
        ScoredCandidate c;
        c.id = index.item(rows[i]).id;
        c.row = rows[i];
        c.relevance = static_cast<double>(rng() % 5) / 4.0;
        pool.push_back(std::move(c));
    }
    return pool;
}

}  // namespace p2k::testing
