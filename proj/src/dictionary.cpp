#include "p2k/dictionary.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "p2k/error.hpp"

namespace p2k {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char to_lower_ascii(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool has_reserved(std::string_view s) {
    return s.find_first_of(":;") != std::string_view::npos;
}

}  // namespace

std::string normalize_token_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(to_lower_ascii(c));
    }
    return out;
}

AttributeEntry canonicalize(std::string_view raw_key, std::string_view raw_value) {
    std::string key = normalize_token_text(raw_key);
    std::string value = normalize_token_text(raw_value);
    if (key.empty()) throw Error(ErrorCode::EmptyField, "attribute key is empty");
    if (value.empty()) throw Error(ErrorCode::EmptyField, "attribute value is empty for key '" + key + "'");
    if (has_reserved(key) || has_reserved(value)) {
        throw Error(ErrorCode::ReservedCharacter,
                    "attribute '" + key + "' / '" + value + "' contains ':' or ';'");
    }
    return AttributeEntry(std::move(key), std::move(value));
}

VisualDictionary::VisualDictionary(std::vector<AttributeEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
    entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
}

bool VisualDictionary::contains(const AttributeEntry& e) const {
    return std::binary_search(entries_.begin(), entries_.end(), e);
}

bool VisualDictionary::has_key(std::string_view key) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const AttributeEntry& e) { return e.key() == key; });
}

std::string_view to_string(Polarity p) noexcept {
    switch (p) {
        case Polarity::Positive: return "+";
        case Polarity::Open: return "0";
        case Polarity::Negative: return "-";
    }
    return "?";
}

bool canonical_less(const SignedEntry& a, const SignedEntry& b) {
    return std::forward_as_tuple(polarity_rank(a.polarity), a.entry) <
           std::forward_as_tuple(polarity_rank(b.polarity), b.entry);
}

void check_no_contradiction(std::span<const SignedEntry> entries) {
    std::set<AttributeEntry> positives;
    for (const auto& e : entries) {
        if (e.polarity == Polarity::Positive) positives.insert(e.entry);
    }
    for (const auto& e : entries) {
        if (e.polarity == Polarity::Negative && positives.count(e.entry) != 0) {
            throw Error(ErrorCode::ContradictoryUpdates,
                        "'" + e.entry.key() + ":" + e.entry.value() + "' is both required and excluded");
        }
    }
}

QueryDictionary::QueryDictionary(std::vector<SignedEntry> entries) : entries_(std::move(entries)) {
    check_no_contradiction(entries_);
    std::sort(entries_.begin(), entries_.end(), canonical_less);
    entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
}

QueryDictionary merge(const VisualDictionary& reference, std::span<const SignedEntry> updates) {
    std::set<std::string, std::less<>> touched_keys;
    for (const auto& u : updates) {
        if (u.polarity == Polarity::Open) {
            throw Error(ErrorCode::InvalidArgument,
                        "open polarity cannot be authored in an edit ('" + u.entry.key() + "')");
        }
        touched_keys.insert(u.entry.key());
    }
    check_no_contradiction(updates);

    std::vector<SignedEntry> out(updates.begin(), updates.end());
    for (const auto& e : reference) {
        if (touched_keys.count(e.key()) == 0) out.push_back({e, Polarity::Open});
    }
    return QueryDictionary(std::move(out));
}

std::string serialize(std::span<const AttributeEntry> entries) {
    std::string out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i != 0) out += "; ";
        out += entries[i].key();
        out += ':';
        out += entries[i].value();
    }
    return out;
}

std::string serialize(const VisualDictionary& dict) { return serialize(dict.entries()); }

VisualDictionary deserialize(std::string_view text) {
    std::vector<AttributeEntry> entries;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t semi = text.find(';', pos);
        std::string_view item = text.substr(pos, semi == std::string_view::npos ? std::string_view::npos : semi - pos);
        if (!normalize_token_text(item).empty()) {
            std::size_t colon = item.find(':');
            if (colon == std::string_view::npos) {
                throw Error(ErrorCode::InvalidArgument, "expected key:value, got '" + std::string(item) + "'");
            }
            entries.push_back(canonicalize(item.substr(0, colon), item.substr(colon + 1)));
        }
        if (semi == std::string_view::npos) break;
        pos = semi + 1;
    }
    return VisualDictionary(std::move(entries));
}

PolaritySplit split_by_polarity(const QueryDictionary& q) {
    PolaritySplit split;
    for (const auto& e : q) {
        switch (e.polarity) {
            case Polarity::Positive: split.positive.push_back(e.entry); break;
            case Polarity::Open: split.open.push_back(e.entry); break;
            case Polarity::Negative: split.negative.push_back(e.entry); break;
        }
    }
    return split;
}

}  // namespace p2k
