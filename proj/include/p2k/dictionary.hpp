#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace p2k {

/// One canonical key:value fact. Both fields are lowercase, trimmed, with
/// internal whitespace runs collapsed, and never contain ':' or ';'.
class AttributeEntry {
public:
    AttributeEntry() = default;

    const std::string& key() const noexcept { return key_; }
    const std::string& value() const noexcept { return value_; }

    friend auto operator<=>(const AttributeEntry&, const AttributeEntry&) = default;
    friend bool operator==(const AttributeEntry&, const AttributeEntry&) = default;

private:
    friend AttributeEntry canonicalize(std::string_view, std::string_view);
    AttributeEntry(std::string key, std::string value)
        : key_(std::move(key)), value_(std::move(value)) {}

    std::string key_;
    std::string value_;
};

/// Trim, lowercase and collapse whitespace. Throws EmptyField or ReservedCharacter.
AttributeEntry canonicalize(std::string_view raw_key, std::string_view raw_value);

/// Lowercase, trim and collapse internal whitespace runs to a single space.
std::string normalize_token_text(std::string_view raw);

/// Unsigned facts describing one image, kept sorted by (key, value) with no duplicates.
class VisualDictionary {
public:
    VisualDictionary() = default;
    explicit VisualDictionary(std::vector<AttributeEntry> entries);
    VisualDictionary(std::initializer_list<AttributeEntry> entries)
        : VisualDictionary(std::vector<AttributeEntry>(entries)) {}

    std::span<const AttributeEntry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    bool contains(const AttributeEntry& e) const;
    bool has_key(std::string_view key) const;

    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    friend bool operator==(const VisualDictionary&, const VisualDictionary&) = default;

private:
    std::vector<AttributeEntry> entries_;
};

enum class Polarity : std::int8_t { Positive = 1, Open = 0, Negative = -1 };

/// Rank of the polarity group in canonical order: Positive, Open, Negative.
constexpr int polarity_rank(Polarity p) noexcept {
    switch (p) {
        case Polarity::Positive: return 0;
        case Polarity::Open: return 1;
        case Polarity::Negative: return 2;
    }
    return 3;
}

std::string_view to_string(Polarity p) noexcept;

struct SignedEntry {
    AttributeEntry entry;
    Polarity polarity = Polarity::Open;

    friend bool operator==(const SignedEntry&, const SignedEntry&) = default;
};

/// Canonical order: polarity group, then key, then value.
bool canonical_less(const SignedEntry& a, const SignedEntry& b);

/// Signed query facts. The same (key, value) never carries both Positive and
/// Negative polarity; construction throws ContradictoryUpdates otherwise.
class QueryDictionary {
public:
    QueryDictionary() = default;
    explicit QueryDictionary(std::vector<SignedEntry> entries);

    std::span<const SignedEntry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    friend bool operator==(const QueryDictionary&, const QueryDictionary&) = default;

private:
    std::vector<SignedEntry> entries_;
};

struct PolaritySplit {
    std::vector<AttributeEntry> positive;
    std::vector<AttributeEntry> open;
    std::vector<AttributeEntry> negative;
};

/// Throws ContradictoryUpdates if any (key, value) is both Positive and Negative.
void check_no_contradiction(std::span<const SignedEntry> entries);

/// Combine a reference dictionary with signed edits. Every reference entry whose
/// key is touched by any update is dropped; the rest become Open anchors.
QueryDictionary merge(const VisualDictionary& reference, std::span<const SignedEntry> updates);

/// "key:value; key:value". Empty input yields "".
std::string serialize(std::span<const AttributeEntry> entries);
std::string serialize(const VisualDictionary& dict);

/// Inverse of serialize for canonical strings. Throws on malformed input.
VisualDictionary deserialize(std::string_view text);

PolaritySplit split_by_polarity(const QueryDictionary& q);

}  // namespace p2k
