#include "p2k/edit_parser.hpp"

#include <algorithm>
#include <array>

#include "p2k/http_endpoint.hpp"

namespace p2k {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; };
               return lower(x) == lower(y);
           });
}

template <std::size_t N>
bool one_of(std::string_view word, const std::array<std::string_view, N>& set) {
    return std::any_of(set.begin(), set.end(), [&](std::string_view s) { return iequals(word, s); });
}

constexpr std::array<std::string_view, 4> kPositiveVerbs{"add", "set", "make", "with"};
constexpr std::array<std::string_view, 4> kNegativeVerbs{"remove", "drop", "no", "without"};

// Words that cannot name an attribute. Keeps "make it fabulous" from parsing as it:fabulous.
constexpr std::array<std::string_view, 16> kNotAKey{"it",   "this", "that", "these", "those", "them",
                                                      "they", "one",  "ones", "the",   "a",     "an",
                                                      "me",   "more", "less", "something"};

struct Clause {
    std::string_view text;
    TextSpan span;
};

// Split on ',', ';' and the whitespace-delimited word "and". Blank clauses are dropped.
std::vector<Clause> split_clauses(std::string_view text) {
    std::vector<Clause> clauses;
    auto emit = [&](std::size_t begin, std::size_t end) {
        while (begin < end && is_space(text[begin])) ++begin;
        while (end > begin && is_space(text[end - 1])) --end;
        if (begin < end) clauses.push_back({text.substr(begin, end - begin), {begin, end}});
    };

    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == ',' || c == ';') {
            emit(start, i);
            start = ++i;
            continue;
        }
        if (is_space(c) && i + 4 < text.size() && iequals(text.substr(i + 1, 3), "and") &&
            is_space(text[i + 4])) {
            emit(start, i);
            i += 4;
            start = i;
            continue;
        }
        ++i;
    }
    emit(start, text.size());
    return clauses;
}

std::vector<std::string_view> split_words(std::string_view s) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t b = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        if (b < i) words.push_back(s.substr(b, i - b));
    }
    return words;
}

std::string join_words(const std::vector<std::string_view>& words, std::size_t from) {
    std::string out;
    for (std::size_t i = from; i < words.size(); ++i) {
        if (!out.empty()) out.push_back(' ');
        out.append(words[i]);
    }
    return out;
}

[[noreturn]] void unparsable(const Clause& clause, const std::string& why) {
    throw Error(ErrorCode::UnparsableClause,
                "cannot parse clause '" + std::string(clause.text) + "' at " + std::to_string(clause.span.begin) +
                    ".." + std::to_string(clause.span.end) + ": " + why,
                clause.span);
}

SignedEntry make_update(const Clause& clause, std::string_view key, std::string_view value, Polarity polarity) {
    try {
        return {canonicalize(key, value), polarity};
    } catch (const Error& e) {
        unparsable(clause, e.what());
    }
}

bool try_structured(const Clause& clause, SignedEntry& out) {
    char sign = clause.text.front();
    if (sign != '+' && sign != '-') return false;
    std::string_view body = clause.text.substr(1);
    std::size_t colon = body.find(':');
    if (colon == std::string_view::npos) unparsable(clause, "structured clause needs key:value");
    out = make_update(clause, body.substr(0, colon), body.substr(colon + 1),
                      sign == '+' ? Polarity::Positive : Polarity::Negative);
    return true;
}

bool try_phrase(const Clause& clause, SignedEntry& out) {
    auto words = split_words(clause.text);
    if (words.size() < 3) return false;
    std::string_view verb = words[0];

    std::size_t key_at = 1;
    std::size_t value_at = 2;
    Polarity polarity;
    if (iequals(verb, "change")) {
        if (words.size() < 4 || !iequals(words[2], "to")) return false;
        value_at = 3;
        polarity = Polarity::Positive;
    } else if (one_of(verb, kPositiveVerbs)) {
        if (iequals(verb, "set") && words.size() >= 4 && iequals(words[2], "to")) value_at = 3;
        polarity = Polarity::Positive;
    } else if (one_of(verb, kNegativeVerbs)) {
        polarity = Polarity::Negative;
    } else {
        return false;
    }
    if (one_of(words[key_at], kNotAKey)) return false;
    out = make_update(clause, words[key_at], join_words(words, value_at), polarity);
    return true;
}

EditProgram parse_clauses(std::string_view text, bool allow_phrases) {
    EditProgram program;
    for (const auto& clause : split_clauses(text)) {
        SignedEntry update;
        bool ok = try_structured(clause, update) || (allow_phrases && try_phrase(clause, update));
        if (!ok) unparsable(clause, allow_phrases ? "no edit pattern matches" : "expected +key:value or -key:value");
        program.updates.push_back(std::move(update));
        program.source_spans.push_back(clause.span);
    }
    check_no_contradiction(program.updates);
    return program;
}

}  // namespace

EditProgram parse_edit(std::string_view text) { return parse_clauses(text, true); }

EditProgram parse_structured_edit(std::string_view text) { return parse_clauses(text, false); }

std::string render_structured(const EditProgram& program) {
    std::string out;
    for (const auto& u : program.updates) {
        if (!out.empty()) out += "; ";
        out += u.polarity == Polarity::Negative ? '-' : '+';
        out += u.entry.key();
        out += ':';
        out += u.entry.value();
    }
    return out;
}

EditProgram decompose_remote(std::string_view text, const std::string& endpoint) {
    auto res = post_with_retry(parse_endpoint(endpoint), std::string(text), "text/plain; charset=utf-8");
    if (res.status < 200 || res.status >= 300) {
        throw Error(ErrorCode::RemoteUnavailable, "decomposition service returned HTTP " + std::to_string(res.status))
            .with_payload(res.body);
    }
    try {
        return parse_structured_edit(res.body);
    } catch (const Error& e) {
        throw Error(ErrorCode::MalformedRemoteResponse, std::string("decomposition response rejected: ") + e.what())
            .with_payload(res.body);
    }
}

}  // namespace p2k
