#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "p2k/dictionary.hpp"
#include "p2k/error.hpp"

namespace p2k {

/// Signed updates decomposed from an edit instruction, in clause order.
/// Every update has Positive or Negative polarity and a span into the source text.
struct EditProgram {
    std::vector<SignedEntry> updates;
    std::vector<TextSpan> source_spans;

    bool empty() const noexcept { return updates.empty(); }
    friend bool operator==(const EditProgram&, const EditProgram&) = default;
};

/// Parses clauses separated by ',', ';' or " and ". Each clause is either
/// structured (`+key:value`, `-key:value`) or a phrase:
///   add|set|make|with <key> <value...>   -> Positive
///   change <key> to <value...>            -> Positive
///   remove|drop|no|without <key> <value...> -> Negative
/// Throws UnparsableClause with the clause span, or ContradictoryUpdates.
EditProgram parse_edit(std::string_view text);

/// Same as parse_edit but accepts only the structured form.
EditProgram parse_structured_edit(std::string_view text);

/// Render back to structured form ("+k:v; -k:v").
std::string render_structured(const EditProgram& program);

/// Ask an external decomposition service. The request body is the raw edit
/// text; the response body must be a structured-form edit string.
EditProgram decompose_remote(std::string_view text, const std::string& endpoint);

}  // namespace p2k
