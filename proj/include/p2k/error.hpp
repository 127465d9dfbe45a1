#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace p2k {

enum class ErrorCode {
    EmptyField,
    ReservedCharacter,
    ContradictoryUpdates,
    InvalidArgument,
    UnparsableClause,
    RemoteUnavailable,
    MalformedRemoteResponse,
    DimensionMismatch,
    DuplicateId,
    CorruptIndex,
    FingerprintMismatch,
    EmptyPool,
    KTooLarge,
    MissingRanking,
    UnknownCandidateId,
    SchemaTooSmall,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Half-open character range [begin, end) into an input string.
struct TextSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const TextSpan&, const TextSpan&) = default;
};

/// Every failure raised by the library. The code is stable and machine-readable;
/// the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);
    Error(ErrorCode code, const std::string& message, TextSpan span);

    ErrorCode code() const noexcept { return code_; }
    const std::optional<TextSpan>& span() const noexcept { return span_; }

    /// Raw remote payload for MalformedRemoteResponse.
    const std::string& payload() const noexcept { return payload_; }
    Error& with_payload(std::string payload) {
        payload_ = std::move(payload);
        return *this;
    }

private:
    ErrorCode code_;
    std::optional<TextSpan> span_;
    std::string payload_;
};

}  // namespace p2k
