#include "p2k/error.hpp"

namespace p2k {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyField: return "EmptyField";
        case ErrorCode::ReservedCharacter: return "ReservedCharacter";
        case ErrorCode::ContradictoryUpdates: return "ContradictoryUpdates";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::UnparsableClause: return "UnparsableClause";
        case ErrorCode::RemoteUnavailable: return "RemoteUnavailable";
        case ErrorCode::MalformedRemoteResponse: return "MalformedRemoteResponse";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::CorruptIndex: return "CorruptIndex";
        case ErrorCode::FingerprintMismatch: return "FingerprintMismatch";
        case ErrorCode::EmptyPool: return "EmptyPool";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::MissingRanking: return "MissingRanking";
        case ErrorCode::UnknownCandidateId: return "UnknownCandidateId";
        case ErrorCode::SchemaTooSmall: return "SchemaTooSmall";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, TextSpan span)
    : std::runtime_error(message), code_(code), span_(span) {}

}  // namespace p2k
