#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace docape {

enum class ErrorCode {
    InvalidArgument,
    EmptyField,
    LengthMismatch,
    MissingExemplars,
    InsufficientPool,
    MissingEmbedding,
    Timeout,
    ProtocolError,
    RemoteError,
    UnsupportedCapability,
    EmptyContinuation,
    ParseError,
    BackendUnavailable,
    IndexOutOfRange,
    TooSmall,
    EmptyCorpus,
    EmptyBenchmark,
    StorageError,
    NotFound,
    CorruptState,
    VersionMismatch,
    Cancelled,
    AlreadyExists,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library surfaces as an Error carrying a machine-readable code.
/// `detail` holds structured context (line number, byte offset, offending value) when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string detail = {})
        : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

/// True for failures worth retrying against a remote backend.
inline bool is_transient(ErrorCode code) {
    return code == ErrorCode::Timeout || code == ErrorCode::ProtocolError || code == ErrorCode::RemoteError;
}

}  // namespace docape
