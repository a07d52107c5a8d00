#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace synergy {

enum class ErrorCode {
    AliasConflict,
    SelfLoop,
    UnknownNode,
    UnknownMolecule,
    DuplicateConflict,
    InvalidArgument,
    IoFailure,
    FormatVersionMismatch,
    ChecksumMismatch,
    ParseError,
    HttpError,
    RateLimited,
    NetworkTimeout,
    ZeroTotal,
    InvalidParams,
    EmptyNetwork,
    DegenerateInput,
    InvalidTable,
    InsufficientData,
};

std::string_view to_string(ErrorCode code);

/// Exception type for every recoverable failure raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Parse failure that remembers its 1-based source line (0 when unknown).
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line = 0)
        : Error(ErrorCode::ParseError,
                line ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Non-2xx response from a remote endpoint after retries were exhausted.
class HttpError : public Error {
public:
    explicit HttpError(int status, const std::string& message = {})
        : Error(ErrorCode::HttpError, "status " + std::to_string(status) +
                                          (message.empty() ? "" : " " + message)),
          status_(status) {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

}  // namespace synergy
