#pragma once

#include <stdexcept>
#include <string>

namespace graftkit {

enum class ErrorKind { config, backend, data };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

// A retryable backend error is a transport-level failure (network, 429, 5xx).
// Non-retryable ones are configuration problems such as a server that refuses
// to return logprobs; those abort the stage.
class BackendError : public Error {
public:
    BackendError(const std::string& what, bool retryable)
        : Error(ErrorKind::backend, what), retryable_(retryable) {}
    bool retryable() const noexcept { return retryable_; }

private:
    bool retryable_;
};

// Raised by a generation adapter when every attempt came back empty.
class EmptyCompletionError : public BackendError {
public:
    explicit EmptyCompletionError(const std::string& what) : BackendError(what, false) {}
};

/// Process exit code for an error kind: 2 config, 3 backend, 4 data.
constexpr int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::backend: return 3;
    case ErrorKind::data: return 4;
    }
    return 1;
}

}  // namespace graftkit
