#pragma once

#include <stdexcept>
#include <string>

namespace docsync {

// Base class for all docsync errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Bad command usage, bad configuration keys, invalid argument combinations.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& message) : Error(message) {}
};

// Malformed input data: corpus lines, trace files, stores, fixtures.
class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error(message) {}
};

// Model endpoint failures: transport errors, non-2xx after retries,
// exhausted mock scripts.
class BackendError : public Error {
public:
    explicit BackendError(const std::string& message, int status = 0)
        : Error(message), status_(status) {}

    int status() const { return status_; }

private:
    int status_;
};

} // namespace docsync
