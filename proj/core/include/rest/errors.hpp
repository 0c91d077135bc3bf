#pragma once

#include <stdexcept>
#include <string>

namespace rest {

// Error categories double as CLI exit codes.
enum class ErrorCategory : int {
    usage = 1,
    config = 2,
    data = 3,
    runtime = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& m) : Error(ErrorCategory::usage, m) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error(ErrorCategory::config, m) {}
};

struct DataError : Error {
    explicit DataError(const std::string& m) : Error(ErrorCategory::data, m) {}
};

struct RuntimeError : Error {
    explicit RuntimeError(const std::string& m) : Error(ErrorCategory::runtime, m) {}
};

}  // namespace rest
