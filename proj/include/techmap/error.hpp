#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace techmap {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. Carries the source name and the
/// 1-based line number when the problem can be located.
class DataError : public Error {
public:
    explicit DataError(const std::string& message, std::string source = {}, std::size_t line = 0);

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_ = 0;
};

/// Configuration problems, reported all at once.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems);

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// A required output of an earlier pipeline stage is absent or stale.
class StageError : public Error {
public:
    StageError(const std::string& message, std::string required_stage);

    const std::string& required_stage() const noexcept { return required_stage_; }

private:
    std::string required_stage_;
};

class NumericalError : public Error {
public:
    NumericalError(const std::string& message, double residual);

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Non-fatal findings collected by an operation.
struct Diagnostics {
    std::vector<std::string> warnings;

    void warn(std::string message) { warnings.push_back(std::move(message)); }
    bool empty() const noexcept { return warnings.empty(); }
};

} // namespace techmap
