#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hazsynth {

enum class ErrorCategory {
    Lexical,
    Syntax,
    Validation,
    Resource,
    Config,
    Io,
};

const char* to_string(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// Lexical or syntax error in a `.des` model file. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(ErrorCategory category, const std::string& message, int line, int column);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    int line_;
    int column_;
};

struct Diagnostic {
    std::string message;
    int line = 0;  // 0 when not tied to source text

    bool operator==(const Diagnostic&) const = default;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Diagnostic> diagnostics);

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& what) : Error(ErrorCategory::Resource, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

}  // namespace hazsynth
