#include "hazsynth/error.hpp"

namespace hazsynth {

const char* to_string(ErrorCategory c) noexcept {
    switch (c) {
        case ErrorCategory::Lexical: return "lexical error";
        case ErrorCategory::Syntax: return "syntax error";
        case ErrorCategory::Validation: return "validation error";
        case ErrorCategory::Resource: return "resource limit exceeded";
        case ErrorCategory::Config: return "configuration error";
        case ErrorCategory::Io: return "i/o error";
    }
    return "error";
}

namespace {

std::string format_location(ErrorCategory c, const std::string& msg, int line, int column) {
    return std::string(to_string(c)) + " at " + std::to_string(line) + ":" + std::to_string(column) +
           ": " + msg;
}

std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
    std::string out = "model validation failed";
    for (const auto& d : diags) {
        out += "\n  ";
        if (d.line > 0) out += "line " + std::to_string(d.line) + ": ";
        out += d.message;
    }
    return out;
}

}  // namespace

ParseError::ParseError(ErrorCategory category, const std::string& message, int line, int column)
    : Error(category, format_location(category, message, line, column)),
      message_(message),
      line_(line),
      column_(column) {}

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : Error(ErrorCategory::Validation, join_diagnostics(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

}  // namespace hazsynth
