#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boxseries {

/// Coarse classification used by the CLI to pick an exit code and by
/// callers that want to branch on failure type without string matching.
enum class ErrorKind {
    Validation,      // bad input: malformed literal, invalid config, precondition
    Parse,           // potential expression syntax error
    NonPolynomial,   // expression is well-formed but not a polynomial
    Bracket,         // no sign change where one was required
    NonConvergence,  // truncation/precision insufficient for the requested digits
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::NonPolynomial: return "non_polynomial";
    case ErrorKind::Bracket: return "bracket";
    case ErrorKind::NonConvergence: return "non_convergence";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

/// Syntax error in a potential expression; `position` is a 0-based offset
/// into the source text.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(ErrorKind::Parse, what + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class NonPolynomialError : public Error {
public:
    NonPolynomialError(const std::string& what, std::size_t position)
        : Error(ErrorKind::NonPolynomial, what + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class BracketError : public Error {
public:
    explicit BracketError(const std::string& what) : Error(ErrorKind::Bracket, what) {}
};

class NonConvergenceError : public Error {
public:
    explicit NonConvergenceError(const std::string& what)
        : Error(ErrorKind::NonConvergence, what) {}
};

}  // namespace boxseries
