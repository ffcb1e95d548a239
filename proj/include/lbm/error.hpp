#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lbm {

/// Malformed formula or file. Carries a 1-based source position when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Input is well formed but cannot be turned into a network
/// (empty clause, contradictory conjunct, eps out of range, ...).
class CompileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An exhaustive routine was asked to exceed its size guard.
class GuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lbm
