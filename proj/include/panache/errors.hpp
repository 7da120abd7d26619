#pragma once

#include <stdexcept>
#include <string>

namespace panache {

/// Violation of an operation's preconditions or invariants (exit code 1 at the CLI).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input document (exit code 2 at the CLI).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace panache
