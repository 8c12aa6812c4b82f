#pragma once

#include <stdexcept>
#include <string>

namespace waggle {

// Bad configuration: invalid scheme, malformed grid, too few anchors, ...
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input value outside the mathematical domain of an operation.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// File-level parse failure (missing mandatory column, unreadable header).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// A fit that cannot be performed (too few points in range).
class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace waggle
