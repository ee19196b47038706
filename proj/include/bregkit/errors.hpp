#pragma once

#include <stdexcept>
#include <string>

namespace bregkit {

// Input lies outside the domain a function or solver can work on
// (e.g. a nonpositive coordinate handed to an entropy gradient).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally invalid argument: dimension mismatch, weights that do not
// sum to one, a point claimed to be fixed that is not, and the like.
struct ArgumentError : std::invalid_argument {
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// A constraint system with no usable point (empty intersection, or a set
// that never meets the domain of the chosen geometry).
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative routine ran out of its iteration budget before meeting
// its tolerance.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem trouble while reading specs or writing artifacts; the message
// carries the offending path.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bregkit
