#pragma once

#include <stdexcept>
#include <string>

namespace ddlocc {

/// Shape or dimension mismatch in the inputs.
class StructuralError : public std::invalid_argument {
 public:
  explicit StructuralError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input violates an operation's numerical precondition (unitarity, PSD, normalization...).
class PreconditionError : public std::domain_error {
 public:
  explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

/// Requested configuration that this library does not handle (e.g. a non-qutrit environment).
class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ddlocc
