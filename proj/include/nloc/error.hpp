#pragma once

#include <stdexcept>
#include <string>

namespace nloc {

/// Violated precondition or malformed input.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical construction could not be completed.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace nloc
