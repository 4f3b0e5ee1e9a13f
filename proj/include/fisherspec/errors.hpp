#pragma once

#include <stdexcept>
#include <string>

namespace fisherspec {

/// Raised when a computed quantity violates one of the library's numeric
/// invariants (normalization, oracle agreement, probability range).
class NumericInvariantError : public std::runtime_error {
 public:
  explicit NumericInvariantError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fisherspec
