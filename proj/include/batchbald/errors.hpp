#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace batchbald {

// Malformed input file (bad magic, truncated payload, impossible dimensions).
// byte_offset points at the first byte that could not be interpreted.
struct FormatError : std::runtime_error {
  std::size_t byte_offset;
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
};

// A structurally well-formed value violating a documented invariant
// (row sums, probability range, weight normalization).
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Request outside the operation's domain (b > n_pool, budget over pool,
// exhaustive search too large, exact-limit overflow).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace batchbald
