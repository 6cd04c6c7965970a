#pragma once

#include <string>
#include <vector>

#include "batchbald/types.hpp"

namespace batchbald {

// p(y | x_i, parameter sample j) for every pool point, sample, class.
// Payload is row-major (point, sample, class); the same parameter samples
// are assumed shared across points (consistent-mask precondition of the
// format, not checkable from the data).
struct PosteriorTensor {
  Index n_pool = 0;
  Index k = 0;
  Index c = 0;
  std::vector<Scalar> probs;

  static PosteriorTensor zeros(Index n_pool, Index k, Index c) {
    PosteriorTensor t;
    t.n_pool = n_pool;
    t.k = k;
    t.c = c;
    t.probs.assign(static_cast<std::size_t>(n_pool * k * c), 0.0);
    return t;
  }

  Scalar& at(Index i, Index j, Index y) {
    return probs[static_cast<std::size_t>((i * k + j) * c + y)];
  }
  Scalar at(Index i, Index j, Index y) const {
    return probs[static_cast<std::size_t>((i * k + j) * c + y)];
  }

  // k x c view of one pool point's predictions.
  Eigen::Map<const RowMatrix> point(Index i) const {
    return {probs.data() + static_cast<std::size_t>(i * k * c), k, c};
  }
  Eigen::Map<RowMatrix> point(Index i) {
    return {probs.data() + static_cast<std::size_t>(i * k * c), k, c};
  }
};

struct InvariantCheck {
  std::string invariant;
  bool pass = true;
  Index i = -1;  // first offending point, -1 when not applicable
  Index j = -1;  // first offending sample
  std::string detail;
};

struct ValidationReport {
  std::vector<InvariantCheck> checks;
  bool ok() const {
    for (const auto& chk : checks)
      if (!chk.pass) return false;
    return true;
  }
  std::string first_failure() const {
    for (const auto& chk : checks)
      if (!chk.pass) return chk.invariant + ": " + chk.detail;
    return {};
  }
};

// Total: never throws, always reports every invariant with the first
// offending (i, j) where one exists.
ValidationReport validate_tensor(const PosteriorTensor& t);

// Throws ValidationFailure naming the first violated invariant.
void require_valid(const PosteriorTensor& t);

}  // namespace batchbald
