#pragma once

#include <cmath>

#include "batchbald/types.hpp"

namespace batchbald {

// 0 ln 0 := 0 throughout.
inline Scalar xlnx(Scalar p) { return p > 0.0 ? p * std::log(p) : 0.0; }

// Entropy in nats of a probability vector given as any Eigen expression.
template <class Derived>
Scalar entropy_nats(const Eigen::DenseBase<Derived>& probs) {
  Scalar h = 0.0;
  for (Index idx = 0; idx < probs.size(); ++idx) h -= xlnx(probs.derived()(idx));
  return h;
}

}  // namespace batchbald
