#pragma once

#include <cstdint>
#include <vector>

#include "batchbald/joint.hpp"
#include "batchbald/tensor.hpp"
#include "batchbald/types.hpp"

namespace batchbald {

struct EntropyBreakdown {
  Scalar joint_entropy = 0.0;
  Scalar conditional_entropy = 0.0;
  Scalar score = 0.0;  // joint_entropy - conditional_entropy, stored exactly
  Mode mode = Mode::Exact;
};

// (1/k) sum_j H[y_i | w_j] for one point.
Scalar conditional_entropy_point(const PosteriorTensor& t, Index i);

// Sum of the above over the subset (the conditional joint entropy
// decomposes point-wise).
Scalar conditional_entropy(const PosteriorTensor& t, const std::vector<Index>& subset);

// Per-point mutual information between the prediction and the parameter
// samples: entropy of the sample-mean class distribution minus the mean
// per-sample entropy.
Vector bald_scores(const PosteriorTensor& t);

// Joint mutual information of the subset's labels with the parameter
// samples. Joint term enumerated exactly while c^|subset| fits the limit,
// Monte-Carlo estimated (m configurations, seeded) beyond it.
EntropyBreakdown batchbald_score(const PosteriorTensor& t, const std::vector<Index>& subset,
                                 Index exact_limit = kDefaultExactLimit,
                                 Index m = kDefaultConfigSamples, std::uint64_t seed = 0);

}  // namespace batchbald
