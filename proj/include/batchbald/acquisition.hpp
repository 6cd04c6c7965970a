#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "batchbald/joint.hpp"
#include "batchbald/tensor.hpp"
#include "batchbald/types.hpp"

namespace batchbald {

enum class Strategy { BatchBald, Bald, Random, VarRatios, MeanStd, Exhaustive };

Strategy strategy_from_string(const std::string& name);
const char* strategy_name(Strategy s);

struct AcquisitionRequest {
  Strategy strategy = Strategy::BatchBald;
  Index b = 1;
  Index m = kDefaultConfigSamples;
  Index exact_limit = kDefaultExactLimit;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct AcquisitionResult {
  std::vector<Index> indices;    // acquisition order
  std::vector<Scalar> scores;    // per-step score (cumulative MI for batchbald)
  std::vector<Mode> modes;       // estimator mode used at each step
  std::vector<double> step_ms;
};

// Greedy maximization of the joint mutual information: each step scores
// every remaining point joined onto the committed prefix and takes the
// argmax (ties to the lowest index). Exact joint entropies while c^n fits
// the limit; shared per-step configuration samples beyond it.
AcquisitionResult acquire_batchbald(const PosteriorTensor& t, const AcquisitionRequest& req);

// Top-b per-point scores, descending, ties to the lowest index.
AcquisitionResult acquire_bald(const PosteriorTensor& t, const AcquisitionRequest& req);
AcquisitionResult acquire_varratios(const PosteriorTensor& t, const AcquisitionRequest& req);
AcquisitionResult acquire_meanstd(const PosteriorTensor& t, const AcquisitionRequest& req);

// Uniform sample of b distinct indices.
AcquisitionResult acquire_random(const PosteriorTensor& t, const AcquisitionRequest& req);

// Small-instance oracle: enumerate every size-b subset, maximize the exact
// joint MI, ties to the lexicographically smallest index tuple. Requires
// C(n_pool, b) <= 1e6 and c^b within the exact limit.
AcquisitionResult acquire_exhaustive(const PosteriorTensor& t, const AcquisitionRequest& req);

AcquisitionResult acquire(const PosteriorTensor& t, const AcquisitionRequest& req);

}  // namespace batchbald
