#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "batchbald/rng.hpp"
#include "batchbald/tensor.hpp"
#include "batchbald/types.hpp"

namespace batchbald {

// Fault-injection hook for exercising the failure path: adds
// joint_bias * |subset|^2 to every joint entropy the suite computes.
// Nonzero bias breaks the upper-bound and submodularity properties.
struct VerifyHooks {
  Scalar joint_bias = 0.0;
};

struct PropertyResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  std::string counterexample;  // JSON, empty when the property held
};

struct VerifyReport {
  std::vector<PropertyResult> properties;
  bool ok() const {
    for (const auto& p : properties)
      if (p.failures > 0) return false;
    return true;
  }
  std::string to_json() const;
  // First counterexample across properties, empty if none.
  std::string first_counterexample() const;
};

// Valid random tensor: every row a Dirichlet(1) draw.
PosteriorTensor make_random_tensor(Rng& rng, Index n_pool, Index k, Index c);

// Property checks over freshly generated random instances:
// size-1 equivalence, the per-point upper bound, submodularity, monotone
// greedy gains, brute-force oracle equivalence, permutation invariance,
// score range, the 1 - 1/e greedy bound, and sampled-path determinism.
VerifyReport run_verify_suite(int trials, std::uint64_t seed, const VerifyHooks& hooks = {});

}  // namespace batchbald
