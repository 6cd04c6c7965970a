#pragma once

#include <cstdint>
#include <vector>

#include "batchbald/rng.hpp"
#include "batchbald/tensor.hpp"
#include "batchbald/types.hpp"

namespace batchbald {

enum class Mode { Exact, Sampled };

inline const char* mode_name(Mode m) { return m == Mode::Exact ? "exact" : "sampled"; }

// Cached per-configuration, per-sample joint probabilities for the points
// folded in so far. Exact mode enumerates all c^n configurations (one row
// each); Sampled mode holds m configurations drawn from the label mixture.
struct JointState {
  Mode mode = Mode::Exact;
  Index n = 0;  // points folded in
  Index k = 0;
  Matrix P;          // R x k, P(r, j) = p(config_r | sample j)
  IntMatrix configs; // Sampled: m x n label assignments
  IntVector src;     // Sampled: the sample index each config was drawn from
  Vector self_prob;  // Sampled: row means of P, the sampling density of each config
};

// n = 0 state: one row of ones (empty product).
JointState make_empty_exact(Index k);

// True iff c^n <= limit, evaluated without overflow.
bool exact_fits(Index c, Index n, Index limit);

// Fold point i into an Exact state: R -> R*c rows, where the row for
// (config r, class y) sits at index r*c + y and holds P(r, j) * p(y | x_i, w_j).
// The _into form reuses dst's storage; src and dst must be distinct objects.
void extend_joint_exact_into(JointState& dst, const JointState& src,
                             const PosteriorTensor& t, Index i);
JointState extend_joint_exact(const JointState& state, const PosteriorTensor& t, Index i,
                              Index exact_limit = kDefaultExactLimit);

// -sum_r mean_j P(r, j) * ln(mean_j P(r, j)) over all enumerated configs.
Scalar joint_entropy_exact(const JointState& state);

// Joint entropy of (state + point i) computed from the matrix product
// P * p_i without materializing the extended state. Every per-candidate
// scorer funnels through this, so a single-point BALD score and a greedy
// first-step score are the same arithmetic, bit for bit.
Scalar joint_entropy_exact_extended(const JointState& state, const PosteriorTensor& t, Index i);

// Draw m label configurations over `subset` ancestrally from the sample
// mixture: pick j uniformly, then each label from point i's row j. P is
// populated against every sample column; deterministic given the seed.
JointState sample_configurations(const PosteriorTensor& t, const std::vector<Index>& subset,
                                 Index m, std::uint64_t seed);

// Fold a committed point into a Sampled state: each configuration r grows
// by one label drawn from point i's row at the configuration's source
// sample; P rows and self_prob are updated to match.
JointState extend_joint_sampled(const JointState& state, const PosteriorTensor& t, Index i,
                                std::uint64_t seed);

// Importance-sampled joint entropy of (context, candidate i):
//   -(1/m) sum_r sum_y [ (P p_i)_{r,y} / (P 1)_r ] * ln( (1/k) (P p_i)_{r,y} )
// with zero inner means contributing zero.
Scalar joint_entropy_sampled(const JointState& state, const PosteriorTensor& t, Index i);

}  // namespace batchbald
