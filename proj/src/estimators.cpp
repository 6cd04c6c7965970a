#include "batchbald/estimators.hpp"

#include "batchbald/entropy.hpp"
#include "batchbald/errors.hpp"

namespace batchbald {

Scalar conditional_entropy_point(const PosteriorTensor& t, Index i) {
  if (i < 0 || i >= t.n_pool) throw DomainError("point index " + std::to_string(i) + " out of range");
  const auto point = t.point(i);
  Scalar acc = 0.0;
  for (Index j = 0; j < t.k; ++j) acc += entropy_nats(point.row(j));
  return acc / static_cast<Scalar>(t.k);
}

Scalar conditional_entropy(const PosteriorTensor& t, const std::vector<Index>& subset) {
  Scalar acc = 0.0;
  for (Index i : subset) acc += conditional_entropy_point(t, i);
  return acc;
}

Vector bald_scores(const PosteriorTensor& t) {
  const JointState empty = make_empty_exact(t.k);
  Vector scores(t.n_pool);
  for (Index i = 0; i < t.n_pool; ++i)
    scores[i] = joint_entropy_exact_extended(empty, t, i) - conditional_entropy_point(t, i);
  return scores;
}

EntropyBreakdown batchbald_score(const PosteriorTensor& t, const std::vector<Index>& subset,
                                 Index exact_limit, Index m, std::uint64_t seed) {
  if (subset.empty()) throw DomainError("batchbald_score needs a non-empty subset");
  for (Index i : subset)
    if (i < 0 || i >= t.n_pool)
      throw DomainError("point index " + std::to_string(i) + " out of range");

  EntropyBreakdown out;
  const Index n = static_cast<Index>(subset.size());

  if (exact_fits(t.c, n, exact_limit)) {
    out.mode = Mode::Exact;
    JointState state = make_empty_exact(t.k);
    JointState scratch;
    for (Index pos = 0; pos + 1 < n; ++pos) {
      extend_joint_exact_into(scratch, state, t, subset[static_cast<std::size_t>(pos)]);
      std::swap(state, scratch);
    }
    out.joint_entropy = joint_entropy_exact_extended(state, t, subset.back());
  } else {
    out.mode = Mode::Sampled;
    if (n == 1) {
      // A single point is always exact: its configuration space is just c classes.
      out.mode = Mode::Exact;
      out.joint_entropy = joint_entropy_exact_extended(make_empty_exact(t.k), t, subset[0]);
    } else {
      std::vector<Index> context(subset.begin(), subset.end() - 1);
      JointState state = sample_configurations(t, context, m, seed);
      out.joint_entropy = joint_entropy_sampled(state, t, subset.back());
    }
  }
  out.conditional_entropy = conditional_entropy(t, subset);
  out.score = out.joint_entropy - out.conditional_entropy;
  return out;
}

}  // namespace batchbald
