#include "batchbald/joint.hpp"

#include <cmath>

#include "batchbald/entropy.hpp"
#include "batchbald/errors.hpp"

namespace batchbald {

JointState make_empty_exact(Index k) {
  JointState s;
  s.mode = Mode::Exact;
  s.n = 0;
  s.k = k;
  s.P = Matrix::Ones(1, k);
  return s;
}

bool exact_fits(Index c, Index n, Index limit) {
  Index v = 1;
  for (Index step = 0; step < n; ++step) {
    if (v > limit / c) return false;
    v *= c;
  }
  return v <= limit;
}

void extend_joint_exact_into(JointState& dst, const JointState& src,
                             const PosteriorTensor& t, Index i) {
  const Index R = src.P.rows();
  const Index c = t.c;
  const auto point = t.point(i);

  dst.mode = Mode::Exact;
  dst.n = src.n + 1;
  dst.k = src.k;
  dst.P.resize(R * c, src.k);
  for (Index y = 0; y < c; ++y) {
    // Rows r*c + y for all r at once: old rows scaled per-sample by p(y | x_i, w_j).
    dst.P(Eigen::seqN(y, R, c), Eigen::all) =
        (src.P.array().rowwise() * point.col(y).transpose().array()).matrix();
  }
}

JointState extend_joint_exact(const JointState& state, const PosteriorTensor& t, Index i,
                              Index exact_limit) {
  if (state.mode != Mode::Exact) throw DomainError("extend_joint_exact needs an Exact state");
  if (!exact_fits(t.c, state.n + 1, exact_limit))
    throw DomainError("exact limit overflow: c^" + std::to_string(state.n + 1) +
                      " exceeds " + std::to_string(exact_limit));
  JointState out;
  extend_joint_exact_into(out, state, t, i);
  return out;
}

Scalar joint_entropy_exact(const JointState& state) {
  const Scalar inv_k = 1.0 / static_cast<Scalar>(state.k);
  const Vector totals = state.P.rowwise().sum();
  Scalar h = 0.0;
  for (Index r = 0; r < totals.size(); ++r) h -= xlnx(totals[r] * inv_k);
  return h;
}

Scalar joint_entropy_exact_extended(const JointState& state, const PosteriorTensor& t,
                                    Index i) {
  const Scalar inv_k = 1.0 / static_cast<Scalar>(state.k);
  const Matrix M = state.P * t.point(i);  // (r, y) -> sum_j P(r, j) p(y | x_i, w_j)
  Scalar h = 0.0;
  for (Index y = 0; y < M.cols(); ++y)
    for (Index r = 0; r < M.rows(); ++r) h -= xlnx(M(r, y) * inv_k);
  return h;
}

JointState sample_configurations(const PosteriorTensor& t, const std::vector<Index>& subset,
                                 Index m, std::uint64_t seed) {
  if (m < 1) throw DomainError("sample_configurations needs m >= 1");
  if (subset.empty()) throw DomainError("sample_configurations needs a non-empty subset");

  Rng rng(seed);
  const Index n = static_cast<Index>(subset.size());

  JointState s;
  s.mode = Mode::Sampled;
  s.n = n;
  s.k = t.k;
  s.P = Matrix::Ones(m, t.k);
  s.configs.resize(m, n);
  s.src.resize(m);

  for (Index r = 0; r < m; ++r) {
    const Index j = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(t.k)));
    s.src[r] = j;
    for (Index pos = 0; pos < n; ++pos) {
      const auto point = t.point(subset[static_cast<std::size_t>(pos)]);
      const Index y = rng.categorical(point.data() + j * t.c, t.c);
      s.configs(r, pos) = y;
      s.P.row(r).array() *= point.col(y).transpose().array();
    }
  }
  s.self_prob = s.P.rowwise().mean();
  return s;
}

JointState extend_joint_sampled(const JointState& state, const PosteriorTensor& t, Index i,
                                std::uint64_t seed) {
  if (state.mode != Mode::Sampled) throw DomainError("extend_joint_sampled needs a Sampled state");

  Rng rng(seed);
  const Index m = state.P.rows();
  const auto point = t.point(i);

  JointState s;
  s.mode = Mode::Sampled;
  s.n = state.n + 1;
  s.k = state.k;
  s.P = state.P;
  s.src = state.src;
  s.configs.resize(m, s.n);
  if (state.n > 0) s.configs.leftCols(state.n) = state.configs;

  for (Index r = 0; r < m; ++r) {
    const Index j = s.src[r];
    const Index y = rng.categorical(point.data() + j * t.c, t.c);
    s.configs(r, state.n) = y;
    s.P.row(r).array() *= point.col(y).transpose().array();
  }
  s.self_prob = s.P.rowwise().mean();
  return s;
}

Scalar joint_entropy_sampled(const JointState& state, const PosteriorTensor& t, Index i) {
  if (state.mode != Mode::Sampled) throw DomainError("joint_entropy_sampled needs a Sampled state");

  const Index m = state.P.rows();
  const Scalar inv_k = 1.0 / static_cast<Scalar>(state.k);

  // M(r, y) = sum_j P(r, j) * p(y | x_i, w_j); row weights from the context alone.
  Matrix M = state.P * t.point(i);
  Vector row_total = state.P.rowwise().sum();

  Scalar acc = 0.0;
  for (Index r = 0; r < m; ++r) {
    const Scalar denom = std::max(row_total[r], kTinyProb);
    for (Index y = 0; y < t.c; ++y) {
      const Scalar num = M(r, y);
      if (num > 0.0) acc += num / denom * std::log(num * inv_k);
    }
  }
  return -acc / static_cast<Scalar>(m);
}

}  // namespace batchbald
