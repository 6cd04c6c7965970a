#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "batchbald/entropy.hpp"
#include "batchbald/estimators.hpp"
#include "batchbald/verify.hpp"

using namespace batchbald;

namespace {

// exact p(y_{1:n}) by direct enumeration, keyed by flattened config
std::vector<Scalar> exact_config_dist(const PosteriorTensor& t, const std::vector<Index>& subset) {
  const Index n = static_cast<Index>(subset.size());
  Index total = 1;
  for (Index a = 0; a < n; ++a) total *= t.c;
  std::vector<Scalar> dist(static_cast<std::size_t>(total), 0.0);
  for (Index r = 0; r < total; ++r) {
    // decode digits, most significant first
    Scalar p = 0.0;
    for (Index j = 0; j < t.k; ++j) {
      Scalar q = 1.0;
      Index rem = r;
      for (Index a = n - 1; a >= 0; --a) {
        q *= t.at(subset[static_cast<std::size_t>(a)], j, rem % t.c);
        rem /= t.c;
      }
      p += q;
    }
    dist[static_cast<std::size_t>(r)] = p / static_cast<Scalar>(t.k);
  }
  return dist;
}

Index flatten_config(const JointState& state, Index r) {
  Index key = 0;
  for (Index a = 0; a < state.configs.cols(); ++a) key = key * 100 + state.configs(r, a);
  return key;
}

}  // namespace

TEST_CASE("point-mass tensor forces every configuration") {
  // all rows one-hot on class 1, identical across samples
  PosteriorTensor t = PosteriorTensor::zeros(2, 3, 2);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j) t.at(i, j, 1) = 1.0;
  JointState state = sample_configurations(t, {0, 1}, 64, 9);
  REQUIRE(state.mode == Mode::Sampled);
  REQUIRE(state.P.rows() == 64);
  for (Index r = 0; r < 64; ++r) {
    CHECK(state.configs(r, 0) == 1);
    CHECK(state.configs(r, 1) == 1);
    CHECK(state.self_prob[r] == 1.0);
  }
}

TEST_CASE("m=1 shape contract") {
  Rng rng(3);
  PosteriorTensor t = make_random_tensor(rng, 3, 4, 3);
  JointState state = sample_configurations(t, {0, 2}, 1, 17);
  CHECK(state.P.rows() == 1);
  CHECK(state.P.cols() == 4);
  CHECK(state.configs.rows() == 1);
  CHECK(state.self_prob.size() == 1);
  CHECK(state.self_prob[0] > 0.0);
  CHECK(state.self_prob[0] <= 1.0);
}

TEST_CASE("sampled configurations are deterministic per seed") {
  Rng rng(4);
  PosteriorTensor t = make_random_tensor(rng, 4, 3, 3);
  JointState a = sample_configurations(t, {0, 1, 3}, 50, 1234);
  JointState b = sample_configurations(t, {0, 1, 3}, 50, 1234);
  CHECK(a.P == b.P);
  CHECK(a.configs == b.configs);
  JointState c = sample_configurations(t, {0, 1, 3}, 50, 1235);
  CHECK(a.configs != c.configs);
}

TEST_CASE("empirical configuration frequencies match the mixture") {
  Rng rng(6);
  PosteriorTensor t = make_random_tensor(rng, 2, 2, 2);
  const std::vector<Index> subset{0, 1};
  std::vector<Scalar> exact = exact_config_dist(t, subset);
  const Index m = 100000;
  JointState state = sample_configurations(t, subset, m, 777);
  std::vector<Scalar> freq(4, 0.0);
  for (Index r = 0; r < m; ++r) {
    Index key = state.configs(r, 0) * 2 + state.configs(r, 1);
    freq[static_cast<std::size_t>(key)] += 1.0 / static_cast<Scalar>(m);
  }
  Scalar tv = 0.0;
  for (int q = 0; q < 4; ++q) tv += std::abs(freq[q] - exact[q]);
  tv *= 0.5;
  CHECK(tv <= 0.01);
}

TEST_CASE("sampled self_prob equals the independent mixture density") {
  Rng rng(8);
  PosteriorTensor t = make_random_tensor(rng, 3, 3, 2);
  const std::vector<Index> subset{0, 1, 2};
  std::vector<Scalar> exact = exact_config_dist(t, subset);
  JointState state = sample_configurations(t, subset, 40, 55);
  for (Index r = 0; r < 40; ++r) {
    Index key = (state.configs(r, 0) * 2 + state.configs(r, 1)) * 2 + state.configs(r, 2);
    CHECK(state.self_prob[r] == doctest::Approx(exact[static_cast<std::size_t>(key)]).epsilon(1e-12));
  }
}

TEST_CASE("deterministic tensor gives exactly zero sampled entropy") {
  PosteriorTensor t = PosteriorTensor::zeros(3, 4, 2);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 4; ++j) t.at(i, j, 0) = 1.0;
  JointState state = sample_configurations(t, {0, 1}, 32, 2);
  CHECK(joint_entropy_sampled(state, t, 2) == 0.0);
}

TEST_CASE("omega-independent candidate adds its marginal entropy") {
  Rng rng(12);
  PosteriorTensor t = make_random_tensor(rng, 3, 5, 3);
  // overwrite point 2 with identical rows: prediction independent of the sample
  const Scalar fixed[3] = {0.2, 0.5, 0.3};
  for (Index j = 0; j < 5; ++j)
    for (Index y = 0; y < 3; ++y) t.at(2, j, y) = fixed[y];
  Scalar h_fixed = -(xlnx(0.2) + xlnx(0.5) + xlnx(0.3));

  // exact joint entropy of the context {0, 1}
  JointState ctx_exact = extend_joint_exact(make_empty_exact(t.k), t, 0);
  ctx_exact = extend_joint_exact(ctx_exact, t, 1);
  Scalar h_ctx = joint_entropy_exact(ctx_exact);

  JointState state = sample_configurations(t, {0, 1}, 20000, 31);
  Scalar est = joint_entropy_sampled(state, t, 2);
  CHECK(est == doctest::Approx(h_ctx + h_fixed).epsilon(0.03));
}

TEST_CASE("sampled matches exact within 2 percent on a fixed instance") {
  Rng rng(14);
  PosteriorTensor t = make_random_tensor(rng, 3, 4, 2);
  JointState ctx = extend_joint_exact(make_empty_exact(t.k), t, 0);
  ctx = extend_joint_exact(ctx, t, 1);
  Scalar exact = joint_entropy_exact_extended(ctx, t, 2);

  JointState state = sample_configurations(t, {0, 1}, 10000, 101);
  Scalar est = joint_entropy_sampled(state, t, 2);
  CHECK(std::abs(est - exact) / exact <= 0.02);
}

TEST_CASE("extension by a deterministic point keeps the density") {
  Rng rng(16);
  PosteriorTensor t = make_random_tensor(rng, 3, 4, 2);
  for (Index j = 0; j < 4; ++j) {
    t.at(2, j, 0) = 1.0;  // deterministic class 0
    t.at(2, j, 1) = 0.0;
  }
  JointState state = sample_configurations(t, {0, 1}, 25, 3);
  JointState ext = extend_joint_sampled(state, t, 2, 4);
  REQUIRE(ext.configs.cols() == 3);
  for (Index r = 0; r < 25; ++r) {
    CHECK(ext.configs(r, 2) == 0);
    CHECK(ext.self_prob[r] == doctest::Approx(state.self_prob[r]).epsilon(1e-12));
  }
}

TEST_CASE("committed extension scores like fresh sampling in distribution") {
  Rng rng(18);
  PosteriorTensor t = make_random_tensor(rng, 4, 4, 2);
  const Index m = 400;
  std::vector<Scalar> fresh, committed;
  for (int s = 0; s < 50; ++s) {
    std::uint64_t seed = derive_seed(900, {static_cast<std::uint64_t>(s)});
    JointState a = sample_configurations(t, {0, 1}, m, seed);
    fresh.push_back(joint_entropy_sampled(a, t, 2));
    JointState base = sample_configurations(t, {0}, m, seed);
    JointState b = extend_joint_sampled(base, t, 1, derive_seed(seed, {1}));
    committed.push_back(joint_entropy_sampled(b, t, 2));
  }
  std::sort(fresh.begin(), fresh.end());
  std::sort(committed.begin(), committed.end());
  // two-sample KS distance over the 50-seed score samples
  Scalar d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < fresh.size() && ib < committed.size()) {
    if (fresh[ia] <= committed[ib])
      ++ia;
    else
      ++ib;
    d = std::max(d, std::abs(static_cast<Scalar>(ia) / fresh.size() -
                             static_cast<Scalar>(ib) / committed.size()));
  }
  CHECK(d <= 0.4);  // two-sample critical value near alpha = 0.001 for n = 50
  Scalar mean_fresh = 0.0, mean_committed = 0.0;
  for (Scalar v : fresh) mean_fresh += v / fresh.size();
  for (Scalar v : committed) mean_committed += v / committed.size();
  CHECK(mean_fresh == doctest::Approx(mean_committed).epsilon(0.05));
}

TEST_CASE("error shrinks with m on a fixed instance") {
  Rng rng(20);
  PosteriorTensor t = make_random_tensor(rng, 3, 4, 2);
  JointState ctx = extend_joint_exact(make_empty_exact(t.k), t, 0);
  ctx = extend_joint_exact(ctx, t, 1);
  Scalar exact = joint_entropy_exact_extended(ctx, t, 2);
  std::vector<Scalar> med_err;
  for (Index m : {100, 1000, 10000}) {
    std::vector<Scalar> errs;
    for (int s = 0; s < 20; ++s) {
      JointState state = sample_configurations(t, {0, 1}, m,
                                               derive_seed(71, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s)}));
      errs.push_back(std::abs(joint_entropy_sampled(state, t, 2) - exact));
    }
    std::sort(errs.begin(), errs.end());
    med_err.push_back(0.5 * (errs[9] + errs[10]));
  }
  CHECK(med_err[0] > med_err[1]);
  CHECK(med_err[1] > med_err[2]);
}

TEST_CASE("flattened config keys are unique per draw") {
  Rng rng(22);
  PosteriorTensor t = make_random_tensor(rng, 2, 3, 4);
  JointState state = sample_configurations(t, {0, 1}, 30, 5);
  std::map<Index, int> seen;
  for (Index r = 0; r < 30; ++r) seen[flatten_config(state, r)]++;
  int total = 0;
  for (auto& [key, cnt] : seen) total += cnt;
  CHECK(total == 30);
}
