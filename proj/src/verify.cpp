#include "batchbald/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "batchbald/acquisition.hpp"
#include "batchbald/entropy.hpp"
#include "batchbald/estimators.hpp"

namespace batchbald {

namespace {

constexpr Scalar kTol = 1e-9;

// Scored through the suite's biased lens: the injected fault adds
// joint_bias * |S|^2 on top of the joint entropy, so a nonzero bias
// inflates large subsets faster than their per-point bound grows.
Scalar biased_score(const PosteriorTensor& t, const std::vector<Index>& subset,
                    const VerifyHooks& hooks) {
  Scalar raw = batchbald_score(t, subset).score;
  Scalar n = static_cast<Scalar>(subset.size());
  return raw + hooks.joint_bias * n * n;
}

// Independent recomputation of the exact score. Walks every label
// configuration with a digit odometer and accumulates the configuration
// probability directly from the tensor; shares no code with the
// cache-based estimator it checks.
Scalar oracle_score(const PosteriorTensor& t, const std::vector<Index>& subset) {
  const Index n = static_cast<Index>(subset.size());
  const Index c = t.c;
  const Index k = t.k;
  std::vector<Index> cfg(static_cast<std::size_t>(n), 0);
  Scalar joint = 0.0;
  while (true) {
    Scalar p = 0.0;
    for (Index j = 0; j < k; ++j) {
      Scalar q = 1.0;
      for (Index a = 0; a < n; ++a) q *= t.at(subset[static_cast<std::size_t>(a)], j, cfg[static_cast<std::size_t>(a)]);
      p += q;
    }
    joint -= xlnx(p / static_cast<Scalar>(k));
    Index pos = n - 1;
    while (pos >= 0) {
      if (++cfg[static_cast<std::size_t>(pos)] < c) break;
      cfg[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  Scalar cond = 0.0;
  for (Index a = 0; a < n; ++a) {
    Scalar point_sum = 0.0;
    for (Index j = 0; j < k; ++j)
      for (Index y = 0; y < c; ++y) point_sum -= xlnx(t.at(subset[static_cast<std::size_t>(a)], j, y));
    cond += point_sum / static_cast<Scalar>(k);
  }
  return joint - cond;
}

std::vector<Index> random_subset(Rng& rng, Index n_pool, Index size) {
  std::vector<Index> perm(static_cast<std::size_t>(n_pool));
  std::iota(perm.begin(), perm.end(), Index(0));
  for (Index s = 0; s < size; ++s) {
    Index j = s + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n_pool - s)));
    std::swap(perm[static_cast<std::size_t>(s)], perm[static_cast<std::size_t>(j)]);
  }
  perm.resize(static_cast<std::size_t>(size));
  return perm;
}

struct Instance {
  PosteriorTensor t;
  std::uint64_t seed;
};

Instance make_instance(std::uint64_t suite_seed, std::uint64_t property_tag, int trial) {
  std::uint64_t s = derive_seed(suite_seed, {property_tag, static_cast<std::uint64_t>(trial)});
  Rng rng(s);
  Index n_pool = 4 + static_cast<Index>(rng.uniform_index(5));
  Index k = 2 + static_cast<Index>(rng.uniform_index(5));
  Index c = 2 + static_cast<Index>(rng.uniform_index(3));
  return {make_random_tensor(rng, n_pool, k, c), s};
}

nlohmann::ordered_json subset_json(const std::vector<Index>& subset) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (Index i : subset) arr.push_back(i);
  return arr;
}

std::string counterexample_json(const char* property, int trial, const Instance& inst,
                                const std::vector<Index>& subset, Scalar lhs, Scalar rhs,
                                const char* relation) {
  nlohmann::ordered_json doc;
  doc["property"] = property;
  doc["trial"] = trial;
  doc["instance_seed"] = inst.seed;
  doc["n_pool"] = inst.t.n_pool;
  doc["k"] = inst.t.k;
  doc["c"] = inst.t.c;
  doc["subset"] = subset_json(subset);
  doc["lhs"] = lhs;
  doc["rhs"] = rhs;
  doc["violated"] = relation;
  return doc.dump();
}

using PropertyFn = bool (*)(int trial, std::uint64_t suite_seed, const VerifyHooks& hooks,
                            std::string* counterexample);

// Singleton scores from the batch estimator and the per-point scorer must
// agree bit for bit; both sides carry the same injected bias at |S| = 1.
bool prop_size1(int trial, std::uint64_t seed, const VerifyHooks& hooks, std::string* ce) {
  Instance inst = make_instance(seed, 0x731u, trial);
  Vector bald = bald_scores(inst.t);
  for (Index i = 0; i < inst.t.n_pool; ++i) {
    Scalar lhs = biased_score(inst.t, {i}, hooks);
    Scalar rhs = bald[i] + hooks.joint_bias;
    if (lhs != rhs) {
      *ce = counterexample_json("size1_matches_bald", trial, inst, {i}, lhs, rhs, "lhs == rhs");
      return false;
    }
  }
  return true;
}

bool prop_upper_bound(int trial, std::uint64_t seed, const VerifyHooks& hooks, std::string* ce) {
  Instance inst = make_instance(seed, 0x752u, trial);
  Rng rng(derive_seed(inst.seed, {1}));
  Index b = 2 + static_cast<Index>(rng.uniform_index(3));
  b = std::min(b, inst.t.n_pool);
  std::vector<Index> subset = random_subset(rng, inst.t.n_pool, b);
  Vector bald = bald_scores(inst.t);
  Scalar lhs = biased_score(inst.t, subset, hooks);
  Scalar rhs = 0.0;
  for (Index i : subset) rhs += bald[i] + hooks.joint_bias;
  if (lhs > rhs + kTol) {
    *ce = counterexample_json("upper_bound", trial, inst, subset, lhs, rhs, "lhs <= rhs");
    return false;
  }
  return true;
}

bool prop_submodular(int trial, std::uint64_t seed, const VerifyHooks& hooks, std::string* ce) {
  Instance inst = make_instance(seed, 0x753u, trial);
  if (inst.t.n_pool < 4) return true;
  Rng rng(derive_seed(inst.seed, {1}));
  std::vector<Index> pts = random_subset(rng, inst.t.n_pool, 4);
  std::vector<Index> small{pts[0]};
  std::vector<Index> large{pts[0], pts[1], pts[2]};
  Index x = pts[3];
  std::vector<Index> small_x = small;
  small_x.push_back(x);
  std::vector<Index> large_x = large;
  large_x.push_back(x);
  Scalar gain_small = biased_score(inst.t, small_x, hooks) - biased_score(inst.t, small, hooks);
  Scalar gain_large = biased_score(inst.t, large_x, hooks) - biased_score(inst.t, large, hooks);
  if (gain_small < gain_large - kTol) {
    *ce = counterexample_json("submodularity", trial, inst, large_x, gain_small, gain_large,
                              "gain(small) >= gain(large)");
    return false;
  }
  return true;
}

bool prop_monotone(int trial, std::uint64_t seed, const VerifyHooks& hooks, std::string* ce) {
  Instance inst = make_instance(seed, 0x754u, trial);
  Rng rng(derive_seed(inst.seed, {1}));
  Index b = std::min<Index>(4, inst.t.n_pool);
  std::vector<Index> chain = random_subset(rng, inst.t.n_pool, b);
  Scalar prev = 0.0;
  for (Index s = 1; s <= b; ++s) {
    std::vector<Index> prefix(chain.begin(), chain.begin() + s);
    Scalar cur = biased_score(inst.t, prefix, hooks);
    if (cur < prev - kTol) {
      *ce = counterexample_json("monotone_gains", trial, inst, prefix, cur, prev, "lhs >= rhs");
      return false;
    }
    prev = cur;
  }
  return true;
}

// Checked on the raw estimator (no bias): the oracle recomputes the same
// quantity from first principles.
bool prop_oracle(int trial, std::uint64_t seed, const VerifyHooks&, std::string* ce) {
  Instance inst = make_instance(seed, 0x755u, trial);
  Rng rng(derive_seed(inst.seed, {1}));
  Index b = 2 + static_cast<Index>(rng.uniform_index(2));
  b = std::min(b, inst.t.n_pool);
  std::vector<Index> subset = random_subset(rng, inst.t.n_pool, b);
  Scalar lhs = batchbald_score(inst.t, subset).score;
  Scalar rhs = oracle_score(inst.t, subset);
  if (std::abs(lhs - rhs) > kTol) {
    *ce = counterexample_json("oracle_equivalence", trial, inst, subset, lhs, rhs,
                              "|lhs - rhs| <= 1e-9");
    return false;
  }
  return true;
}

bool prop_permutation(int trial, std::uint64_t seed, const VerifyHooks& hooks, std::string* ce) {
  Instance inst = make_instance(seed, 0x756u, trial);
  Rng rng(derive_seed(inst.seed, {1}));
  Index b = std::min<Index>(3, inst.t.n_pool);
  std::vector<Index> subset = random_subset(rng, inst.t.n_pool, b);
  std::vector<Index> shuffled = subset;
  std::reverse(shuffled.begin(), shuffled.end());
  Scalar lhs = biased_score(inst.t, subset, hooks);
  Scalar rhs = biased_score(inst.t, shuffled, hooks);
  if (std::abs(lhs - rhs) > kTol) {
    *ce = counterexample_json("permutation_invariance", trial, inst, subset, lhs, rhs,
                              "|lhs - rhs| <= 1e-9");
    return false;
  }
  return true;
}

bool prop_range(int trial, std::uint64_t seed, const VerifyHooks& hooks, std::string* ce) {
  Instance inst = make_instance(seed, 0x757u, trial);
  Rng rng(derive_seed(inst.seed, {1}));
  Index b = 1 + static_cast<Index>(rng.uniform_index(3));
  b = std::min(b, inst.t.n_pool);
  std::vector<Index> subset = random_subset(rng, inst.t.n_pool, b);
  Scalar score = biased_score(inst.t, subset, hooks);
  Scalar hi = static_cast<Scalar>(b) * std::log(static_cast<Scalar>(inst.t.c));
  if (score < -kTol || score > hi + kTol) {
    *ce = counterexample_json("score_range", trial, inst, subset, score, hi,
                              "0 <= score <= |S| ln c");
    return false;
  }
  return true;
}

// Greedy against the exhaustive oracle on instances small enough to
// enumerate: the greedy batch must capture at least 1 - 1/e of the
// optimum (monotone submodular objective).
bool prop_greedy_bound(int trial, std::uint64_t seed, const VerifyHooks& hooks, std::string* ce) {
  std::uint64_t s = derive_seed(seed, {0x758u, static_cast<std::uint64_t>(trial)});
  Rng rng(s);
  Index n_pool = 5 + static_cast<Index>(rng.uniform_index(3));
  Index k = 2 + static_cast<Index>(rng.uniform_index(4));
  Index c = 2 + static_cast<Index>(rng.uniform_index(2));
  Instance inst{make_random_tensor(rng, n_pool, k, c), s};
  AcquisitionRequest req;
  req.b = 3;
  req.seed = derive_seed(s, {2});
  req.strategy = Strategy::BatchBald;
  AcquisitionResult greedy = acquire_batchbald(inst.t, req);
  req.strategy = Strategy::Exhaustive;
  AcquisitionResult best = acquire_exhaustive(inst.t, req);
  Scalar lhs = biased_score(inst.t, greedy.indices, hooks);
  Scalar rhs = (1.0 - std::exp(-1.0)) * biased_score(inst.t, best.indices, hooks);
  if (lhs < rhs - kTol) {
    *ce = counterexample_json("greedy_bound", trial, inst, greedy.indices, lhs, rhs,
                              "greedy >= (1 - 1/e) optimum");
    return false;
  }
  return true;
}

// The Monte-Carlo path must be a pure function of (tensor, subset, m, seed).
bool prop_sampled_determinism(int trial, std::uint64_t seed, const VerifyHooks&, std::string* ce) {
  Instance inst = make_instance(seed, 0x759u, trial);
  Rng rng(derive_seed(inst.seed, {1}));
  Index b = std::min<Index>(3, inst.t.n_pool);
  std::vector<Index> subset = random_subset(rng, inst.t.n_pool, b);
  std::uint64_t score_seed = derive_seed(inst.seed, {2});
  // exact_limit below c^2 forces the sampled path for any multi-point subset
  EntropyBreakdown a = batchbald_score(inst.t, subset, inst.t.c, 256, score_seed);
  EntropyBreakdown d = batchbald_score(inst.t, subset, inst.t.c, 256, score_seed);
  if (a.score != d.score || (b > 1 && a.mode != Mode::Sampled)) {
    *ce = counterexample_json("sampled_determinism", trial, inst, subset, a.score, d.score,
                              "same seed, same value");
    return false;
  }
  return true;
}

}  // namespace

PosteriorTensor make_random_tensor(Rng& rng, Index n_pool, Index k, Index c) {
  PosteriorTensor t = PosteriorTensor::zeros(n_pool, k, c);
  for (Index i = 0; i < n_pool; ++i) {
    auto pt = t.point(i);
    for (Index j = 0; j < k; ++j) pt.row(j) = rng.dirichlet(c, 1.0).transpose();
  }
  return t;
}

std::string VerifyReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["ok"] = ok();
  nlohmann::ordered_json props = nlohmann::ordered_json::array();
  for (const auto& p : properties) {
    nlohmann::ordered_json row;
    row["name"] = p.name;
    row["trials"] = p.trials;
    row["failures"] = p.failures;
    if (p.counterexample.empty())
      row["counterexample"] = nullptr;
    else
      row["counterexample"] = nlohmann::ordered_json::parse(p.counterexample);
    props.push_back(row);
  }
  doc["properties"] = props;
  return doc.dump(2) + "\n";
}

std::string VerifyReport::first_counterexample() const {
  for (const auto& p : properties)
    if (!p.counterexample.empty()) return p.counterexample;
  return {};
}

VerifyReport run_verify_suite(int trials, std::uint64_t seed, const VerifyHooks& hooks) {
  struct Entry {
    const char* name;
    PropertyFn fn;
  };
  const Entry entries[] = {
      {"size1_matches_bald", prop_size1},
      {"upper_bound", prop_upper_bound},
      {"submodularity", prop_submodular},
      {"monotone_gains", prop_monotone},
      {"oracle_equivalence", prop_oracle},
      {"permutation_invariance", prop_permutation},
      {"score_range", prop_range},
      {"greedy_bound", prop_greedy_bound},
      {"sampled_determinism", prop_sampled_determinism},
  };
  VerifyReport report;
  for (const Entry& e : entries) {
    PropertyResult pr;
    pr.name = e.name;
    pr.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
      std::string ce;
      if (!e.fn(trial, seed, hooks, &ce)) {
        ++pr.failures;
        if (pr.counterexample.empty()) pr.counterexample = ce;
      }
    }
    report.properties.push_back(std::move(pr));
  }
  return report;
}

}  // namespace batchbald
