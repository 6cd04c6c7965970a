#include "batchbald/bayes_sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "batchbald/entropy.hpp"
#include "batchbald/errors.hpp"
#include "batchbald/rng.hpp"

namespace batchbald {

namespace {

// Seed-derivation tags (arbitrary distinct constants).
constexpr std::uint64_t kTagEnsemble = 1;
constexpr std::uint64_t kTagPool = 2;
constexpr std::uint64_t kTagTest = 3;
constexpr std::uint64_t kTagLoop = 4;
constexpr std::uint64_t kTagTensor = 1;
constexpr std::uint64_t kTagAcquire = 2;

void normalize_log_weights(Vector& lw) {
  const Scalar mx = lw.maxCoeff();
  Scalar total = 0.0;
  for (Index h = 0; h < lw.size(); ++h) total += std::exp(lw[h] - mx);
  const Scalar log_norm = mx + std::log(total);
  for (Index h = 0; h < lw.size(); ++h) lw[h] -= log_norm;
}

Vector weights_of(const HypothesisEnsemble& e) {
  Vector w(e.H);
  for (Index h = 0; h < e.H; ++h) w[h] = std::exp(e.log_weights[h]);
  return w;
}

// Exact BALD of one feature bucket under the weighted ensemble.
Scalar weighted_bucket_mi(const HypothesisEnsemble& e, const Vector& w, Index f) {
  Vector marginal = Vector::Zero(e.c);
  Scalar cond = 0.0;
  for (Index h = 0; h < e.H; ++h) {
    marginal += w[h] * e.tables[static_cast<std::size_t>(h)].row(f).transpose();
    cond += w[h] * entropy_nats(e.tables[static_cast<std::size_t>(h)].row(f));
  }
  return entropy_nats(marginal) - cond;
}

}  // namespace

std::pair<HypothesisEnsemble, Index> make_ensemble(Index H, Index F, Index c,
                                                   Scalar concentration, std::uint64_t seed) {
  if (H < 2) throw DomainError("need at least two hypotheses");
  if (F < 1) throw DomainError("need at least one feature bucket");
  if (c < 2) throw DomainError("need at least two classes");
  if (!(concentration > 0.0)) throw DomainError("concentration must be positive");

  Rng rng(derive_seed(seed, {kTagEnsemble}));
  HypothesisEnsemble e;
  e.H = H;
  e.F = F;
  e.c = c;
  e.tables.reserve(static_cast<std::size_t>(H));
  for (Index h = 0; h < H; ++h) {
    RowMatrix table(F, c);
    for (Index f = 0; f < F; ++f) table.row(f) = rng.dirichlet(c, concentration).transpose();
    e.tables.push_back(std::move(table));
  }
  e.log_weights = Vector::Constant(H, -std::log(static_cast<Scalar>(H)));
  const Index truth = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(H)));
  return {std::move(e), truth};
}

HypothesisEnsemble posterior_update(const HypothesisEnsemble& e, Index feature, Index label) {
  if (feature < 0 || feature >= e.F) throw DomainError("feature id out of range");
  if (label < 0 || label >= e.c) throw DomainError("label out of range");
  HypothesisEnsemble out = e;
  for (Index h = 0; h < e.H; ++h) {
    const Scalar lik = e.tables[static_cast<std::size_t>(h)](feature, label);
    out.log_weights[h] += std::log(std::max(lik, kTinyProb));
  }
  normalize_log_weights(out.log_weights);
  return out;
}

HypothesisEnsemble posterior_from_observations(const HypothesisEnsemble& prior,
                                               const std::vector<Observation>& obs) {
  HypothesisEnsemble out = prior;
  std::set<Index> seen;
  for (const Observation& o : obs) {
    if (!seen.insert(o.prototype).second) continue;
    for (Index h = 0; h < out.H; ++h) {
      const Scalar lik = out.tables[static_cast<std::size_t>(h)](o.feature, o.label);
      out.log_weights[h] += std::log(std::max(lik, kTinyProb));
    }
  }
  normalize_log_weights(out.log_weights);
  return out;
}

PosteriorTensor sample_posterior_tensor(const HypothesisEnsemble& e, const IntVector& features,
                                        Index k, std::uint64_t seed) {
  if (k < 1) throw DomainError("need k >= 1 hypothesis draws");
  Rng rng(seed);
  const Vector w = weights_of(e);

  // The same k draws serve every pool point.
  IntVector draws(k);
  for (Index j = 0; j < k; ++j) draws[j] = rng.categorical(w.data(), e.H);

  PosteriorTensor t = PosteriorTensor::zeros(features.size(), k, e.c);
  for (Index i = 0; i < features.size(); ++i) {
    auto point = t.point(i);
    for (Index j = 0; j < k; ++j)
      point.row(j) = e.tables[static_cast<std::size_t>(draws[j])].row(features[i]);
  }
  return t;
}

PosteriorTensor sample_posterior_tensor(const HypothesisEnsemble& e, const SyntheticPool& pool,
                                        Index k, std::uint64_t seed) {
  return sample_posterior_tensor(e, pool.features, k, seed);
}

Scalar exact_conditional_mi(const HypothesisEnsemble& e, const SyntheticPool& pool, Index i,
                            const std::vector<Observation>& conditioning) {
  if (i < 0 || i >= pool.features.size()) throw DomainError("pool index out of range");
  HypothesisEnsemble cur = e;
  for (const Observation& o : conditioning) cur = posterior_update(cur, o.feature, o.label);
  const Vector w = weights_of(cur);
  return weighted_bucket_mi(cur, w, pool.features[i]);
}

SyntheticPool make_pool(const HypothesisEnsemble& e, Index truth, Index prototypes_per_feature,
                        int repetitions, std::uint64_t seed) {
  if (truth < 0 || truth >= e.H) throw DomainError("truth index out of range");
  if (prototypes_per_feature < 1) throw DomainError("need at least one prototype per feature");
  if (repetitions < 0) throw DomainError("repetitions must be >= 0");

  Rng rng(seed);
  const RowMatrix& truth_table = e.tables[static_cast<std::size_t>(truth)];
  const Index protos = e.F * prototypes_per_feature;

  // One realized label per prototype; copies share it.
  IntVector proto_feature(protos), proto_label(protos);
  for (Index p = 0; p < protos; ++p) {
    const Index f = p / prototypes_per_feature;
    proto_feature[p] = f;
    proto_label[p] = rng.categorical(truth_table.data() + f * e.c, e.c);
  }

  const Index copies = static_cast<Index>(repetitions) + 1;
  SyntheticPool pool;
  pool.repetitions = repetitions;
  pool.features.resize(protos * copies);
  pool.true_labels.resize(protos * copies);
  pool.prototype.resize(protos * copies);
  Index at = 0;
  for (Index copy = 0; copy < copies; ++copy) {
    for (Index rank = 0; rank < prototypes_per_feature; ++rank) {
      for (Index f = 0; f < e.F; ++f) {
        const Index p = f * prototypes_per_feature + rank;
        pool.features[at] = f;
        pool.true_labels[at] = proto_label[p];
        pool.prototype[at] = p;
        ++at;
      }
    }
  }
  return pool;
}

TestSet make_test_set(const HypothesisEnsemble& e, Index truth, Index size, std::uint64_t seed) {
  if (size < 1) throw DomainError("test set must be non-empty");
  Rng rng(seed);
  const RowMatrix& truth_table = e.tables[static_cast<std::size_t>(truth)];
  TestSet test;
  test.features.resize(size);
  test.labels.resize(size);
  for (Index i = 0; i < size; ++i) {
    const Index f = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(e.F)));
    test.features[i] = f;
    test.labels[i] = rng.categorical(truth_table.data() + f * e.c, e.c);
  }
  return test;
}

Scalar predictive_accuracy(const HypothesisEnsemble& e, const TestSet& test) {
  const Vector w = weights_of(e);
  // Posterior-predictive argmax per bucket (ties to the lowest class).
  IntVector pred(e.F);
  for (Index f = 0; f < e.F; ++f) {
    Vector marginal = Vector::Zero(e.c);
    for (Index h = 0; h < e.H; ++h)
      marginal += w[h] * e.tables[static_cast<std::size_t>(h)].row(f).transpose();
    Index best = 0;
    for (Index y = 1; y < e.c; ++y)
      if (marginal[y] > marginal[best]) best = y;
    pred[f] = best;
  }
  Index hits = 0;
  for (Index i = 0; i < test.features.size(); ++i)
    if (pred[test.features[i]] == test.labels[i]) ++hits;
  return static_cast<Scalar>(hits) / static_cast<Scalar>(test.features.size());
}

ALTrace run_al_loop(const HypothesisEnsemble& prior, const SyntheticPool& pool,
                    const TestSet& test, Strategy strategy, Index rounds, Index b, Index k,
                    Index m, std::uint64_t seed, Index exact_limit) {
  const Index pool_size = pool.features.size();
  if (rounds * b > pool_size)
    throw DomainError("budget " + std::to_string(rounds * b) + " exceeds pool of " +
                      std::to_string(pool_size));

  ALTrace trace;
  trace.strategy = strategy_name(strategy);
  trace.seed = seed;
  trace.classes = prior.c;

  std::vector<Observation> observations;
  std::vector<char> taken(static_cast<std::size_t>(pool_size), 0);
  IntVector class_counts = IntVector::Zero(prior.c);

  auto log_row = [&](Index round, const std::vector<Index>& acquired,
                     const HypothesisEnsemble& posterior) {
    TraceRow row;
    row.round = round;
    row.train_size = static_cast<Index>(observations.size());
    row.test_accuracy = predictive_accuracy(posterior, test);
    row.acquired = acquired;
    Vector freq = Vector::Zero(prior.c);
    const Scalar total = static_cast<Scalar>(std::max<Index>(class_counts.sum(), 1));
    for (Index y = 0; y < prior.c; ++y) freq[y] = static_cast<Scalar>(class_counts[y]) / total;
    row.label_entropy_nats = class_counts.sum() > 0 ? entropy_nats(freq) : 0.0;
    row.class_counts.assign(class_counts.data(), class_counts.data() + prior.c);
    trace.rows.push_back(std::move(row));
  };

  log_row(0, {}, prior);

  for (Index round = 1; round <= rounds; ++round) {
    const HypothesisEnsemble posterior = posterior_from_observations(prior, observations);

    std::vector<Index> remaining;
    remaining.reserve(static_cast<std::size_t>(pool_size));
    for (Index i = 0; i < pool_size; ++i)
      if (!taken[static_cast<std::size_t>(i)]) remaining.push_back(i);

    IntVector remaining_features(static_cast<Index>(remaining.size()));
    for (Index r = 0; r < remaining_features.size(); ++r)
      remaining_features[r] = pool.features[remaining[static_cast<std::size_t>(r)]];

    const PosteriorTensor tensor = sample_posterior_tensor(
        posterior, remaining_features, k,
        derive_seed(seed, {kTagLoop, static_cast<std::uint64_t>(round), kTagTensor}));

    AcquisitionRequest req;
    req.strategy = strategy;
    req.b = b;
    req.m = m;
    req.exact_limit = exact_limit;
    req.seed = derive_seed(seed, {kTagLoop, static_cast<std::uint64_t>(round), kTagAcquire});
    const AcquisitionResult got = acquire(tensor, req);

    std::vector<Index> acquired;
    for (Index local : got.indices) {
      const Index g = remaining[static_cast<std::size_t>(local)];
      acquired.push_back(g);
      taken[static_cast<std::size_t>(g)] = 1;
      observations.push_back({pool.prototype[g], pool.features[g], pool.true_labels[g]});
      class_counts[pool.true_labels[g]] += 1;
    }

    log_row(round, acquired, posterior_from_observations(prior, observations));
  }
  return trace;
}

ALTrace run_scenario(const Scenario& scn, Strategy strategy, std::uint64_t seed) {
  auto [ensemble, truth] = make_ensemble(scn.hypotheses, scn.features, scn.classes,
                                         scn.concentration, derive_seed(seed, {kTagEnsemble}));
  const SyntheticPool pool = make_pool(ensemble, truth, scn.prototypes_per_feature,
                                       scn.repetitions, derive_seed(seed, {kTagPool}));
  const TestSet test =
      make_test_set(ensemble, truth, scn.test_size, derive_seed(seed, {kTagTest}));
  return run_al_loop(ensemble, pool, test, strategy, scn.rounds, scn.b, scn.k, scn.m,
                     derive_seed(seed, {kTagLoop}), scn.exact_limit);
}

DiversityReport label_diversity(const ALTrace& trace) {
  if (trace.rows.empty()) throw DomainError("empty trace");
  DiversityReport out;
  for (const TraceRow& row : trace.rows) out.entropy_per_round.push_back(row.label_entropy_nats);
  out.final_histogram.assign(trace.rows.back().class_counts.begin(),
                             trace.rows.back().class_counts.end());
  std::sort(out.final_histogram.begin(), out.final_histogram.end(), std::greater<Index>());
  return out;
}

}  // namespace batchbald
