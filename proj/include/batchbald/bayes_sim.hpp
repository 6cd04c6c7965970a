#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "batchbald/acquisition.hpp"
#include "batchbald/tensor.hpp"
#include "batchbald/trace.hpp"
#include "batchbald/types.hpp"

namespace batchbald {

// Finite Bayesian model: H candidate tables p(y | feature, hypothesis)
// with an exact posterior over hypotheses.
struct HypothesisEnsemble {
  Index H = 0;
  Index F = 0;
  Index c = 0;
  std::vector<RowMatrix> tables;  // H tables of shape F x c
  Vector log_weights;             // normalized: logsumexp = 0
};

// Pool of feature-bucket points. Duplicates are exact copies: every copy
// shares its prototype's single realized label, and `prototype` records
// which copies are the same underlying measurement.
struct SyntheticPool {
  IntVector features;     // feature bucket per point
  IntVector true_labels;  // hidden label per point (shared within a prototype)
  IntVector prototype;    // duplicate-group id per point
  int repetitions = 0;
};

struct TestSet {
  IntVector features;
  IntVector labels;
};

// One revealed label: (duplicate-group id, feature, label).
struct Observation {
  Index prototype = 0;
  Index feature = 0;
  Index label = 0;
};

struct Scenario {
  Index hypotheses = 32;
  Index features = 16;
  Index classes = 4;
  Index prototypes_per_feature = 10;
  int repetitions = 2;
  Index rounds = 10;
  Index b = 4;
  Index k = 64;
  Index m = kDefaultConfigSamples;
  Index exact_limit = kDefaultExactLimit;
  Scalar concentration = 0.6;
  Index test_size = 20000;
};

// Rows drawn from a symmetric Dirichlet, uniform prior, one designated
// ground-truth hypothesis. Deterministic per seed.
std::pair<HypothesisEnsemble, Index> make_ensemble(Index H, Index F, Index c,
                                                   Scalar concentration, std::uint64_t seed);

// One Bayes update; likelihood clamped at 1e-300 before the log.
HypothesisEnsemble posterior_update(const HypothesisEnsemble& e, Index feature, Index label);

// Prior -> posterior over a whole observation set, deduplicated by
// prototype id: an exact copy's label is the same measurement seen again,
// not fresh evidence.
HypothesisEnsemble posterior_from_observations(const HypothesisEnsemble& prior,
                                               const std::vector<Observation>& obs);

// k hypothesis draws (iid from the posterior, with replacement), shared by
// every row: probs[i][j][.] = drawn table j at features[i].
PosteriorTensor sample_posterior_tensor(const HypothesisEnsemble& e, const IntVector& features,
                                        Index k, std::uint64_t seed);
PosteriorTensor sample_posterior_tensor(const HypothesisEnsemble& e, const SyntheticPool& pool,
                                        Index k, std::uint64_t seed);

// I[y ; hypothesis | x_i, conditioning labels], evaluated with the full
// weighted ensemble (no sampling).
Scalar exact_conditional_mi(const HypothesisEnsemble& e, const SyntheticPool& pool, Index i,
                            const std::vector<Observation>& conditioning);

// Pool layout: copy block outermost, then prototype rank, feature bucket
// fastest, so pool size = F * prototypes * (repetitions + 1) and equal-score
// ties sweep across buckets rather than within one.
SyntheticPool make_pool(const HypothesisEnsemble& e, Index truth, Index prototypes_per_feature,
                        int repetitions, std::uint64_t seed);

// Held-out points: uniform feature, label drawn from the truth's row.
TestSet make_test_set(const HypothesisEnsemble& e, Index truth, Index size, std::uint64_t seed);

// Posterior-predictive argmax accuracy on the test set.
Scalar predictive_accuracy(const HypothesisEnsemble& e, const TestSet& test);

// Full loop. Per round: posterior from scratch over all observations,
// fresh posterior tensor over the remaining pool, strategy, reveal labels,
// evaluate. Row 0 of the trace is the initial evaluation under the prior.
ALTrace run_al_loop(const HypothesisEnsemble& prior, const SyntheticPool& pool,
                    const TestSet& test, Strategy strategy, Index rounds, Index b, Index k,
                    Index m, std::uint64_t seed, Index exact_limit = kDefaultExactLimit);

// Ensemble, pool, and test set derived from one seed; returns the trace of
// the requested strategy on them.
ALTrace run_scenario(const Scenario& scn, Strategy strategy, std::uint64_t seed);

// Cumulative label entropy per round plus the final histogram sorted by
// descending count.
struct DiversityReport {
  std::vector<Scalar> entropy_per_round;
  std::vector<Index> final_histogram;
};
DiversityReport label_diversity(const ALTrace& trace);

}  // namespace batchbald
