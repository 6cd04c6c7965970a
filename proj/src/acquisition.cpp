#include "batchbald/acquisition.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "batchbald/entropy.hpp"
#include "batchbald/errors.hpp"
#include "batchbald/estimators.hpp"
#include "batchbald/parallel.hpp"
#include "batchbald/rng.hpp"

namespace batchbald {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void require_b(const PosteriorTensor& t, const AcquisitionRequest& req) {
  if (req.b < 1 || req.b > t.n_pool)
    throw DomainError("batch size " + std::to_string(req.b) + " outside [1, " +
                      std::to_string(t.n_pool) + "]");
  if (req.m < 1) throw DomainError("config sample count m must be >= 1");
  if (req.exact_limit < t.c)
    throw DomainError("exact limit " + std::to_string(req.exact_limit) +
                      " below class count " + std::to_string(t.c));
}

// Top-b of a precomputed score vector, descending, ties to lowest index.
AcquisitionResult top_b(const Vector& scores, Index b) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index bb) { return scores[a] > scores[bb]; });
  AcquisitionResult out;
  for (Index step = 0; step < b; ++step) {
    const Index idx = order[static_cast<std::size_t>(step)];
    out.indices.push_back(idx);
    out.scores.push_back(scores[idx]);
    out.modes.push_back(Mode::Exact);
    out.step_ms.push_back(0.0);
  }
  return out;
}

}  // namespace

Strategy strategy_from_string(const std::string& name) {
  if (name == "batchbald") return Strategy::BatchBald;
  if (name == "bald") return Strategy::Bald;
  if (name == "random") return Strategy::Random;
  if (name == "varratios") return Strategy::VarRatios;
  if (name == "meanstd") return Strategy::MeanStd;
  if (name == "exhaustive") return Strategy::Exhaustive;
  throw DomainError("unknown strategy: " + name);
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::BatchBald: return "batchbald";
    case Strategy::Bald: return "bald";
    case Strategy::Random: return "random";
    case Strategy::VarRatios: return "varratios";
    case Strategy::MeanStd: return "meanstd";
    case Strategy::Exhaustive: return "exhaustive";
  }
  return "?";
}

AcquisitionResult acquire_batchbald(const PosteriorTensor& t, const AcquisitionRequest& req) {
  require_b(t, req);
  const Index n_pool = t.n_pool;

  // Per-point conditional entropies are reused by every step.
  Vector cond(n_pool);
  for (Index i = 0; i < n_pool; ++i) cond[i] = conditional_entropy_point(t, i);

  AcquisitionResult out;
  std::vector<char> taken(static_cast<std::size_t>(n_pool), 0);
  JointState committed = make_empty_exact(t.k);
  bool committed_exact_ok = true;  // c^|committed| still within the limit
  Scalar cond_sum = 0.0;

  for (Index step = 1; step <= req.b; ++step) {
    const auto start = Clock::now();
    const bool exact_step = exact_fits(t.c, step, req.exact_limit);

    Vector scores = Vector::Constant(n_pool, -std::numeric_limits<Scalar>::infinity());

    if (exact_step) {
      parallel_for(n_pool, req.jobs, [&](Index begin, Index end) {
        for (Index i = begin; i < end; ++i) {
          if (taken[static_cast<std::size_t>(i)]) continue;
          scores[i] = joint_entropy_exact_extended(committed, t, i) - (cond_sum + cond[i]);
        }
      });
    } else {
      // One shared configuration context per step: candidates are compared
      // under common random numbers.
      std::vector<Index> prefix = out.indices;
      const JointState context = sample_configurations(
          t, prefix, req.m, derive_seed(req.seed, {0x5354u, static_cast<std::uint64_t>(step)}));
      parallel_for(n_pool, req.jobs, [&](Index begin, Index end) {
        for (Index i = begin; i < end; ++i) {
          if (taken[static_cast<std::size_t>(i)]) continue;
          scores[i] = joint_entropy_sampled(context, t, i) - (cond_sum + cond[i]);
        }
      });
    }

    Index best = -1;
    for (Index i = 0; i < n_pool; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || scores[i] > scores[best]) best = i;
    }

    taken[static_cast<std::size_t>(best)] = 1;
    cond_sum += cond[best];
    // The committed prefix only needs extending while the next step can
    // still score exactly; exact_fits is monotone in n, so once it stops
    // fitting it never fits again.
    if (committed_exact_ok && step < req.b && exact_fits(t.c, step + 1, req.exact_limit)) {
      JointState scratch;
      extend_joint_exact_into(scratch, committed, t, best);
      std::swap(committed, scratch);
    } else {
      committed_exact_ok = false;
    }

    out.indices.push_back(best);
    out.scores.push_back(scores[best]);
    out.modes.push_back(exact_step ? Mode::Exact : Mode::Sampled);
    out.step_ms.push_back(ms_since(start));
  }
  return out;
}

AcquisitionResult acquire_bald(const PosteriorTensor& t, const AcquisitionRequest& req) {
  require_b(t, req);
  const auto start = Clock::now();
  AcquisitionResult out = top_b(bald_scores(t), req.b);
  out.step_ms.assign(out.step_ms.size(), ms_since(start) / static_cast<double>(req.b));
  return out;
}

AcquisitionResult acquire_varratios(const PosteriorTensor& t, const AcquisitionRequest& req) {
  require_b(t, req);
  Vector scores(t.n_pool);
  for (Index i = 0; i < t.n_pool; ++i) {
    const Vector mean = t.point(i).colwise().mean();
    scores[i] = 1.0 - mean.maxCoeff();
  }
  return top_b(scores, req.b);
}

AcquisitionResult acquire_meanstd(const PosteriorTensor& t, const AcquisitionRequest& req) {
  require_b(t, req);
  Vector scores(t.n_pool);
  for (Index i = 0; i < t.n_pool; ++i) {
    const auto point = t.point(i);
    Scalar acc = 0.0;
    for (Index y = 0; y < t.c; ++y) {
      // Population standard deviation over the k samples (divisor k).
      const Scalar mean = point.col(y).mean();
      const Scalar var = (point.col(y).array() - mean).square().mean();
      acc += std::sqrt(var);
    }
    scores[i] = acc / static_cast<Scalar>(t.c);
  }
  return top_b(scores, req.b);
}

AcquisitionResult acquire_random(const PosteriorTensor& t, const AcquisitionRequest& req) {
  require_b(t, req);
  Rng rng(derive_seed(req.seed, {0x72616e64u}));
  std::vector<Index> pool(static_cast<std::size_t>(t.n_pool));
  std::iota(pool.begin(), pool.end(), Index{0});
  AcquisitionResult out;
  for (Index step = 0; step < req.b; ++step) {
    const auto pick = static_cast<std::size_t>(
        rng.uniform_index(static_cast<std::uint64_t>(pool.size() - step)));
    std::swap(pool[step + pick], pool[step]);
    out.indices.push_back(pool[step]);
    out.scores.push_back(0.0);
    out.modes.push_back(Mode::Exact);
    out.step_ms.push_back(0.0);
  }
  return out;
}

AcquisitionResult acquire_exhaustive(const PosteriorTensor& t, const AcquisitionRequest& req) {
  require_b(t, req);
  if (!exact_fits(t.c, req.b, req.exact_limit))
    throw DomainError("exhaustive search needs c^b within the exact limit");
  // C(n_pool, b) must stay enumerable.
  {
    double combos = 1.0;
    for (Index step = 0; step < req.b; ++step)
      combos *= static_cast<double>(t.n_pool - step) / static_cast<double>(step + 1);
    if (combos > 1e6) throw DomainError("exhaustive search too large: C(n_pool, b) > 1e6");
  }

  std::vector<Index> subset(static_cast<std::size_t>(req.b));
  std::iota(subset.begin(), subset.end(), Index{0});
  std::vector<Index> best;
  Scalar best_score = -std::numeric_limits<Scalar>::infinity();

  // Lexicographic subset enumeration; strict > keeps the first (smallest) tie.
  while (true) {
    const Scalar s = batchbald_score(t, subset, req.exact_limit, req.m, req.seed).score;
    if (s > best_score) {
      best_score = s;
      best = subset;
    }
    Index pos = req.b - 1;
    while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == t.n_pool - req.b + pos) --pos;
    if (pos < 0) break;
    ++subset[static_cast<std::size_t>(pos)];
    for (Index q = pos + 1; q < req.b; ++q)
      subset[static_cast<std::size_t>(q)] = subset[static_cast<std::size_t>(q - 1)] + 1;
  }

  AcquisitionResult out;
  std::vector<Index> prefix;
  for (Index idx : best) {
    prefix.push_back(idx);
    out.indices.push_back(idx);
    out.scores.push_back(batchbald_score(t, prefix, req.exact_limit, req.m, req.seed).score);
    out.modes.push_back(Mode::Exact);
    out.step_ms.push_back(0.0);
  }
  return out;
}

AcquisitionResult acquire(const PosteriorTensor& t, const AcquisitionRequest& req) {
  switch (req.strategy) {
    case Strategy::BatchBald: return acquire_batchbald(t, req);
    case Strategy::Bald: return acquire_bald(t, req);
    case Strategy::Random: return acquire_random(t, req);
    case Strategy::VarRatios: return acquire_varratios(t, req);
    case Strategy::MeanStd: return acquire_meanstd(t, req);
    case Strategy::Exhaustive: return acquire_exhaustive(t, req);
  }
  throw DomainError("unknown strategy enum");
}

}  // namespace batchbald
