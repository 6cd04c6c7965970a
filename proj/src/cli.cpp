#include "batchbald/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "batchbald/acquisition.hpp"
#include "batchbald/bayes_sim.hpp"
#include "batchbald/errors.hpp"
#include "batchbald/estimators.hpp"
#include "batchbald/tensor_io.hpp"
#include "batchbald/verify.hpp"

namespace batchbald {

namespace {

constexpr std::uint64_t kTagTrial = 0x74726961u;  // simulate trial stream

void emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty()) {
    std::fwrite(contents.data(), 1, contents.size(), stdout);
  } else {
    atomic_write(out_path, contents);
  }
}

struct CommonFlags {
  std::string tensor_path;
  std::string strategy = "bald";
  Index b = 1;
  Index m = kDefaultConfigSamples;
  Index exact_limit = kDefaultExactLimit;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
};

int cmd_score(const CommonFlags& fl) {
  PosteriorTensor t = read_tensor(fl.tensor_path);
  require_valid(t);
  Strategy s = strategy_from_string(fl.strategy);
  Vector scores;
  switch (s) {
    case Strategy::Bald:
      scores = bald_scores(t);
      break;
    case Strategy::VarRatios: {
      AcquisitionRequest req;
      req.strategy = s;
      req.b = t.n_pool;
      req.seed = fl.seed;
      AcquisitionResult r = acquire_varratios(t, req);
      scores.resize(t.n_pool);
      for (Index j = 0; j < t.n_pool; ++j) scores[r.indices[static_cast<std::size_t>(j)]] = r.scores[static_cast<std::size_t>(j)];
      break;
    }
    case Strategy::MeanStd: {
      AcquisitionRequest req;
      req.strategy = s;
      req.b = t.n_pool;
      req.seed = fl.seed;
      AcquisitionResult r = acquire_meanstd(t, req);
      scores.resize(t.n_pool);
      for (Index j = 0; j < t.n_pool; ++j) scores[r.indices[static_cast<std::size_t>(j)]] = r.scores[static_cast<std::size_t>(j)];
      break;
    }
    default:
      throw DomainError("score needs a per-point strategy (bald, varratios, meanstd)");
  }
  std::string csv = "index,score\n";
  char line[64];
  for (Index i = 0; i < t.n_pool; ++i) {
    std::snprintf(line, sizeof(line), "%lld,%.17g\n", static_cast<long long>(i), scores[i]);
    csv += line;
  }
  emit(fl.out, csv);
  return 0;
}

int cmd_acquire(const CommonFlags& fl) {
  PosteriorTensor t = read_tensor(fl.tensor_path);
  require_valid(t);
  AcquisitionRequest req;
  req.strategy = strategy_from_string(fl.strategy);
  req.b = fl.b;
  req.m = fl.m;
  req.exact_limit = fl.exact_limit;
  req.seed = fl.seed;
  req.jobs = fl.jobs;
  AcquisitionResult r = acquire(t, req);
  ResultsDocument doc;
  doc.strategy = fl.strategy;
  doc.b = fl.b;
  doc.k = t.k;
  doc.m = fl.m;
  doc.seed = fl.seed;
  doc.exact_limit = fl.exact_limit;
  doc.acquired = r.indices;
  doc.scores = r.scores;
  doc.step_ms = r.step_ms;
  emit(fl.out, results_to_json(doc));
  return 0;
}

struct SimulateFlags {
  Index hypotheses = 32;
  Index features = 16;
  Index classes = 4;
  int repetitions = 2;
  Index rounds = 10;
  int trials = 5;
  Index k = 64;
  std::string strategies = "batchbald,bald,random";
  std::string out_dir = ".";
};

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

Scalar median(std::vector<Scalar> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_simulate(const CommonFlags& fl, const SimulateFlags& sf) {
  Scenario scn;
  scn.hypotheses = sf.hypotheses;
  scn.features = sf.features;
  scn.classes = sf.classes;
  scn.repetitions = sf.repetitions;
  scn.rounds = sf.rounds;
  scn.b = fl.b;
  scn.k = sf.k;
  scn.m = fl.m;
  scn.exact_limit = fl.exact_limit;

  std::vector<std::string> names = split_csv_list(sf.strategies);
  if (names.empty()) throw DomainError("no strategies given");

  nlohmann::ordered_json summary;
  summary["trials"] = sf.trials;
  summary["rounds"] = scn.rounds;
  summary["b"] = scn.b;
  summary["seed"] = fl.seed;
  nlohmann::ordered_json per_strategy;
  for (const std::string& name : names) {
    Strategy s = strategy_from_string(name);
    std::vector<ALTrace> traces;
    std::vector<Scalar> finals;
    for (int trial = 0; trial < sf.trials; ++trial) {
      std::uint64_t trial_seed = derive_seed(fl.seed, {kTagTrial, static_cast<std::uint64_t>(trial)});
      ALTrace tr = run_scenario(scn, s, trial_seed);
      finals.push_back(tr.rows.back().test_accuracy);
      traces.push_back(std::move(tr));
    }
    atomic_write(sf.out_dir + "/" + name + ".csv", traces_to_csv(traces));
    nlohmann::ordered_json row;
    row["median_final_accuracy"] = median(finals);
    per_strategy[name] = row;
  }
  summary["strategies"] = per_strategy;
  atomic_write(sf.out_dir + "/summary.json", summary.dump(2) + "\n");
  return 0;
}

struct VerifyFlags {
  int trials = 100;
  std::string counterexample_path = "counterexample.json";
  Scalar inject_joint_bias = 0.0;
};

int cmd_verify(const CommonFlags& fl, const VerifyFlags& vf) {
  VerifyHooks hooks;
  hooks.joint_bias = vf.inject_joint_bias;
  VerifyReport report = run_verify_suite(vf.trials, fl.seed, hooks);
  emit(fl.out, report.to_json());
  if (!report.ok()) {
    atomic_write(vf.counterexample_path, report.first_counterexample() + "\n");
    return 1;
  }
  return 0;
}

struct BenchFlags {
  std::vector<Index> n_pool{1000, 2000};
  Index c = 4;
  Index k = 32;
};

int cmd_bench(const CommonFlags& fl, const BenchFlags& bf) {
  std::string csv = "n_pool,b,c,k,m,mode,ms\n";
  char line[160];
  for (int sampled = 0; sampled < 2; ++sampled) {
    for (Index n : bf.n_pool) {
      Rng rng(derive_seed(fl.seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(sampled)}));
      PosteriorTensor t = make_random_tensor(rng, n, bf.k, bf.c);
      AcquisitionRequest req;
      req.strategy = Strategy::BatchBald;
      req.b = fl.b;
      req.m = fl.m;
      req.seed = derive_seed(fl.seed, {7});
      req.jobs = fl.jobs;
      if (sampled) {
        req.exact_limit = bf.c;  // multi-point steps go Monte-Carlo
      } else {
        Index limit = kDefaultExactLimit;
        // make sure every step up to b stays exact
        Index need = 1;
        bool fits = true;
        for (Index s = 0; s < fl.b; ++s) {
          if (need > (std::numeric_limits<Index>::max)() / bf.c) {
            fits = false;
            break;
          }
          need *= bf.c;
        }
        if (!fits) throw DomainError("c^b overflows the exact mode");
        req.exact_limit = std::max(limit, need);
      }
      double best = 0.0;
      for (int rep = 0; rep < 3; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        AcquisitionResult r = acquire_batchbald(t, req);
        auto t1 = std::chrono::steady_clock::now();
        (void)r;
        double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (rep == 0 || ms < best) best = ms;
      }
      std::snprintf(line, sizeof(line), "%lld,%lld,%lld,%lld,%lld,%s,%.3f\n",
                    static_cast<long long>(n), static_cast<long long>(fl.b),
                    static_cast<long long>(bf.c), static_cast<long long>(bf.k),
                    static_cast<long long>(fl.m), sampled ? "sampled" : "exact", best);
      csv += line;
    }
  }
  emit(fl.out, csv);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"BatchBALD batch acquisition toolkit"};
  app.require_subcommand(1);

  CommonFlags fl;
  SimulateFlags sf;
  VerifyFlags vf;
  BenchFlags bf;

  auto add_common = [&](CLI::App* sub, bool needs_tensor) {
    if (needs_tensor)
      sub->add_option("--tensor", fl.tensor_path, "PTF1 posterior tensor file")->required();
    sub->add_option("--seed", fl.seed, "root seed; every stream derives from it");
    sub->add_option("--jobs", fl.jobs, "worker threads for candidate scoring")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", fl.out, "output path (stdout when omitted)");
  };

  CLI::App* score = app.add_subcommand("score", "per-point scores for a tensor, CSV by index");
  add_common(score, true);
  score->add_option("--strategy", fl.strategy, "bald, varratios, or meanstd");

  CLI::App* acq = app.add_subcommand("acquire", "select a batch from a tensor, JSON record");
  add_common(acq, true);
  acq->add_option("--strategy", fl.strategy, "batchbald, bald, random, varratios, meanstd, exhaustive");
  acq->add_option("--b", fl.b, "batch size")->check(CLI::PositiveNumber);
  acq->add_option("--m", fl.m, "Monte-Carlo configuration samples")->check(CLI::PositiveNumber);
  acq->add_option("--exact-limit", fl.exact_limit, "exact joint enumeration while c^n fits");

  CLI::App* sim = app.add_subcommand("simulate", "active-learning loops on the synthetic model");
  add_common(sim, false);
  sim->add_option("--hypotheses", sf.hypotheses)->check(CLI::PositiveNumber);
  sim->add_option("--features", sf.features)->check(CLI::PositiveNumber);
  sim->add_option("--classes", sf.classes)->check(CLI::Range(2, 1 << 20));
  sim->add_option("--repetitions", sf.repetitions, "exact copies added per pool point")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--rounds", sf.rounds)->check(CLI::NonNegativeNumber);
  sim->add_option("--trials", sf.trials, "independent seeds per strategy")->check(CLI::PositiveNumber);
  sim->add_option("--k", sf.k, "posterior samples per tensor")->check(CLI::PositiveNumber);
  sim->add_option("--b", fl.b, "batch size per round")->check(CLI::PositiveNumber);
  sim->add_option("--m", fl.m, "Monte-Carlo configuration samples")->check(CLI::PositiveNumber);
  sim->add_option("--exact-limit", fl.exact_limit);
  sim->add_option("--strategies", sf.strategies, "comma-separated strategy list");
  sim->add_option("--out-dir", sf.out_dir, "directory for per-strategy CSVs and summary.json");

  CLI::App* ver = app.add_subcommand("verify", "property suite on random instances");
  add_common(ver, false);
  ver->add_option("--trials", vf.trials, "instances per property")->check(CLI::PositiveNumber);
  ver->add_option("--counterexample", vf.counterexample_path,
                  "where the first failing instance is written");
  ver->add_option("--inject-joint-bias", vf.inject_joint_bias,
                  "fault-injection hook: adds bias*|S|^2 to joint entropies");

  CLI::App* bench = app.add_subcommand("bench", "greedy acquisition timing sweep, CSV");
  add_common(bench, false);
  bench->add_option("--n-pool", bf.n_pool, "pool sizes to sweep")->delimiter(',');
  bench->add_option("--b", fl.b, "batch size")->check(CLI::PositiveNumber);
  bench->add_option("--c", bf.c, "classes in the generated tensors")->check(CLI::Range(2, 64));
  bench->add_option("--k", bf.k, "parameter samples")->check(CLI::PositiveNumber);
  bench->add_option("--m", fl.m, "configuration samples for the sampled rows")
      ->check(CLI::PositiveNumber);

  // subcommand-specific defaults
  sim->preparse_callback([&](std::size_t) { fl.b = 4; });
  bench->preparse_callback([&](std::size_t) { fl.b = 4; fl.m = 1000; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  }

  try {
    if (score->parsed()) return cmd_score(fl);
    if (acq->parsed()) return cmd_acquire(fl);
    if (sim->parsed()) return cmd_simulate(fl, sf);
    if (ver->parsed()) return cmd_verify(fl, vf);
    if (bench->parsed()) return cmd_bench(fl, bf);
  } catch (const FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return 2;
  } catch (const ValidationFailure& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 3;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 4;
  }
  return 0;
}

}  // namespace batchbald
