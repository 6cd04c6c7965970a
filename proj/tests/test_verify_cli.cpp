#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "batchbald/errors.hpp"
#include "batchbald/rng.hpp"
#include "batchbald/tensor_io.hpp"
#include "batchbald/verify.hpp"

using namespace batchbald;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

// Runs the installed CLI through the shell and captures stdout.
RunResult run_cli_cmd(const std::string& args) {
  const std::string cmd = std::string(BB_CLI_PATH) + " " + args;
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) result.out.append(buf.data(), got);
  const int status = pclose(pipe);
  REQUIRE(WIFEXITED(status));
  result.exit_code = WEXITSTATUS(status);
  return result;
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "bb_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

fs::path write_fixture_tensor(const std::string& name, Index n, Index k, Index c,
                              std::uint64_t seed) {
  Rng rng(seed);
  PosteriorTensor t = make_random_tensor(rng, n, k, c);
  fs::path path = work_dir() / name;
  write_tensor(t, path.string());
  return path;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("clean suite passes every property") {
  VerifyReport report = run_verify_suite(20, 7);
  CHECK(report.ok());
  REQUIRE(report.properties.size() == 9);
  std::set<std::string> names;
  for (const PropertyResult& p : report.properties) {
    CHECK(p.trials == 20);
    CHECK(p.failures == 0);
    CHECK(p.counterexample.empty());
    names.insert(p.name);
  }
  CHECK(names.size() == 9);  // distinct property names
  CHECK(names.count("size1_matches_bald") == 1);
  CHECK(names.count("upper_bound") == 1);
  CHECK(names.count("submodularity") == 1);
  CHECK(report.first_counterexample().empty());

  json doc = json::parse(report.to_json());
  CHECK(doc["ok"] == true);
  CHECK(doc["properties"].size() == 9);
  for (const auto& row : doc["properties"]) {
    CHECK(row["trials"] == 20);
    CHECK(row["failures"] == 0);
    CHECK(row["counterexample"].is_null());
  }
}

TEST_CASE("an injected joint bias is caught by exactly the bound properties") {
  VerifyHooks hooks;
  hooks.joint_bias = 0.05;
  VerifyReport report = run_verify_suite(20, 7, hooks);
  CHECK_FALSE(report.ok());
  for (const PropertyResult& p : report.properties) {
    const bool should_fail = p.name == "upper_bound" || p.name == "submodularity";
    if (should_fail) {
      CHECK(p.failures > 0);
      CHECK_FALSE(p.counterexample.empty());
      json ce = json::parse(p.counterexample);
      CHECK(ce["property"] == p.name);
      CHECK(ce.contains("instance_seed"));
      CHECK(ce.contains("lhs"));
      CHECK(ce.contains("rhs"));
    } else {
      CHECK(p.failures == 0);
    }
  }
  CHECK_FALSE(report.first_counterexample().empty());
  json doc = json::parse(report.to_json());
  CHECK(doc["ok"] == false);
}

TEST_CASE("negative bias trips the lower-bound side") {
  VerifyHooks hooks;
  hooks.joint_bias = -0.05;
  VerifyReport report = run_verify_suite(10, 7, hooks);
  CHECK_FALSE(report.ok());
  bool monotone_failed = false;
  for (const PropertyResult& p : report.properties)
    if (p.name == "monotone_gains" && p.failures > 0) monotone_failed = true;
  CHECK(monotone_failed);
}

TEST_CASE("cli: score emits a csv of per-point scores") {
  fs::path tensor = write_fixture_tensor("score.ptf", 6, 4, 3, 11);
  RunResult r = run_cli_cmd("score --tensor " + quoted(tensor) + " --strategy bald");
  CHECK(r.exit_code == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "index,score");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    CHECK(std::stoll(line.substr(0, comma)) == static_cast<long long>(i - 1));
    volatile double score = std::stod(line.substr(comma + 1));
    CHECK(score >= 0.0);
  }
}

TEST_CASE("cli: exit code 2 for malformed bytes") {
  fs::path tensor = write_fixture_tensor("magic.ptf", 3, 2, 2, 13);
  {
    std::fstream f(tensor, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  RunResult r = run_cli_cmd("score --tensor " + quoted(tensor) + " 2>/dev/null");
  CHECK(r.exit_code == 2);
}

TEST_CASE("cli: exit code 3 for invariant violations") {
  Rng rng(17);
  PosteriorTensor t = make_random_tensor(rng, 3, 2, 2);
  t.at(1, 0, 0) += 0.2;  // breaks the row sum
  fs::path tensor = work_dir() / "rowsum.ptf";
  write_tensor(t, tensor.string());
  RunResult r = run_cli_cmd("score --tensor " + quoted(tensor) + " 2>/dev/null");
  CHECK(r.exit_code == 3);
}

TEST_CASE("cli: exit code 4 for domain and usage errors") {
  fs::path tensor = write_fixture_tensor("small.ptf", 3, 2, 2, 19);
  RunResult over = run_cli_cmd("acquire --tensor " + quoted(tensor) + " --b 9 2>/dev/null");
  CHECK(over.exit_code == 4);
  RunResult flag = run_cli_cmd("score --tensor " + quoted(tensor) + " --no-such-flag 2>/dev/null");
  CHECK(flag.exit_code == 4);
  RunResult missing = run_cli_cmd("score --tensor " + quoted(work_dir() / "absent.ptf") + " 2>/dev/null");
  CHECK(missing.exit_code == 2);
  RunResult help = run_cli_cmd("--help");
  CHECK(help.exit_code == 0);
}

TEST_CASE("cli: acquire json is reproducible apart from timings") {
  fs::path tensor = write_fixture_tensor("acq.ptf", 8, 4, 3, 23);
  const std::string cmd =
      "acquire --tensor " + quoted(tensor) + " --strategy batchbald --b 3 --seed 5";
  RunResult a = run_cli_cmd(cmd);
  RunResult b = run_cli_cmd(cmd);
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  json da = json::parse(a.out);
  json db = json::parse(b.out);
  CHECK(da["strategy"] == "batchbald");
  CHECK(da["b"] == 3);
  CHECK(da["acquired"].size() == 3);
  CHECK(da["scores"].size() == 3);
  da.erase("step_ms");
  db.erase("step_ms");
  CHECK(da == db);

  // document key order is part of the contract
  std::vector<std::string> keys;
  nlohmann::ordered_json ordered = nlohmann::ordered_json::parse(a.out);
  for (auto it = ordered.begin(); it != ordered.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"strategy", "b", "k", "m", "seed", "exact_limit",
                                         "acquired", "scores", "step_ms"});
}

TEST_CASE("cli: verify subcommand reports and fails loudly") {
  fs::path ce = work_dir() / "ce.json";
  RunResult ok = run_cli_cmd("verify --trials 5 --seed 3 --counterexample " + quoted(ce));
  CHECK(ok.exit_code == 0);
  json doc = json::parse(ok.out);
  CHECK(doc["ok"] == true);
  for (const auto& row : doc["properties"]) CHECK(row["trials"] == 5);
  CHECK_FALSE(fs::exists(ce));

  RunResult bad = run_cli_cmd("verify --trials 5 --seed 3 --inject-joint-bias 0.05 --counterexample " +
                              quoted(ce));
  CHECK(bad.exit_code == 1);
  json bad_doc = json::parse(bad.out);
  CHECK(bad_doc["ok"] == false);
  REQUIRE(fs::exists(ce));
  std::ifstream in(ce);
  json ce_doc = json::parse(in);
  CHECK(ce_doc.contains("property"));
  CHECK(ce_doc.contains("subset"));
}

TEST_CASE("cli: simulate writes per-strategy traces and a summary") {
  fs::path out_dir = work_dir() / "sim";
  fs::create_directories(out_dir);
  RunResult r = run_cli_cmd(
      "simulate --hypotheses 4 --features 2 --classes 2 --repetitions 1 "
      "--rounds 0 --trials 1 --k 8 --strategies random --seed 2 --out-dir " +
      quoted(out_dir));
  CHECK(r.exit_code == 0);

  std::ifstream csv(out_dir / "random.csv");
  REQUIRE(csv.good());
  std::string text((std::istreambuf_iterator<char>(csv)), std::istreambuf_iterator<char>());
  auto lines = lines_of(text);
  REQUIRE(lines.size() == 2);  // header + the initial evaluation row
  CHECK(lines[0].find("round") != std::string::npos);

  std::ifstream summary_in(out_dir / "summary.json");
  REQUIRE(summary_in.good());
  json summary = json::parse(summary_in);
  CHECK(summary["trials"] == 1);
  CHECK(summary["rounds"] == 0);
  CHECK(summary["strategies"].contains("random"));
  CHECK(summary["strategies"]["random"].contains("median_final_accuracy"));
}

TEST_CASE("cli: simulate rejects an impossible budget") {
  RunResult r = run_cli_cmd(
      "simulate --hypotheses 4 --features 2 --classes 2 --repetitions 0 "
      "--rounds 100 --trials 1 --k 8 --strategies random --out-dir " +
      quoted(work_dir()) + " 2>/dev/null");
  CHECK(r.exit_code == 4);
}

TEST_CASE("cli: bench prints one row per size and batch position") {
  RunResult r = run_cli_cmd("bench --n-pool 40,80 --b 2 --c 3 --k 4 --m 100 --seed 1");
  CHECK(r.exit_code == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() >= 3);
  CHECK(lines[0] == "n_pool,b,c,k,m,mode,ms");
  CHECK(lines.size() == 5);  // 2 sizes x {exact, sampled}
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const bool has_mode = lines[i].find("exact") != std::string::npos ||
                          lines[i].find("sampled") != std::string::npos;
    CHECK(has_mode);
  }
}
