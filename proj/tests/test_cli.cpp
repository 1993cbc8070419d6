// Copyright (c) 2026 The citebench Authors. All Rights Reserved
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "citebench/citebench.hpp"
#include "run_config.hpp"

namespace {

namespace fs = std::filesystem;

const std::string kCli = CITEBENCH_CLI;
const fs::path kSource = CITEBENCH_SOURCE_DIR;

struct Result {
  int status = 0;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("citebench-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = kCli + " " + args + " > " + out.string() + " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
  }

  std::string corpus() const { return (kSource / "data/synthetic-1k/corpus.jsonl").string(); }
  fs::path dir_;
};

TEST_F(Cli, MissingSeedIsAMachineReadableError) {
  const auto r = run("pool --corpus " + corpus() + " --out " + (dir_ / "o").string());
  EXPECT_NE(r.status, 0);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"]["code"], "missing_seed");
}

TEST_F(Cli, MissingCorpusIsReported) {
  const auto r = run("ingest --corpus " + (dir_ / "nope.jsonl").string() + " --out " +
                     (dir_ / "o").string());
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"]["code"], "missing_input");
}

TEST_F(Cli, IngestSummaryAndManifest) {
  const auto r = run("ingest --corpus " + corpus() + " --out " + (dir_ / "o").string());
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "ingest: 1000 articles, 0 rejected lines, 122 dangling citations\n");
  const auto j = nlohmann::json::parse(slurp(dir_ / "o/ingest.json"));
  EXPECT_EQ(j["articles"], 1000);
  EXPECT_EQ(j["manifest"]["version"], citebench::kVersion);
  EXPECT_EQ(j["manifest"]["tool"], "citebench");
  EXPECT_FALSE(j["manifest"]["config_hash"].get<std::string>().empty());
}

TEST_F(Cli, FieldPoolIsByteDeterministic) {
  const std::string args = "pool --corpus " + corpus() +
                           " --setup field --field Med --size 500 --queries 3 --repetitions 1 --seed 7";
  ASSERT_EQ(run(args + " --out " + (dir_ / "a").string()).status, 0);
  ASSERT_EQ(run(args + " --out " + (dir_ / "b").string() + " --threads 4").status, 0);
  const auto file = "pools/field-Med-500-r0.json";
  ASSERT_TRUE(fs::exists(dir_ / "a" / file));
  EXPECT_EQ(slurp(dir_ / "a" / file), slurp(dir_ / "b" / file));
  const auto j = nlohmann::json::parse(slurp(dir_ / "a" / file));
  EXPECT_EQ(j["field"], "Med");
  EXPECT_EQ(j["queries"].size(), 3u);
}

TEST_F(Cli, FlagsOverrideConfigFile) {
  std::ofstream(dir_ / "cfg.json") << R"({"corpus": ")" << corpus()
                                   << R"(", "seed": 1, "size": [300, 400], "cutoff": 10})";
  citebench::cli::RunConfig c = citebench::cli::load_config((dir_ / "cfg.json").string());
  EXPECT_EQ(c.sizes, (std::vector<std::size_t>{300, 400}));
  const auto r = run("pool --config " + (dir_ / "cfg.json").string() +
                     " --size 350 --queries 5 --repetitions 1 --seed 3 --out " + (dir_ / "o").string());
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "o/pools/dataset-350-r0.json"));
  EXPECT_FALSE(fs::exists(dir_ / "o/pools/dataset-300-r0.json"));
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "o/pools/dataset-350-r0.json"))["seed"], 3);
}

TEST_F(Cli, EvalUnknownQueryNamesIt) {
  ASSERT_EQ(run("pool --corpus " + corpus() + " --size 300 --queries 5 --repetitions 1 --seed 2 --out " +
                (dir_ / "o").string()).status, 0);
  std::ofstream(dir_ / "bogus__dataset-300-r0.tsv") << "GHOST-QUERY\tW000001\t1\t1.0\n";
  const auto r = run("eval --pool " + (dir_ / "o/pools/dataset-300-r0.json").string() + " --run " +
                     (dir_ / "bogus__dataset-300-r0.tsv").string() + " --out " + (dir_ / "e").string());
  EXPECT_NE(r.status, 0);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"]["code"], "unknown_query");
  EXPECT_NE(j["error"]["message"].get<std::string>().find("GHOST-QUERY"), std::string::npos);
}

TEST_F(Cli, StagewiseCommandsChainTogether) {
  const std::string base = " --corpus " + corpus() + " --seed 4 --out " + dir_.string();
  ASSERT_EQ(run("pool --size 300 --queries 5 --repetitions 2" + base).status, 0);
  const std::string pools = " --pool " + (dir_ / "pools/dataset-300-r0.json").string() +
                            " --pool " + (dir_ / "pools/dataset-300-r1.json").string();
  const auto tune = run("tune" + pools + base);
  ASSERT_EQ(tune.status, 0) << tune.err;
  const auto params = nlohmann::json::parse(slurp(dir_ / "bm25.json"));
  EXPECT_EQ(params["grid_points"], 165);
  const std::string emb = " --embeddings specter=" + (kSource / "data/synthetic-1k/specter.f32").string();
  const auto ran = run("run --bm25-params " + (dir_ / "bm25.json").string() + emb + pools + base);
  ASSERT_EQ(ran.status, 0) << ran.err;
  EXPECT_EQ(ran.out, "run: wrote 4 run files\n");
  std::string runs;
  for (const char* m : {"bm25", "specter"})
    for (const char* r : {"r0", "r1"})
      runs += " --run " + (dir_ / "runs" / (std::string(m) + "__dataset-300-" + r + ".tsv")).string();
  const auto ev = run("eval" + pools + runs + base);
  ASSERT_EQ(ev.status, 0) << ev.err;
  const auto j = nlohmann::json::parse(slurp(dir_ / "eval.json"));
  const auto& map = j["results"]["dataset-300"]["bm25"]["MAP"];
  EXPECT_EQ(map["values"].size(), 2u);
  const double a = map["values"][0], b = map["values"][1];
  EXPECT_DOUBLE_EQ(map["mean"].get<double>(), (a + b) / 2);
  EXPECT_TRUE(fs::exists(dir_ / "eval.md"));
}

TEST_F(Cli, PipelineMatchesGoldenReport) {
  const auto r = run("pipeline --config " + (kSource / "data/pipeline.json").string() + " --out " +
                     (dir_ / "p").string());
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "p/benchmark/report.md"), slurp(kSource / "tests/golden/report.md"));
  EXPECT_EQ(slurp(dir_ / "p/benchmark/breakdown.md"), slurp(kSource / "tests/golden/breakdown.md"));
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "p/manifest.json"));
  for (const auto& [rel, hash] : manifest["outputs"].items()) {
    EXPECT_EQ(citebench::file_content_hash((dir_ / "p" / rel).string()), hash.get<std::string>());
    if (rel.size() > 5 && rel.substr(rel.size() - 5) == ".json") {
      const auto j = nlohmann::json::parse(slurp(dir_ / "p" / rel));
      EXPECT_EQ(j["manifest"]["config_hash"], manifest["config_hash"]) << rel;
    }
  }
}

}  // namespace
