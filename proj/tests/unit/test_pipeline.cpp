// Copyright 2026 The Authors.
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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "divsample/config.hpp"
#include "divsample/error.hpp"
#include "divsample/pipeline.hpp"

using namespace divsample;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("divsample_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

PipelineConfig fixture_config(const fs::path& out) {
  auto c = load_pipeline_config(fs::path(DIVSAMPLE_CONFIG_DIR) / "pipeline.toml");
  c.output_dir = out;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("hashing") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS_AS(sha256_file("/nonexistent/file"), DataError);
}

TEST_CASE("full run writes every stage") {
  const auto dir = scratch("full");
  const auto r = run_pipeline(fixture_config(dir));
  REQUIRE(r.ok);
  CHECK(r.exit_code == 0);
  CHECK(r.manifest["status"] == "ok");
  const auto& stages = r.manifest["stages"];
  REQUIRE(stages.size() == 7);
  const char* names[] = {"preprocess", "sample", "verbalise", "generate", "select", "assemble", "score"};
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(stages[i]["name"] == names[i]);
    CHECK(stages[i]["status"] == "ok");
    for (const auto& a : stages[i]["artifacts"]) {
      const auto path = dir / a["path"].get<std::string>();
      REQUIRE(fs::exists(path));
      CHECK(a["sha256"] == sha256_file(path));
    }
  }
  const auto audit = nlohmann::json::parse(slurp(dir / "score.json"));
  CHECK(audit["mode"] == "dataset_audit");
  CHECK(audit["coverage_violations"] == 0);
  CHECK(audit["report"]["f1"] == 1.0);
  CHECK(fs::file_size(dir / "train.jsonl") > 0);
  fs::remove_all(dir);
}

TEST_CASE("runs are reproducible") {
  const auto a = scratch("a"), b = scratch("b");
  REQUIRE(run_pipeline(fixture_config(a)).ok);
  REQUIRE(run_pipeline(fixture_config(b)).ok);
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
  auto other = fixture_config(b);
  other.seed = 8;
  REQUIRE(run_pipeline(other).ok);
  CHECK(slurp(a / "manifest.json") != slurp(b / "manifest.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("a failing backend stops the run and keeps earlier artifacts") {
  const auto dir = scratch("fail");
  auto c = fixture_config(dir);
  c.generate.backend = "mock:fail";
  c.generate.max_attempts = 1;
  const auto r = run_pipeline(c);
  CHECK_FALSE(r.ok);
  CHECK(r.exit_code == 3);
  CHECK(r.failed_stage == "generate");
  CHECK(r.manifest["status"] == "failed");
  const auto& stages = r.manifest["stages"];
  REQUIRE(stages.size() == 4);
  CHECK(stages[3]["status"] == "failed");
  CHECK(stages[3].contains("error"));
  CHECK(fs::exists(dir / "corpus.jsonl"));
  CHECK(fs::exists(dir / "sample.jsonl"));
  CHECK(fs::exists(dir / "instructions.jsonl"));
  CHECK_FALSE(fs::exists(dir / "selected.jsonl"));
  CHECK(fs::exists(r.manifest_path));
  fs::remove_all(dir);
}

TEST_CASE("a missing corpus fails with a data error") {
  const auto dir = scratch("missing");
  auto c = fixture_config(dir);
  c.corpus.path = dir / "absent.tsv";
  c.corpus.keywords.reset();
  CHECK_THROWS_AS(run_pipeline(c), DataError);
  fs::remove_all(dir);
}
