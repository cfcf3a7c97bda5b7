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

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <doctest.h>
#include <fmt/format.h>
#include <httplib.h>

#include "divsample/error.hpp"
#include "divsample/score.hpp"
#include "divsample/synthgen.hpp"
#include "divsample/templates.hpp"
#include "oracles.hpp"

using namespace divsample;
using namespace std::chrono_literals;

namespace {

Relation rel(const std::string& org, const std::string& chem) {
  return {make_entity("o:" + org, org, {}, EntityKind::organism),
          make_entity("c:" + chem, chem, {}, EntityKind::chemical), std::nullopt};
}

std::vector<GenerationInstruction> instructions(std::size_t n) {
  const PromptTemplate t("t", "Title: {{title}}\nMain findings: {{findings}}");
  std::vector<GenerationInstruction> out;
  for (std::size_t i = 0; i < n; ++i) {
    Document d;
    d.id = fmt::format("doc{}", i % 4);
    d.title = "T";
    d.abstract = std::string(40 + i, 'a');
    VerbalisedFindings f;
    f.text = fmt::format("Aspergillus niger produces emodin and cystodiones A-D (1-{}).", 4 + i);
    f.expected_relations = {rel("Aspergillus niger", "emodin"), rel("Aspergillus niger", "cystodione B")};
    f.temperature = 0.5 + 0.1 * double(i % 4);
    auto g = build_instruction(d, {}, f, t);
    g.index = i / 4;
    out.push_back(std::move(g));
  }
  return out;
}

// Fails the first `failures` calls of every prompt, tracking concurrency.
class FlakyBackend final : public GenerationBackend {
 public:
  explicit FlakyBackend(int failures) : failures_(failures) {}
  std::string generate(const GenerationRequest& r) override {
    const int now = ++active_;
    int seen = peak_.load();
    while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(2ms);
    int attempt;
    {
      std::lock_guard lock(mu_);
      attempt = calls_[r.prompt]++;
    }
    --active_;
    if (attempt < failures_) throw BackendError("transient");
    return MockBackend().generate(r);
  }
  std::string name() const override { return "flaky"; }
  int peak() const { return peak_; }

 private:
  int failures_;
  std::mutex mu_;
  std::map<std::string, int> calls_;
  std::atomic<int> active_{0}, peak_{0};
};

GeneratedCandidate cand(const std::string& seed, std::size_t idx, double cov, std::size_t len,
                        std::size_t seed_len = 100) {
  GeneratedCandidate c;
  c.seed_doc_id = seed;
  c.instruction_index = idx;
  c.mention_coverage = cov;
  c.text = std::string(len, 'x');
  c.seed_abstract_chars = seed_len;
  c.expected_relations = {rel("O", "C")};
  return c;
}

}  // namespace

TEST_CASE("mock backend echoes the findings") {
  MockBackend mock;
  const auto in = instructions(1);
  const auto text = mock.generate({in[0].prompt_text, 0.5, 512});
  CHECK(text.find(in[0].findings.text) != std::string::npos);
  CHECK(text == mock.generate({in[0].prompt_text, 0.5, 512}));
  CHECK(MockBackend(MockBackend::Mode::empty).generate({"x", 0.5, 1}).empty());
  CHECK_THROWS_AS(MockBackend(MockBackend::Mode::fail).generate({"x", 0.5, 1}), BackendError);
}

TEST_CASE("backend specs") {
  CHECK(make_backend("mock", 1s)->name() == "mock");
  CHECK(make_backend("mock:fail", 1s)->name() == "mock:fail");
  CHECK(make_backend("http://localhost:1/gen", 1s)->name() == "http:http://localhost:1/gen");
  CHECK_THROWS_AS(make_backend("ftp://x", 1s), UsageError);
  CHECK_THROWS_AS(make_backend("http://", 1s), UsageError);
  CHECK_THROWS_AS(make_backend("https://example.org/gen", 1s), UsageError);
}

TEST_CASE("generation keeps input order and full coverage with the mock") {
  const auto in = instructions(10);
  MockBackend mock;
  GenerationOptions o;
  o.parallelism = 4;
  const auto out = generate_candidates(in, mock, o);
  REQUIRE(out.size() == 10);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].seed_doc_id == in[i].doc_id);
    CHECK(out[i].instruction_index == in[i].index);
    CHECK(out[i].mention_coverage == 1.0);
    CHECK_FALSE(out[i].failed);
  }
  o.parallelism = 1;
  const auto serial = generate_candidates(in, mock, o);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(serial[i].text == out[i].text);
}

TEST_CASE("empty replies are recorded with zero coverage") {
  MockBackend empty(MockBackend::Mode::empty);
  const auto out = generate_candidates(instructions(3), empty, {});
  CHECK(out.size() == 3);
  CHECK(out[0].mention_coverage == 0.0);
  CHECK_FALSE(out[0].failed);
}

TEST_CASE("retries and bounded parallelism") {
  FlakyBackend flaky(2);
  GenerationOptions o;
  o.parallelism = 3;
  o.max_attempts = 3;
  const auto out = generate_candidates(instructions(12), flaky, o);
  for (const auto& c : out) CHECK_FALSE(c.failed);
  CHECK(flaky.peak() <= 3);

  FlakyBackend worse(5);
  o.max_attempts = 2;
  CHECK_THROWS_AS(generate_candidates(instructions(4), worse, o), BackendError);

  MockBackend fail(MockBackend::Mode::fail);
  CHECK_THROWS_AS(generate_candidates(instructions(2), fail, {}), BackendError);
  o.parallelism = 0;
  CHECK_THROWS_AS(generate_candidates(instructions(2), fail, o), UsageError);
}

TEST_CASE("partial failures are kept and excluded") {
  class Half final : public GenerationBackend {
   public:
    std::string generate(const GenerationRequest& r) override {
      if (r.prompt.find("(1-4)") != std::string::npos) throw BackendError("down");
      return MockBackend().generate(r);
    }
    std::string name() const override { return "half"; }
  } half;
  const auto out = generate_candidates(instructions(3), half, {});
  CHECK(out[0].failed);
  CHECK(out[0].error == "down");
  CHECK_FALSE(out[1].failed);
  const auto sel = select_all(out, 3, 1.0);
  for (const auto& c : sel) CHECK_FALSE(c.failed);
}

TEST_CASE("http backend against a local server") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/generate", [&](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    if (hits++ == 0) {
      res.status = 503;
      return;
    }
    res.set_content(nlohmann::json{{"text", "Echo: " + body["prompt"].get<std::string>()}}.dump(),
                    "application/json");
  });
  server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json", "text/plain");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpBackend ok(fmt::format("http://127.0.0.1:{}/generate", port), 5s);
  CHECK_THROWS_AS(ok.generate({"p", 0.5, 10}), BackendError);
  CHECK(ok.generate({"p", 0.5, 10}) == "Echo: p");

  GenerationOptions o;
  o.parallelism = 2;
  const auto out = generate_candidates(instructions(5), ok, o);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].text.starts_with("Echo: Title:"));

  HttpBackend broken(fmt::format("http://127.0.0.1:{}/broken", port), 5s);
  CHECK_THROWS_AS(broken.generate({"p", 0.5, 10}), BackendError);
  server.stop();
  t.join();
  HttpBackend closed(fmt::format("http://127.0.0.1:{}/generate", port), 500ms);
  CHECK_THROWS_AS(closed.generate({"p", 0.5, 10}), BackendError);
}

TEST_CASE("coverage counts enumeration members and both partners") {
  const std::vector<Relation> rs{rel("Aspergillus niger", "emodin"), rel("Aspergillus niger", "cystodione C"),
                                 rel("Aspergillus niger", "cystodione F"), rel("Penicillium sp", "emodin")};
  const std::string text = "Aspergillus niger produced emodin and cystodiones A-D.";
  CHECK(mention_coverage(text, rs) == 0.5);
  CHECK(mention_coverage("", rs) == 0.0);
  CHECK(mention_coverage(text, {}) == 0.0);
  std::vector<std::pair<oracle::Mentionable, oracle::Mentionable>> o;
  for (const auto& r : rs) o.push_back({{r.organism.label, {}}, {r.chemical.label, {}}});
  CHECK(oracle::coverage(text, o) == 0.5);
}

TEST_CASE("top-k selection") {
  std::vector<GeneratedCandidate> cs{cand("s", 0, 1.0, 100), cand("s", 1, 1.0, 140), cand("s", 2, 0.8, 100),
                                     cand("s", 3, 1.0, 90), cand("s", 4, 1.0, 110)};
  const auto top = select_top_k(cs, 3, 1.0);
  REQUIRE(top.size() == 3);
  CHECK(top[0].instruction_index == 0);
  CHECK(top[1].instruction_index == 3);  // deviation 10 ties with index 4, smaller index first
  CHECK(top[2].instruction_index == 4);
  for (const auto& c : top) CHECK(c.accepted);
  CHECK(select_top_k({cand("s", 0, 0.75, 10)}, 3, 1.0).empty());
  CHECK(select_top_k({cand("s", 0, 0.75, 10)}, 3, 0.75).size() == 1);
  CHECK_THROWS_AS(select_top_k(cs, 0, 1.0), UsageError);
  CHECK_THROWS_AS(select_top_k(cs, 1, 1.5), UsageError);

  std::vector<GeneratedCandidate> mixed;
  for (int i = 0; i < 6; ++i) mixed.push_back(cand(i % 2 ? "b" : "a", std::size_t(i), 1.0, 100));
  mixed.push_back(cand("c", 0, 0.0, 100));
  const auto all = select_all(mixed, 2, 1.0);
  CHECK(all.size() == 4);
  CHECK(all[0].seed_doc_id == "a");
  CHECK(all[2].seed_doc_id == "b");
}

TEST_CASE("dataset split by seed") {
  std::vector<GeneratedCandidate> cs;
  for (int s = 0; s < 10; ++s) {
    for (std::size_t j = 0; j < 3; ++j) cs.push_back(cand(fmt::format("s{}", s), j, 1.0, 50));
  }
  const auto d = assemble_dataset(cs, 0.9, 13);
  CHECK(d.train.size() == 27);
  CHECK(d.valid.size() == 3);
  std::set<std::string> train, valid;
  for (const auto& e : d.train) train.insert(e.seed_doc_id);
  for (const auto& e : d.valid) valid.insert(e.seed_doc_id);
  CHECK(valid.size() == 1);
  for (const auto& v : valid) CHECK_FALSE(train.contains(v));
  CHECK(d.train[0].output == "O produces C");
  const auto again = assemble_dataset(cs, 0.9, 13);
  CHECK(again.valid[0].seed_doc_id == d.valid[0].seed_doc_id);
  CHECK_THROWS_AS(assemble_dataset(cs, 1.0, 1), UsageError);

  std::stringstream s;
  write_examples_jsonl(d.valid, s);
  const auto j = nlohmann::json::parse(s.str().substr(0, s.str().find('\n')));
  CHECK(j["provenance"]["seed_doc_id"] == d.valid[0].seed_doc_id);
  CHECK(j["split"] == "valid");
}

TEST_CASE("candidate JSONL round trip") {
  auto c = cand("s", 2, 0.5, 10);
  c.applied = {"shuffle"};
  c.temperature = 0.7;
  auto f = cand("s", 3, 0.0, 0);
  f.failed = true;
  f.error = "down";
  std::stringstream s;
  write_candidates_jsonl({c, f}, s);
  const auto back = read_candidates_jsonl(s);
  REQUIRE(back.size() == 2);
  CHECK(back[0].text == c.text);
  CHECK(back[0].expected_relations == c.expected_relations);
  CHECK(back[0].applied == c.applied);
  CHECK(back[1].failed);
  CHECK(back[1].error == "down");
}
