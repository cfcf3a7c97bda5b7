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

#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>
#include <fmt/format.h>

#include "divsample/error.hpp"
#include "divsample/score.hpp"
#include "oracles.hpp"

using namespace divsample;

namespace {

Relation rel(const std::string& org, const std::string& chem) {
  return {make_entity("o", org, {}, EntityKind::organism), make_entity("c", chem, {}, EntityKind::chemical),
          std::nullopt};
}

std::vector<PredictedDocument> fixture_predictions() {
  std::ifstream in(std::string(DIVSAMPLE_FIXTURE_DIR) + "/eval_pred.jsonl");
  return read_predictions_jsonl(in);
}

std::vector<GoldDocument> fixture_gold() { return load_gold(std::string(DIVSAMPLE_FIXTURE_DIR) + "/eval_gold.json"); }

std::vector<PredictedDocument> as_predictions(const std::vector<GoldDocument>& gold) {
  std::vector<PredictedDocument> out;
  for (const auto& g : gold) {
    PredictedDocument p{g.doc_id, {}, 0};
    for (const auto& r : g.relations) p.pairs.insert({r.organism, r.chemical});
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST_CASE("linearisation") {
  CHECK(linearise({rel("Gloeophyllum abietinum", "gloeophyllin A"), rel("Gloeophyllum abietinum", "gloeophyllin B")}) ==
        "Gloeophyllum abietinum produces gloeophyllin A; Gloeophyllum abietinum produces gloeophyllin B");
  CHECK(linearise({}).empty());
  CHECK(linearise({rel("A", "x")}) == "A produces x");
  CHECK_THROWS_AS(linearise({rel("A", "x;y")}), DataError);
}

TEST_CASE("parsing") {
  const auto p = parse_output("A produces x; garbage; A produces x");
  CHECK(p.pairs == std::set<RelationPair>{{"A", "x"}});
  CHECK(p.malformed == 1);
  CHECK(parse_output("A produces B produces C").pairs == std::set<RelationPair>{{"A", "B produces C"}});
  CHECK(parse_output("  A  produces  x ;").pairs.size() == 1);
  CHECK(parse_output("").pairs.empty());
  CHECK(parse_output(" produces x").malformed == 1);
}

TEST_CASE("parse inverts linearise") {
  std::mt19937_64 rng(5);
  const std::string alphabet = "abcdefgh ABC-()'0123456789";
  auto word = [&] {
    std::string s(1, 'a' + char(rng() % 26));
    const auto n = rng() % 12;
    for (std::size_t i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
    return s + char('a' + rng() % 26);
  };
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Relation> rs;
    std::set<RelationPair> expected;
    const auto n = rng() % 8;
    for (std::size_t i = 0; i < n; ++i) {
      const auto o = word(), c = word();
      if (o.find(" produces ") != std::string::npos || c.find(" produces ") != std::string::npos) continue;
      rs.push_back(rel(o, c));
      expected.insert({o, c});
      if (rng() % 4 == 0) rs.push_back(rs.back());
    }
    const auto p = parse_output(linearise(rs));
    CHECK(p.malformed == 0);
    CHECK(p.pairs == expected);
  }
}

TEST_CASE("hand-enumerated three document fixture") {
  const auto gold = fixture_gold();
  const auto pred = fixture_predictions();
  REQUIRE(gold.size() == 3);
  REQUIRE(pred.size() == 2);

  // exact: d1 0/3/2, d2 0/0/1, d3 1/1/2.
  const auto exact = score(gold, pred, {Matching::exact, false});
  CHECK(exact.micro == Counts{1, 4, 5});
  CHECK(std::abs(exact.micro.precision() - 1.0 / 5) < 1e-9);
  CHECK(std::abs(exact.micro.recall() - 1.0 / 6) < 1e-9);
  CHECK(std::abs(exact.micro.f1() - 2.0 / 11) < 1e-9);
  // casefold: d1 2/1/0, d2 0/0/1, d3 2/0/1.
  const auto fold = score(gold, pred, {Matching::casefold, false});
  CHECK(fold.micro == Counts{4, 1, 2});
  CHECK(std::abs(fold.micro.precision() - 4.0 / 5) < 1e-9);
  CHECK(std::abs(fold.micro.recall() - 2.0 / 3) < 1e-9);
  CHECK(std::abs(fold.micro.f1() - 8.0 / 11) < 1e-9);

  CHECK(fold.per_document[1].doc_id == "d2");
  CHECK_FALSE(fold.per_document[1].predicted);
  Counts sum;
  for (const auto& d : fold.per_document) sum += d.counts;
  CHECK(sum == fold.micro);

  // Independent recount.
  std::vector<std::set<std::pair<std::string, std::string>>> g(3), p(3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (const auto& r : gold[i].relations) g[i].emplace(r.organism, r.chemical);
  }
  for (const auto& d : pred) {
    const std::size_t i = d.doc_id == "d1" ? 0 : 2;
    for (const auto& r : d.pairs) p[i].emplace(r.organism, r.chemical);
  }
  const auto o = oracle::micro(g, p);
  CHECK(std::abs(o.p - exact.micro.precision()) < 1e-12);
  CHECK(std::abs(o.f - exact.micro.f1()) < 1e-12);
}

TEST_CASE("small cases") {
  const std::vector<GoldDocument> gold{{"a", {{"A", "x", false}, {"A", "y", false}}}};
  const std::vector<PredictedDocument> pred{{"a", {{"A", "x"}, {"A", "z"}}, 0}};
  const auto r = score(gold, pred);
  CHECK(r.micro.precision() == 0.5);
  CHECK(r.micro.recall() == 0.5);
  CHECK(r.micro.f1() == 0.5);
  CHECK(Counts{}.precision() == 0.0);
  CHECK(Counts{}.f1() == 0.0);
}

TEST_CASE("identity and role swap") {
  const auto gold = fixture_gold();
  const auto self = score(gold, as_predictions(gold));
  CHECK(self.micro.precision() == 1.0);
  CHECK(self.micro.recall() == 1.0);
  CHECK(self.micro.f1() == 1.0);

  const auto pred = fixture_predictions();
  std::vector<GoldDocument> swapped_gold;
  for (const auto& p : pred) {
    GoldDocument g{p.doc_id, {}};
    for (const auto& r : p.pairs) g.relations.push_back({r.organism, r.chemical, false});
    swapped_gold.push_back(std::move(g));
  }
  std::vector<PredictedDocument> swapped_pred;
  for (const auto& p : as_predictions(gold)) {
    if (p.doc_id != "d2") swapped_pred.push_back(p);
  }
  std::vector<GoldDocument> reduced;
  for (const auto& g : gold) {
    if (g.doc_id != "d2") reduced.push_back(g);
  }
  const auto forward = score(reduced, pred, {Matching::exact, false});
  const auto back = score(swapped_gold, swapped_pred, {Matching::exact, false});
  CHECK(forward.micro.precision() == back.micro.recall());
  CHECK(forward.micro.recall() == back.micro.precision());
}

TEST_CASE("scoring errors and class handling") {
  const std::vector<GoldDocument> dup{{"a", {}}, {"a", {}}};
  CHECK_THROWS_AS(score(dup, {}), DataError);
  const std::vector<GoldDocument> gold{{"a", {{"A", "x", false}, {"A", "Coumarins", true}}}};
  CHECK_THROWS_AS(score(gold, {{"b", {}, 0}}), DataError);
  CHECK_THROWS_AS(score(gold, {{"a", {}, 0}, {"a", {}, 0}}), DataError);
  const std::vector<PredictedDocument> pred{{"a", {{"A", "x"}}, 0}};
  CHECK(score(gold, pred, {Matching::casefold, false}).micro == Counts{1, 0, 1});
  CHECK(score(gold, pred, {Matching::casefold, true}).micro == Counts{1, 0, 0});
  CHECK(matching_from_string("exact") == Matching::exact);
  CHECK_THROWS_AS(matching_from_string("fuzzy"), UsageError);
}

TEST_CASE("keyword precision") {
  std::map<std::string, std::vector<std::string>> pred{
      {"d", {"a", "b", "c", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "late"}}};
  std::map<std::string, std::vector<std::string>> gold{{"d", {"A ", "b", "c", "late"}}};
  CHECK(std::abs(keyword_precision(pred, gold, 10) - 0.3) < 1e-12);
  std::map<std::string, std::vector<std::string>> few{{"d", {"a", "b"}}};
  CHECK(keyword_precision(few, gold, 10) == 1.0);
  CHECK_THROWS_AS(keyword_precision(pred, gold, 0), UsageError);
}

TEST_CASE("report JSON and loaders") {
  const auto r = score(fixture_gold(), fixture_predictions(), {Matching::exact, false});
  const auto j = to_json(r);
  CHECK(j["true_positives"] == 1);
  CHECK(j["per_document"].size() == 3);
  CHECK_FALSE(to_json(r, false).contains("per_document"));
  const auto alt = gold_from_json(nlohmann::json::parse(
      R"({"7730162": {"relations": [{"subject": "Lachnum papyraceum", "object": {"name": "scoparone"}, "extra": 1}]}})"));
  REQUIRE(alt.size() == 1);
  CHECK(alt[0].doc_id == "7730162");
  CHECK(alt[0].relations[0].chemical == "scoparone");
  CHECK_THROWS_AS(gold_from_json(nlohmann::json::parse("3")), DataError);
  std::istringstream bad(R"({"doc_id": "a"})");
  CHECK_THROWS_AS(read_predictions_jsonl(bad), DataError);
}
