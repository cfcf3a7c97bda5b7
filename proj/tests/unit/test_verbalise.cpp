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

#include <random>
#include <set>
#include <sstream>

#include <doctest.h>
#include <fmt/format.h>

#include "divsample/error.hpp"
#include "divsample/mention.hpp"
#include "divsample/templates.hpp"
#include "divsample/verbalise.hpp"

using namespace divsample;

namespace {

Relation rel(const std::string& org, const std::string& chem, std::optional<std::string> cls = std::nullopt) {
  return {make_entity("o:" + org, org, {}, EntityKind::organism),
          make_entity("c:" + chem, chem, {}, EntityKind::chemical), std::move(cls)};
}

TransformationConfig all_off() {
  TransformationConfig c;
  c.p_class_replace = c.p_contract = c.p_shuffle = c.p_number = c.p_direction = 0.0;
  return c;
}

std::vector<Relation> random_relations(std::mt19937_64& rng) {
  static const std::vector<std::string> orgs{"Gloeophyllum abietinum", "Cytospora sp.", "Aspergillus niger"};
  static const std::vector<std::string> stems{"cystodione", "gloeophyllin", "wortmannin"};
  static const std::vector<std::string> plain{"scoparone", "emodin", "6-methoxymellein", "citrinin", "patulin"};
  static const std::vector<std::string> classes{"Meroterpenoid", "Coumarin", "Polyketides"};
  std::vector<Relation> out;
  std::set<std::string> used;
  const std::size_t n = 1 + rng() % 9;
  while (out.size() < n) {
    const auto& org = orgs[rng() % (1 + rng() % orgs.size())];
    std::string chem;
    if (rng() % 2 == 0) {
      chem = fmt::format("{} {}", stems[rng() % stems.size()], char('A' + rng() % 8));
    } else {
      chem = plain[rng() % plain.size()];
    }
    if (!used.insert(chem).second) continue;
    std::optional<std::string> cls;
    if (rng() % 2 == 0) cls = classes[rng() % classes.size()];
    out.push_back(rel(org, chem, cls));
  }
  return out;
}

// First byte offset at or after `from` where the chemical of r is
// mentioned, directly or as an enumeration member.
std::optional<std::size_t> chemical_position(const std::string& text, const Relation& r, std::size_t from) {
  const auto tail = std::string_view(text).substr(from);
  std::optional<std::size_t> best;
  if (const auto s = find_mention(tail, r.chemical.label)) best = from + s->begin;
  for (const auto& p : detect_enumerations(tail)) {
    for (const auto& m : p.members) {
      if (m == r.chemical.label && (!best || from + p.span.begin < *best)) best = from + p.span.begin;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("identity configuration") {
  const std::vector<Relation> rs{rel("Gloeophyllum abietinum", "gloeophyllin A"),
                                 rel("Gloeophyllum abietinum", "gloeophyllin B"),
                                 rel("Gloeophyllum abietinum", "gloeophyllin C")};
  const auto f = verbalise_findings(rs, {}, all_off());
  CHECK(f.text == "Gloeophyllum abietinum produces gloeophyllin A, gloeophyllin B and gloeophyllin C.");
  CHECK(f.direction == Direction::produces);
  CHECK(f.expected_relations == rs);
  CHECK(f.applied.empty());
  CHECK(std::set<double>{0.5, 0.6, 0.7, 0.8}.contains(f.temperature));
}

TEST_CASE("contraction changes text only") {
  std::vector<Relation> rs;
  for (char c = 'A'; c <= 'D'; ++c) rs.push_back(rel("Cystodermella sp", fmt::format("cystodione {}", c)));
  auto cfg = all_off();
  cfg.p_contract = 1.0;
  const auto f = verbalise_findings(rs, {}, cfg);
  CHECK(f.text.find("cystodiones A-D") != std::string::npos);
  CHECK(f.expected_relations == rs);
  CHECK(f.applied.contains(std::string(tags::contract)));
}

TEST_CASE("class replacement keeps one class relation") {
  std::vector<Relation> rs;
  for (const char* c : {"a1", "a2", "a3", "a4", "a5"}) rs.push_back(rel("Penicillium sp", c, "Meroterpenoid"));
  rs.push_back(rel("Penicillium sp", "emodin"));
  auto cfg = all_off();
  cfg.p_class_replace = 1.0;
  const auto f = verbalise_findings(rs, class_map_from(rs), cfg);
  CHECK(f.text.find("five Meroterpenoids") != std::string::npos);
  REQUIRE(f.expected_relations.size() == 2);
  CHECK(f.expected_relations[0].chemical.label == "Meroterpenoids");
  CHECK(f.expected_relations[0].chemical.kind == EntityKind::chemical_class);
  CHECK(f.expected_relations[1].chemical.label == "emodin");
  // Without class annotations the transformation is skipped.
  const auto g = verbalise_findings(rs, {}, cfg);
  CHECK(g.expected_relations.size() == 6);
  CHECK_FALSE(g.applied.contains(std::string(tags::class_replace)));
}

TEST_CASE("direction and numbering") {
  const std::vector<Relation> rs{rel("Cytospora sp.", "cytosporin A"), rel("Cytospora sp.", "cytosporin B")};
  auto cfg = all_off();
  cfg.p_direction = 1.0;
  cfg.p_number = 1.0;
  const auto f = verbalise_findings(rs, {}, cfg);
  CHECK(f.direction == Direction::isolated_from);
  CHECK(f.text.find("isolated from Cytospora sp.") != std::string::npos);
  CHECK(f.text.find("..") == std::string::npos);
  CHECK(f.text.find("(1)") != std::string::npos);
  CHECK(f.text.find("(2)") != std::string::npos);
  CHECK(f.applied.contains(std::string(tags::direction)));
  CHECK(f.applied.contains(std::string(tags::number)));
}

TEST_CASE("empty input and invalid config") {
  CHECK_THROWS_AS(verbalise_findings({}, {}, TransformationConfig{}), DataError);
  TransformationConfig c;
  c.p_shuffle = 1.5;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = {};
  c.temperatures.clear();
  CHECK_THROWS_AS(c.validate(), UsageError);
}

TEST_CASE("verbaliser invariants on random inputs") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto rs = random_relations(rng);
    TransformationConfig cfg;
    cfg.p_class_replace = 0.5;
    cfg.rng_seed = rng();
    const auto cm = class_map_from(rs);
    const auto f = verbalise_findings(rs, cm, cfg);
    CAPTURE(f.text);

    CHECK(f == verbalise_findings(rs, cm, cfg));

    // Label soundness and mention order.
    std::size_t last = 0;
    for (const auto& r : f.expected_relations) {
      CHECK(find_mention(f.text, r.organism.label).has_value());
      const auto pos = chemical_position(f.text, r, last);
      REQUIRE(pos.has_value());
      CHECK(*pos >= last);
      last = *pos;
    }

    // Conservation: replaced groups collapse into one class relation each.
    std::map<std::pair<std::string, std::string>, std::size_t> replaced;
    std::set<std::string> expected_ids;
    for (const auto& r : f.expected_relations) {
      if (r.chemical.kind == EntityKind::chemical_class) {
        replaced[{r.organism.id, r.chemical.id}] = 0;
      } else {
        expected_ids.insert(r.organism.id + "|" + r.chemical.id);
      }
    }
    std::size_t absorbed = 0;
    for (const auto& r : rs) {
      if (expected_ids.contains(r.organism.id + "|" + r.chemical.id)) continue;
      REQUIRE(r.chemical_class.has_value());
      const auto key = std::make_pair(r.organism.id, "class:" + *r.chemical_class);
      REQUIRE(replaced.contains(key));
      ++replaced[key];
      ++absorbed;
    }
    std::size_t collapse = 0;
    for (const auto& [k, n] : replaced) {
      CHECK(n >= 2);
      collapse += n - 1;
    }
    CHECK(rs.size() == f.expected_relations.size() + collapse);
    CHECK(absorbed == collapse + replaced.size());
  }
}

TEST_CASE("class phrases") {
  CHECK(class_phrase(5, "Meroterpenoid") == "five Meroterpenoids");
  CHECK(class_phrase(12, "Polyketides") == "12 Polyketides");
  CHECK(class_label("Coumarin") == "Coumarins");
}

TEST_CASE("keyword exclusion") {
  Document d;
  d.id = "d";
  d.relations = {rel("Isaria sinclairii", "myriocin")};
  d.relations[0].organism.synonyms = {"Cordyceps sinclairii"};
  const SynonymTable syn{{"c:myriocin", {"ISP-I"}}};
  const auto ex = build_exclusion_list(d, {"isp-i", "thermozymocidin"}, syn);
  CHECK(ex == std::set<std::string>{"isaria sinclairii", "cordyceps sinclairii", "myriocin", "isp-i",
                                    "thermozymocidin"});
  CHECK(build_exclusion_list(d, {}, {}).size() == 3);
  CHECK(filter_keywords({"antimicrobial activity", "Isaria sinclairii"}, ex) ==
        std::vector<std::string>{"antimicrobial activity"});
  CHECK(filter_keywords({"b", "a"}, {}) == std::vector<std::string>{"b", "a"});
  CHECK(filter_keywords({"sinclairii", "immunosuppressant", "Myriocin analogues"}, ex) ==
        std::vector<std::string>{"immunosuppressant"});
}

TEST_CASE("instructions") {
  Document d;
  d.id = "42";
  d.title = "On {{findings}} in fungi";
  d.abstract = "An abstract of some length.";
  d.relations = {rel("Aspergillus niger", "emodin"), rel("Aspergillus niger", "citrinin"),
                 rel("Aspergillus niger", "patulin")};
  const auto lib = TemplateLibrary::load(DIVSAMPLE_TEMPLATE_DIR);
  const auto& t = lib.get("abstract_v1");
  const auto f = verbalise_findings(d.relations, {}, all_off());
  std::vector<std::string> many(15, "kw");
  const auto g = build_instruction(d, many, f, t);
  CHECK(g.keywords.size() == kMaxKeywords);
  CHECK(g.prompt_text.find("On {{findings}} in fungi") != std::string::npos);
  CHECK(g.prompt_text.find(f.text) != std::string::npos);
  CHECK(g.prompt_text == build_instruction(d, many, f, t).prompt_text);
  CHECK(g.seed_abstract_chars == d.abstract->size());

  TransformationConfig cfg;
  cfg.rng_seed = 9;
  const auto all = sample_instructions(d, {"antifungal"}, cfg, t, {10, 20});
  CHECK(all.size() == 10);
  std::set<std::pair<std::string, double>> distinct;
  for (const auto& i : all) distinct.emplace(i.findings.text, i.findings.temperature);
  CHECK(distinct.size() == 10);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].index == i);

  std::stringstream s;
  write_instructions_jsonl(all, s);
  const auto back = read_instructions_jsonl(s);
  REQUIRE(back.size() == all.size());
  CHECK(back[3].findings == all[3].findings);
  CHECK(back[3].prompt_text == all[3].prompt_text);
  CHECK(back[3].keywords == all[3].keywords);
}

TEST_CASE("document lists") {
  std::istringstream in(R"({"doc_id":"a","keywords":["x","y"]})"
                        "\n\n"
                        R"({"doc_id":"b","keywords":[]})");
  const auto m = read_doc_lists_jsonl(in, "keywords");
  CHECK(m.at("a") == std::vector<std::string>{"x", "y"});
  CHECK(m.at("b").empty());
  std::istringstream bad(R"({"doc_id":"a","keywords":"x"})");
  CHECK_THROWS_AS(read_doc_lists_jsonl(bad, "keywords"), DataError);
}
