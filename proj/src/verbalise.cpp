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

#include "divsample/verbalise.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "divsample/error.hpp"
#include "divsample/mention.hpp"
#include "divsample/rng.hpp"
#include "divsample/text.hpp"

namespace divsample {

using nlohmann::json;

void TransformationConfig::validate() const {
  const std::pair<std::string_view, double> probs[] = {{"p_class_replace", p_class_replace},
                                                       {"p_contract", p_contract},
                                                       {"p_shuffle", p_shuffle},
                                                       {"p_number", p_number},
                                                       {"p_direction", p_direction}};
  for (const auto& [name, p] : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw UsageError(fmt::format("{} must lie in [0, 1], got {}", name, p));
    }
  }
  if (temperatures.empty()) throw UsageError("at least one temperature is required");
  for (const double t : temperatures) {
    if (!(t >= 0.0)) throw UsageError(fmt::format("invalid temperature {}", t));
  }
}

std::string_view to_string(Direction d) {
  return d == Direction::produces ? "produces" : "isolated_from";
}

ClassMap class_map_from(const std::vector<Relation>& relations) {
  ClassMap out;
  for (const auto& r : relations) {
    if (r.chemical_class && !text::trim(*r.chemical_class).empty()) {
      out.emplace(r.chemical.id, std::string(text::trim(*r.chemical_class)));
    }
  }
  return out;
}

std::string class_label(std::string_view class_name) {
  std::string out(text::trim(class_name));
  if (!out.empty() && out.back() != 's') out += 's';
  return out;
}

std::string class_phrase(std::size_t count, std::string_view class_name) {
  static constexpr std::string_view kWords[] = {"zero", "one", "two",   "three", "four", "five",
                                                "six",  "seven", "eight", "nine",  "ten"};
  const std::string number =
      count < std::size(kWords) ? std::string(kWords[count]) : std::to_string(count);
  return number + " " + class_label(class_name);
}

namespace {

enum class UnitKind { single, contracted, class_group };

struct Unit {
  UnitKind kind = UnitKind::single;
  std::string surface;
  std::vector<Relation> expected;
  std::size_t count = 1;  // chemicals covered, for numbering
};

std::string join_units(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += i + 1 == parts.size() ? " and " : ", ";
    out += parts[i];
  }
  return out;
}

struct GroupPlan {
  const Entity* organism = nullptr;
  std::vector<const Relation*> relations;
};

std::vector<GroupPlan> group_by_organism(const std::vector<Relation>& relations) {
  std::vector<GroupPlan> groups;
  for (const auto& r : relations) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const GroupPlan& g) { return g.organism->id == r.organism.id; });
    if (it == groups.end()) {
      groups.push_back({&r.organism, {}});
      it = std::prev(groups.end());
    }
    it->relations.push_back(&r);
  }
  return groups;
}

// Keys in first-appearance order with their member positions.
template <typename KeyOf>
std::vector<std::pair<std::string, std::vector<std::size_t>>> collect(
    const std::vector<const Relation*>& rs, KeyOf&& key_of) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto key = key_of(*rs[i]);
    if (!key) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == *key; });
    if (it == out.end()) {
      out.emplace_back(*key, std::vector<std::size_t>{});
      it = std::prev(out.end());
    }
    it->second.push_back(i);
  }
  return out;
}

std::vector<Unit> plan_units(const GroupPlan& group, const ClassMap& class_map,
                             const TransformationConfig& cfg, Rng& rng,
                             std::set<std::string>& applied) {
  const auto& rs = group.relations;
  const std::size_t n = rs.size();
  // owner[i]: index of the unit that absorbs relation i, or npos if single.
  constexpr auto npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> class_owner(n, npos);
  std::vector<std::size_t> stem_owner(n, npos);

  const auto classes = collect(rs, [&](const Relation& r) -> std::optional<std::string> {
    const auto it = class_map.find(r.chemical.id);
    if (it == class_map.end()) return std::nullopt;
    return it->second;
  });
  std::vector<std::pair<std::string, std::vector<std::size_t>>> replaced;
  for (const auto& [name, members] : classes) {
    if (members.size() < 2) continue;
    if (!bernoulli(rng, cfg.p_class_replace)) continue;
    for (const auto i : members) class_owner[i] = replaced.size();
    replaced.emplace_back(name, members);
    applied.emplace(tags::class_replace);
  }

  const auto stems = collect(rs, [&](const Relation& r) -> std::optional<std::string> {
    const auto split = split_letter_suffix(r.chemical.label);
    if (!split) return std::nullopt;
    return split->first;
  });
  std::vector<std::vector<std::size_t>> contracted;
  for (const auto& [stem, all_members] : stems) {
    std::vector<std::size_t> members;
    for (const auto i : all_members) {
      if (class_owner[i] == npos) members.push_back(i);
    }
    if (members.size() < 2) continue;
    std::vector<char> letters;
    for (const auto i : members) letters.push_back(split_letter_suffix(rs[i]->chemical.label)->second);
    std::sort(letters.begin(), letters.end());
    if (std::adjacent_find(letters.begin(), letters.end()) != letters.end()) continue;
    if (!contraction_round_trips(stem, letters)) continue;
    if (!bernoulli(rng, cfg.p_contract)) continue;
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return rs[a]->chemical.label.back() < rs[b]->chemical.label.back();
    });
    for (const auto i : members) stem_owner[i] = contracted.size();
    contracted.push_back(std::move(members));
    applied.emplace(tags::contract);
  }

  std::vector<Unit> units;
  std::vector<bool> class_emitted(replaced.size(), false);
  std::vector<bool> stem_emitted(contracted.size(), false);
  for (std::size_t i = 0; i < n; ++i) {
    if (class_owner[i] != npos) {
      const auto c = class_owner[i];
      if (class_emitted[c]) continue;
      class_emitted[c] = true;
      const auto& [name, members] = replaced[c];
      Unit u;
      u.kind = UnitKind::class_group;
      u.count = members.size();
      u.surface = class_phrase(members.size(), name);
      Relation r;
      r.organism = *group.organism;
      r.chemical = Entity{"class:" + name, class_label(name), {}, EntityKind::chemical_class};
      r.chemical_class = name;
      u.expected.push_back(std::move(r));
      units.push_back(std::move(u));
    } else if (stem_owner[i] != npos) {
      const auto s = stem_owner[i];
      if (stem_emitted[s]) continue;
      stem_emitted[s] = true;
      const auto& members = contracted[s];
      Unit u;
      u.kind = UnitKind::contracted;
      u.count = members.size();
      std::vector<char> letters;
      for (const auto m : members) {
        letters.push_back(rs[m]->chemical.label.back());
        u.expected.push_back(*rs[m]);
      }
      u.surface = contract_members(split_letter_suffix(rs[members.front()]->chemical.label)->first,
                                   letters);
      units.push_back(std::move(u));
    } else {
      Unit u;
      u.surface = rs[i]->chemical.label;
      u.expected.push_back(*rs[i]);
      units.push_back(std::move(u));
    }
  }
  return units;
}

std::string capitalize_number_word(std::string s) {
  if (!s.empty() && s.front() >= 'a' && s.front() <= 'z') s.front() = static_cast<char>(s.front() - 'a' + 'A');
  return s;
}

std::string end_sentence(std::string s) {
  if (s.empty() || s.back() != '.') s += '.';
  return s;
}

}  // namespace

VerbalisedFindings verbalise_findings(const std::vector<Relation>& relations,
                                      const ClassMap& class_map, const TransformationConfig& cfg) {
  cfg.validate();
  if (relations.empty()) throw DataError("cannot verbalise an empty list of relations");
  for (const auto& r : relations) validate_relation(r);

  Rng rng(cfg.rng_seed);
  VerbalisedFindings out;
  std::vector<Relation> ordered = relations;
  if (bernoulli(rng, cfg.p_shuffle)) {
    shuffle(ordered, rng);
    out.applied.emplace(tags::shuffle);
  }

  struct Clause {
    const Entity* organism;
    std::vector<Unit> units;
    bool numbered;
  };
  std::vector<Clause> clauses;
  for (const auto& group : group_by_organism(ordered)) {
    auto units = plan_units(group, class_map, cfg, rng, out.applied);
    const bool numbered = bernoulli(rng, cfg.p_number);
    clauses.push_back({group.organism, std::move(units), numbered});
  }
  const bool flipped = bernoulli(rng, cfg.p_direction);
  out.direction = flipped ? Direction::isolated_from : Direction::produces;
  if (flipped) out.applied.emplace(tags::direction);
  out.temperature = cfg.temperatures[uniform_below(rng, cfg.temperatures.size())];

  std::size_t next_number = 1;
  std::vector<std::string> sentences;
  for (const auto& clause : clauses) {
    std::vector<std::string> parts;
    std::size_t covered = 0;
    for (const auto& u : clause.units) {
      std::string part = u.surface;
      if (clause.numbered) {
        const auto last = next_number + u.count - 1;
        part += u.count == 1 ? fmt::format(" ({})", next_number)
                             : fmt::format(" ({}-{})", next_number, last);
        next_number = last + 1;
        out.applied.emplace(tags::number);
      }
      parts.push_back(std::move(part));
      covered += u.count;
      out.expected_relations.insert(out.expected_relations.end(), u.expected.begin(),
                                    u.expected.end());
    }
    const std::string list = join_units(parts);
    if (out.direction == Direction::produces) {
      sentences.push_back(end_sentence(fmt::format("{} produces {}", clause.organism->label, list)));
    } else {
      const bool plural = covered > 1;
      std::string subject = list;
      if (clause.units.front().kind == UnitKind::class_group) subject = capitalize_number_word(subject);
      sentences.push_back(end_sentence(fmt::format("{} {} isolated from {}", subject,
                                                   plural ? "were" : "was", clause.organism->label)));
    }
  }
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out.text += ' ';
    out.text += sentences[i];
  }
  return out;
}

std::set<std::string> build_exclusion_list(const Document& doc,
                                           const std::vector<std::string>& annotations,
                                           const SynonymTable& synonyms) {
  std::set<std::string> out;
  auto add = [&](std::string_view s) {
    auto key = text::fold_key(s);
    if (!key.empty()) out.insert(std::move(key));
  };
  auto add_entity = [&](const Entity& e) {
    add(e.label);
    for (const auto& s : e.synonyms) add(s);
    if (const auto it = synonyms.find(e.id); it != synonyms.end()) {
      for (const auto& s : it->second) add(s);
    }
  };
  for (const auto& r : doc.relations) {
    add_entity(r.organism);
    add_entity(r.chemical);
  }
  for (const auto& a : annotations) add(a);
  return out;
}

std::vector<std::string> filter_keywords(const std::vector<std::string>& candidates,
                                         const std::set<std::string>& exclusion) {
  std::vector<std::string> out;
  for (const auto& c : candidates) {
    const auto key = text::fold_key(c);
    if (key.empty()) continue;
    const bool excluded = std::any_of(exclusion.begin(), exclusion.end(), [&](const std::string& e) {
      return key == e || text::contains(key, e) || text::contains(e, key);
    });
    if (!excluded) out.push_back(c);
  }
  return out;
}

GenerationInstruction build_instruction(const Document& doc, std::vector<std::string> keywords,
                                        VerbalisedFindings findings,
                                        const PromptTemplate& prompt) {
  if (keywords.size() > kMaxKeywords) keywords.resize(kMaxKeywords);
  GenerationInstruction g;
  g.doc_id = doc.id;
  g.title = doc.title;
  g.keywords = std::move(keywords);
  g.findings = std::move(findings);
  g.template_id = prompt.id();
  g.seed_abstract_chars = doc.abstract ? text::scalar_count(*doc.abstract) : 0;
  std::string kw;
  for (const auto& k : g.keywords) kw += (kw.empty() ? "" : ", ") + k;
  g.prompt_text = prompt.render({{"title", g.title}, {"keywords", kw}, {"findings", g.findings.text}});
  return g;
}

std::vector<GenerationInstruction> sample_instructions(const Document& doc,
                                                       const std::vector<std::string>& keywords,
                                                       const TransformationConfig& cfg,
                                                       const PromptTemplate& prompt,
                                                       const InstructionSampling& sampling) {
  const auto relations = dedup_relations(doc.relations);
  const auto classes = class_map_from(relations);
  std::vector<GenerationInstruction> out;
  std::set<std::pair<std::string, double>> seen;
  const std::size_t attempts = sampling.m * std::max<std::size_t>(1, sampling.attempts_per_instruction);
  for (std::size_t a = 0; a < attempts && out.size() < sampling.m; ++a) {
    TransformationConfig draw = cfg;
    draw.rng_seed = derive_seed(cfg.rng_seed, doc.id, a);
    auto findings = verbalise_findings(relations, classes, draw);
    if (!seen.emplace(findings.text, findings.temperature).second) continue;
    auto g = build_instruction(doc, keywords, std::move(findings), prompt);
    g.index = out.size();
    out.push_back(std::move(g));
  }
  return out;
}

json to_json(const VerbalisedFindings& f) {
  json rels = json::array();
  for (const auto& r : f.expected_relations) rels.push_back(to_json(r));
  return json{{"text", f.text},
              {"expected_relations", std::move(rels)},
              {"applied", f.applied},
              {"direction", to_string(f.direction)},
              {"temperature", f.temperature}};
}

json to_json(const GenerationInstruction& g) {
  auto j = to_json(g.findings);
  j["findings"] = j["text"];
  j.erase("text");
  j["doc_id"] = g.doc_id;
  j["index"] = g.index;
  j["title"] = g.title;
  j["keywords"] = g.keywords;
  j["template"] = g.template_id;
  j["prompt_text"] = g.prompt_text;
  j["seed_abstract_chars"] = g.seed_abstract_chars;
  return j;
}

GenerationInstruction instruction_from_json(const json& j) {
  GenerationInstruction g;
  g.doc_id = j.at("doc_id").get<std::string>();
  g.index = j.value("index", std::size_t{0});
  g.title = j.value("title", std::string{});
  g.keywords = j.value("keywords", std::vector<std::string>{});
  g.template_id = j.value("template", std::string{});
  g.prompt_text = j.at("prompt_text").get<std::string>();
  g.seed_abstract_chars = j.value("seed_abstract_chars", std::size_t{0});
  auto& f = g.findings;
  f.text = j.value("findings", std::string{});
  for (const auto& r : j.at("expected_relations")) f.expected_relations.push_back(relation_from_json(r));
  f.applied = j.value("applied", std::set<std::string>{});
  const auto dir = j.value("direction", std::string("produces"));
  if (dir == "produces") {
    f.direction = Direction::produces;
  } else if (dir == "isolated_from") {
    f.direction = Direction::isolated_from;
  } else {
    throw DataError(fmt::format("unknown direction '{}'", dir));
  }
  f.temperature = j.at("temperature").get<double>();
  return g;
}

void write_instructions_jsonl(const std::vector<GenerationInstruction>& items, std::ostream& out) {
  for (const auto& g : items) out << to_json(g).dump() << '\n';
}

std::vector<GenerationInstruction> read_instructions_jsonl(std::istream& in) {
  std::vector<GenerationInstruction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(instruction_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw DataError(fmt::format("line {}: invalid instruction: {}", line_no, e.what()));
    } catch (const DataError& e) {
      throw DataError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return out;
}

std::map<std::string, std::vector<std::string>> read_doc_lists_jsonl(std::istream& in,
                                                                     std::string_view field) {
  std::map<std::string, std::vector<std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      const auto& list = j.at(std::string(field));
      if (!list.is_array()) {
        throw DataError(fmt::format("line {}: field '{}' must be an array", line_no, field));
      }
      auto& items = out[j.at("doc_id").get<std::string>()];
      for (const auto& item : list) {
        items.push_back(item.is_string() ? item.get<std::string>() : item.at("text").get<std::string>());
      }
    } catch (const json::exception& e) {
      throw DataError(fmt::format("line {}: invalid '{}' entry: {}", line_no, field, e.what()));
    }
  }
  return out;
}

}  // namespace divsample
