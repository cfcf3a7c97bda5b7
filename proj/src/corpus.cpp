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

#include "divsample/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "divsample/error.hpp"
#include "divsample/text.hpp"

namespace divsample {

using nlohmann::json;

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::organism:
      return "organism";
    case EntityKind::chemical:
      return "chemical";
    case EntityKind::chemical_class:
      return "chemical_class";
  }
  return "organism";
}

EntityKind entity_kind_from_string(std::string_view s) {
  if (s == "organism") return EntityKind::organism;
  if (s == "chemical") return EntityKind::chemical;
  if (s == "chemical_class") return EntityKind::chemical_class;
  throw DataError(fmt::format("unknown entity kind '{}'", s));
}

Entity make_entity(std::string id, std::string_view label,
                   const std::vector<std::string>& synonyms, EntityKind kind) {
  Entity e;
  e.id = std::move(id);
  e.label = std::string(text::trim(label));
  e.kind = kind;
  if (e.label.empty()) {
    throw DataError(fmt::format("entity '{}' has an empty label", e.id));
  }
  std::unordered_set<std::string> seen{e.label};
  for (const auto& raw : synonyms) {
    std::string s(text::trim(raw));
    if (s.empty() || !seen.insert(s).second) continue;
    e.synonyms.push_back(std::move(s));
  }
  return e;
}

void validate_relation(const Relation& r) {
  if (r.organism.kind != EntityKind::organism) {
    throw DataError(fmt::format("relation head '{}' is not an organism", r.organism.id));
  }
  if (r.chemical.kind == EntityKind::organism) {
    throw DataError(fmt::format("relation tail '{}' is not a chemical", r.chemical.id));
  }
}

bool Document::has_abstract() const {
  return abstract.has_value() && !text::trim(*abstract).empty();
}

Corpus Corpus::from_documents(std::vector<Document> documents) {
  Corpus c;
  c.documents = std::move(documents);
  c.reindex();
  return c;
}

void Corpus::reindex() {
  strata.clear();
  entity_index.clear();
  for (const auto& d : documents) {
    strata.insert(d.stratum);
    for (const auto& r : d.relations) {
      ++entity_index[r.organism.id];
      ++entity_index[r.chemical.id];
    }
  }
}

bool Corpus::index_consistent() const {
  Corpus recount;
  recount.documents = documents;
  recount.reindex();
  return recount.strata == strata && recount.entity_index == entity_index;
}

std::size_t Corpus::total_relations() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.n_relations();
  return n;
}

const Document* Corpus::find(std::string_view id) const {
  for (const auto& d : documents) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

CorpusFormat corpus_format_from_string(std::string_view s) {
  if (s == "tsv") return CorpusFormat::tsv;
  if (s == "jsonl") return CorpusFormat::jsonl;
  throw UsageError(fmt::format("unknown corpus format '{}' (expected tsv or jsonl)", s));
}

std::vector<Relation> dedup_relations(std::vector<Relation> relations) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<Relation> out;
  out.reserve(relations.size());
  for (auto& r : relations) {
    if (seen.emplace(r.organism.id, r.chemical.id).second) out.push_back(std::move(r));
  }
  return out;
}

namespace {

constexpr std::string_view kTsvColumns[] = {
    "doc_id",         "title",         "abstract",          "stratum",     "organism_id",
    "organism_label", "organism_synonyms", "chemical_id", "chemical_label", "chemical_synonyms",
};
constexpr std::string_view kTsvOptionalColumn = "chemical_class";

std::vector<std::string> split_synonyms(std::string_view field) {
  if (text::trim(field).empty()) return {};
  return text::split(field, '|');
}

struct PendingDocument {
  Document doc;
  std::vector<std::string> relation_strata;
};

std::string assign_stratum(const std::vector<std::string>& strata, StratumRule rule) {
  if (rule == StratumRule::first) return strata.front();
  std::map<std::string, std::size_t> votes;
  for (const auto& s : strata) ++votes[s];
  // std::map iterates names ascending, so the first maximum wins ties.
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

}  // namespace

Corpus read_corpus_tsv(std::istream& in, const LoadOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) break;
  }
  if (line.empty()) return Corpus{};
  header = text::split(line, '\t');

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = std::string(text::trim(header[i]));
    const bool known = std::find(std::begin(kTsvColumns), std::end(kTsvColumns), name) !=
                           std::end(kTsvColumns) ||
                       name == kTsvOptionalColumn;
    if (!known) {
      throw DataError(fmt::format("line {}: unknown column '{}'", line_no, name));
    }
    if (!column.emplace(name, i).second) {
      throw DataError(fmt::format("line {}: duplicate column '{}'", line_no, name));
    }
  }
  for (const auto name : kTsvColumns) {
    if (!column.contains(std::string(name))) {
      throw DataError(fmt::format("line {}: missing required column '{}'", line_no, name));
    }
  }
  const auto class_column = column.find(std::string(kTsvOptionalColumn));

  std::vector<PendingDocument> pending;
  std::unordered_map<std::string, std::size_t> slot;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() != header.size()) {
      throw DataError(fmt::format("line {}: expected {} fields, found {}", line_no,
                                  header.size(), fields.size()));
    }
    auto field = [&](std::string_view name) -> std::string_view {
      return fields[column.at(std::string(name))];
    };
    auto required = [&](std::string_view name) {
      const auto value = text::trim(field(name));
      if (value.empty()) {
        throw DataError(fmt::format("line {}: field '{}' is empty", line_no, name));
      }
      return std::string(value);
    };

    const auto doc_id = required("doc_id");
    const auto stratum = required("stratum");
    Relation r;
    r.organism = make_entity(required("organism_id"), required("organism_label"),
                             split_synonyms(field("organism_synonyms")), EntityKind::organism);
    r.chemical = make_entity(required("chemical_id"), required("chemical_label"),
                             split_synonyms(field("chemical_synonyms")), EntityKind::chemical);
    if (class_column != column.end()) {
      const auto cls = text::trim(fields[class_column->second]);
      if (!cls.empty()) r.chemical_class = std::string(cls);
    }

    auto [it, inserted] = slot.emplace(doc_id, pending.size());
    if (inserted) {
      PendingDocument p;
      p.doc.id = doc_id;
      p.doc.title = std::string(text::trim(field("title")));
      const auto abstract = text::trim(field("abstract"));
      if (!abstract.empty()) p.doc.abstract = std::string(abstract);
      pending.push_back(std::move(p));
    }
    auto& p = pending[it->second];
    const bool duplicate =
        std::any_of(p.doc.relations.begin(), p.doc.relations.end(), [&](const Relation& x) {
          return x.organism.id == r.organism.id && x.chemical.id == r.chemical.id;
        });
    if (duplicate) continue;
    p.doc.relations.push_back(std::move(r));
    p.relation_strata.push_back(stratum);
  }

  std::vector<Document> docs;
  docs.reserve(pending.size());
  for (auto& p : pending) {
    p.doc.stratum = assign_stratum(p.relation_strata, options.stratum_rule);
    p.doc.reported_relations = p.doc.relations.size();
    docs.push_back(std::move(p.doc));
  }
  return Corpus::from_documents(std::move(docs));
}

json to_json(const Entity& e) {
  return json{{"id", e.id}, {"label", e.label}, {"synonyms", e.synonyms},
              {"kind", std::string(to_string(e.kind))}};
}

json to_json(const Relation& r) {
  json j{{"organism", to_json(r.organism)}, {"chemical", to_json(r.chemical)}};
  if (r.chemical_class) j["chemical_class"] = *r.chemical_class;
  return j;
}

json to_json(const Document& d) {
  json rels = json::array();
  for (const auto& r : d.relations) rels.push_back(to_json(r));
  return json{{"id", d.id},
              {"title", d.title},
              {"abstract", d.abstract ? json(*d.abstract) : json(nullptr)},
              {"stratum", d.stratum},
              {"relations", std::move(rels)},
              {"reported_relations", d.reported_relations}};
}

namespace {

std::string string_field(const json& j, const char* name, bool required = true) {
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) {
    if (required) throw DataError(fmt::format("missing field '{}'", name));
    return {};
  }
  if (!it->is_string()) throw DataError(fmt::format("field '{}' must be a string", name));
  return it->get<std::string>();
}

}  // namespace

Entity entity_from_json(const json& j, EntityKind default_kind) {
  if (!j.is_object()) throw DataError("entity must be an object");
  std::vector<std::string> synonyms;
  if (const auto it = j.find("synonyms"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError("field 'synonyms' must be an array");
    for (const auto& s : *it) {
      if (!s.is_string()) throw DataError("field 'synonyms' must hold strings");
      synonyms.push_back(s.get<std::string>());
    }
  }
  auto kind = default_kind;
  if (const auto it = j.find("kind"); it != j.end() && !it->is_null()) {
    kind = entity_kind_from_string(it->get<std::string>());
  }
  return make_entity(string_field(j, "id"), string_field(j, "label"), synonyms, kind);
}

Relation relation_from_json(const json& j) {
  if (!j.is_object()) throw DataError("relation must be an object");
  if (!j.contains("organism")) throw DataError("missing field 'organism'");
  if (!j.contains("chemical")) throw DataError("missing field 'chemical'");
  Relation r;
  r.organism = entity_from_json(j.at("organism"), EntityKind::organism);
  r.chemical = entity_from_json(j.at("chemical"), EntityKind::chemical);
  const auto cls = string_field(j, "chemical_class", false);
  if (!cls.empty()) r.chemical_class = cls;
  validate_relation(r);
  return r;
}

Document document_from_json(const json& j) {
  if (!j.is_object()) throw DataError("document must be an object");
  Document d;
  d.id = string_field(j, "id");
  if (text::trim(d.id).empty()) throw DataError("field 'id' is empty");
  d.title = string_field(j, "title", false);
  if (const auto it = j.find("abstract"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("field 'abstract' must be a string or null");
    d.abstract = it->get<std::string>();
  }
  d.stratum = string_field(j, "stratum");
  if (text::trim(d.stratum).empty()) throw DataError("field 'stratum' is empty");
  const auto rels = j.find("relations");
  if (rels == j.end() || !rels->is_array()) throw DataError("missing array field 'relations'");
  std::vector<Relation> relations;
  for (const auto& r : *rels) relations.push_back(relation_from_json(r));
  d.relations = dedup_relations(std::move(relations));
  d.reported_relations = d.relations.size();
  if (const auto it = j.find("reported_relations"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) {
      throw DataError("field 'reported_relations' must be a non-negative integer");
    }
    d.reported_relations = std::max(it->get<std::size_t>(), d.relations.size());
  }
  return d;
}

Corpus read_corpus_jsonl(std::istream& in) {
  std::vector<Document> docs;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      auto d = document_from_json(json::parse(line));
      if (!ids.insert(d.id).second) throw DataError(fmt::format("duplicate document id '{}'", d.id));
      docs.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw DataError(fmt::format("line {}: invalid JSON: {}", line_no, e.what()));
    } catch (const DataError& e) {
      throw DataError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return Corpus::from_documents(std::move(docs));
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open corpus file '{}'", path.string()));
  return format == CorpusFormat::tsv ? read_corpus_tsv(in, options) : read_corpus_jsonl(in);
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& d : corpus.documents) out << to_json(d).dump() << '\n';
}

Corpus filter_by_relation_count(const Corpus& corpus, std::size_t max_relations) {
  if (max_relations < 1) throw UsageError("max_relations must be at least 1");
  std::vector<Document> kept;
  for (const auto& d : corpus.documents) {
    if (d.reported_relations < max_relations) kept.push_back(d);
  }
  return Corpus::from_documents(std::move(kept));
}

Corpus filter_by_label_length(const Corpus& corpus, std::size_t max_chars) {
  if (max_chars < 1) throw UsageError("max_label_chars must be at least 1");
  std::vector<Document> kept;
  for (const auto& d : corpus.documents) {
    Document copy = d;
    std::erase_if(copy.relations, [&](const Relation& r) {
      return text::scalar_count(r.chemical.label) > max_chars;
    });
    if (!copy.relations.empty()) kept.push_back(std::move(copy));
  }
  return Corpus::from_documents(std::move(kept));
}

Corpus filter_by_abstract_availability(const Corpus& corpus) {
  std::vector<Document> kept;
  for (const auto& d : corpus.documents) {
    if (d.has_abstract()) kept.push_back(d);
  }
  return Corpus::from_documents(std::move(kept));
}

Corpus preprocess(const Corpus& corpus, const PreprocessOptions& options) {
  Corpus out = corpus;
  if (options.require_abstract) out = filter_by_abstract_availability(out);
  out = filter_by_relation_count(out, options.max_relations);
  return filter_by_label_length(out, options.max_label_chars);
}

std::map<std::string, Corpus> stratify(const Corpus& corpus) {
  std::map<std::string, std::vector<Document>> parts;
  for (const auto& d : corpus.documents) parts[d.stratum].push_back(d);
  std::map<std::string, Corpus> out;
  for (auto& [name, docs] : parts) out.emplace(name, Corpus::from_documents(std::move(docs)));
  return out;
}

SynonymTable read_synonyms(std::istream& in) {
  SynonymTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) {
      throw DataError(fmt::format("line {}: expected 2 fields, found {}", line_no, fields.size()));
    }
    const auto id = text::trim(fields[0]);
    const auto synonym = text::trim(fields[1]);
    if (line_no == 1 && id == "entity_id" && synonym == "synonym") continue;
    if (id.empty() || synonym.empty()) {
      throw DataError(fmt::format("line {}: empty entity id or synonym", line_no));
    }
    auto& list = table[std::string(id)];
    if (std::find(list.begin(), list.end(), synonym) == list.end()) {
      list.emplace_back(synonym);
    }
  }
  return table;
}

SynonymTable load_synonyms(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open synonym table '{}'", path.string()));
  return read_synonyms(in);
}

}  // namespace divsample
