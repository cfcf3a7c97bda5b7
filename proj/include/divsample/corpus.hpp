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

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace divsample {

enum class EntityKind { organism, chemical, chemical_class };

std::string_view to_string(EntityKind kind);
EntityKind entity_kind_from_string(std::string_view s);

struct Entity {
  std::string id;
  std::string label;
  std::vector<std::string> synonyms;
  EntityKind kind = EntityKind::organism;

  bool operator==(const Entity&) const = default;
};

/// Builds an entity with a trimmed non-empty label and deduplicated synonyms
/// (empty entries and copies of the label are dropped). Throws DataError.
Entity make_entity(std::string id, std::string_view label,
                   const std::vector<std::string>& synonyms, EntityKind kind);

struct Relation {
  Entity organism;
  Entity chemical;
  /// Chemical class annotation (e.g. an NP-classifier class), when known.
  std::optional<std::string> chemical_class;

  bool operator==(const Relation&) const = default;
};

/// Throws DataError unless organism is an organism and chemical is a
/// chemical or chemical class.
void validate_relation(const Relation& r);

struct Document {
  std::string id;
  std::string title;
  std::optional<std::string> abstract;
  std::string stratum;
  std::vector<Relation> relations;
  // Number of distinct relations the source dump reports for this document.
  // Label filtering drops relations but leaves this unchanged, so the
  // relation-count filter retains the same documents in any filter order.
  std::size_t reported_relations = 0;

  std::size_t n_relations() const { return relations.size(); }
  bool has_abstract() const;
};

struct Corpus {
  std::vector<Document> documents;
  std::set<std::string> strata;
  /// entity id -> number of relations (over all documents) involving it.
  std::map<std::string, std::size_t> entity_index;

  static Corpus from_documents(std::vector<Document> documents);

  void reindex();
  /// True when strata and entity_index agree with a full recount.
  bool index_consistent() const;
  std::size_t total_relations() const;
  bool empty() const { return documents.empty(); }
  const Document* find(std::string_view id) const;
};

enum class CorpusFormat { tsv, jsonl };
CorpusFormat corpus_format_from_string(std::string_view s);

/// How a document whose rows name several strata gets its single stratum.
enum class StratumRule {
  majority,  // most relations; ties broken by smallest stratum name
  first,     // stratum of the first row
};

struct LoadOptions {
  StratumRule stratum_rule = StratumRule::majority;
};

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const LoadOptions& options = {});
Corpus read_corpus_tsv(std::istream& in, const LoadOptions& options = {});
Corpus read_corpus_jsonl(std::istream& in);

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);

nlohmann::json to_json(const Entity& e);
nlohmann::json to_json(const Relation& r);
nlohmann::json to_json(const Document& d);
Entity entity_from_json(const nlohmann::json& j, EntityKind default_kind);
Relation relation_from_json(const nlohmann::json& j);
Document document_from_json(const nlohmann::json& j);

/// Removes repeated (organism id, chemical id) pairs, keeping first occurrences.
std::vector<Relation> dedup_relations(std::vector<Relation> relations);

// Preprocessing filters.

/// Keeps documents reporting strictly fewer than max_relations relations.
Corpus filter_by_relation_count(const Corpus& corpus, std::size_t max_relations);

/// Drops relations whose chemical label exceeds max_chars unicode scalars,
/// then drops documents left without relations.
Corpus filter_by_label_length(const Corpus& corpus, std::size_t max_chars);

/// Keeps documents whose abstract is present and not blank.
Corpus filter_by_abstract_availability(const Corpus& corpus);

struct PreprocessOptions {
  std::size_t max_relations = 20;
  std::size_t max_label_chars = 60;
  bool require_abstract = true;
};

Corpus preprocess(const Corpus& corpus, const PreprocessOptions& options);

/// Splits the corpus by stratum label. Keys are ordered by name.
std::map<std::string, Corpus> stratify(const Corpus& corpus);

/// Sidecar synonym table: entity id -> synonyms.
using SynonymTable = std::map<std::string, std::vector<std::string>>;

/// Reads `entity_id<TAB>synonym` rows; a leading header row is optional.
SynonymTable load_synonyms(const std::filesystem::path& path);
SynonymTable read_synonyms(std::istream& in);

}  // namespace divsample
