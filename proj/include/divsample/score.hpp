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

#include <compare>
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

#include "divsample/corpus.hpp"

namespace divsample {

inline constexpr std::string_view kVerb = " produces ";
inline constexpr std::string_view kSeparator = "; ";

/// "O produces C; O produces D" in input order. Throws DataError when a
/// label contains ';'.
std::string linearise(const std::vector<Relation>& relations);

struct RelationPair {
  std::string organism;
  std::string chemical;

  auto operator<=>(const RelationPair&) const = default;
};

struct ParsedOutput {
  std::set<RelationPair> pairs;
  std::size_t malformed = 0;  // non-empty clauses without the verb
};

/// Splits on ';' and each clause at the first " produces ". Surfaces are
/// trimmed; clauses with an empty side count as malformed.
ParsedOutput parse_output(std::string_view text);

enum class Matching { exact, casefold };
Matching matching_from_string(std::string_view s);
std::string_view to_string(Matching m);

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;
  Counts& operator+=(const Counts& o);
  bool operator==(const Counts&) const = default;
};

struct GoldRelation {
  std::string organism;
  std::string chemical;
  bool chemical_is_class = false;
};

struct GoldDocument {
  std::string doc_id;
  std::vector<GoldRelation> relations;
};

struct PredictedDocument {
  std::string doc_id;
  std::set<RelationPair> pairs;
  std::size_t malformed = 0;
};

struct DocumentScore {
  std::string doc_id;
  Counts counts;
  bool predicted = false;
  std::size_t malformed = 0;
};

struct MacroScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ScoreReport {
  Counts micro;
  MacroScores macro;
  std::size_t malformed = 0;
  std::vector<DocumentScore> per_document;  // gold order
};

struct ScoreOptions {
  Matching matching = Matching::casefold;
  /// Drop class-level gold relations, and the predictions that match them.
  bool ignore_classes = false;
};

/// Micro-aggregated exact-match scoring. A gold document without
/// predictions contributes all its relations as false negatives. Throws
/// DataError on duplicate document ids or predictions for unknown documents.
ScoreReport score(const std::vector<GoldDocument>& gold, const std::vector<PredictedDocument>& pred,
                  const ScoreOptions& options = {});

/// Precision of the first k predicted keywords per document against the gold
/// keyphrases (case-folded, trimmed exact match). The denominator is the
/// number of predictions actually considered, sum of min(k, |predicted|).
double keyword_precision(const std::map<std::string, std::vector<std::string>>& predicted,
                         const std::map<std::string, std::vector<std::string>>& gold,
                         std::size_t k);

nlohmann::json to_json(const ScoreReport& report, bool per_document = true);

/// Accepts an array of documents or an object keyed by document id. Each
/// document lists relations under "relations" (or "triplets"); relations
/// name their sides "organism"/"chemical" (or "subject"/"object"), as strings
/// or objects with a "label". Unknown fields are ignored.
std::vector<GoldDocument> gold_from_json(const nlohmann::json& j);
std::vector<GoldDocument> load_gold(const std::filesystem::path& path);

/// Gold documents built from corpus relations.
std::vector<GoldDocument> gold_from_corpus(const Corpus& corpus);

/// JSONL lines {"doc_id": ..., "output": "..."}.
std::vector<PredictedDocument> read_predictions_jsonl(std::istream& in);

}  // namespace divsample
