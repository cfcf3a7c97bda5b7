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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "divsample/corpus.hpp"

namespace divsample {

/// Byte offsets into a UTF-8 string, end exclusive.
struct TextSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const TextSpan&) const = default;
};

enum class MentionStatus { matched_label, matched_synonym, multiple_implicit, not_found };
std::string_view to_string(MentionStatus s);

struct MentionVerdict {
  std::string entity_id;
  EntityKind kind = EntityKind::organism;
  MentionStatus status = MentionStatus::not_found;
  std::optional<std::string> matched_surface;
  std::optional<TextSpan> span;
};

/// Leftmost case-insensitive occurrence of needle in haystack that is not
/// flanked by a letter or digit.
std::optional<TextSpan> find_mention(std::string_view haystack, std::string_view needle);

/// Matches the label first, then the synonyms (the entity's own followed by
/// extra_synonyms). Among synonyms the leftmost occurrence wins.
MentionVerdict match_entity(std::string_view abstract, const Entity& entity,
                            std::span<const std::string> extra_synonyms = {});

// Co-joined enumerations ("cystodiones A-D", "wortmannins C and D").

enum class EnumerationKind { letter_range, letter_list, numbered_range };
std::string_view to_string(EnumerationKind k);

struct EnumerationPattern {
  std::string stem;  // singular form, e.g. "cystodione"
  EnumerationKind kind = EnumerationKind::letter_range;
  std::vector<std::string> members;  // e.g. "cystodione A", "cystodione B"
  TextSpan span;
  std::string surface;
};

/// Version of the enumeration grammar, recorded in mismatch reports.
inline constexpr std::string_view kEnumerationGrammarVersion = "1";

std::vector<EnumerationPattern> detect_enumerations(std::string_view text);

/// Splits "cystodione A" into ("cystodione", 'A'). Requires a single capital
/// letter after the last space.
std::optional<std::pair<std::string, char>> split_letter_suffix(std::string_view label);

/// Inverse of the enumeration grammar: "cystodiones A-D" for consecutive runs
/// of three or more letters, "wortmannins C and D" / "stems A, C and F"
/// otherwise. Letters must be distinct capitals in ascending order, at
/// least two of them.
std::string contract_members(std::string_view stem, std::span<const char> letters);

/// True when detect_enumerations(contract_members(stem, letters)) yields
/// exactly the members "stem L" for each letter.
bool contraction_round_trips(std::string_view stem, std::span<const char> letters);

// Document and corpus level classification.

struct MentionTally {
  std::array<std::size_t, 4> organisms{};  // indexed by MentionStatus
  std::array<std::size_t, 4> chemicals{};
  std::size_t relations = 0;
  std::size_t pairs_complete = 0;  // both partners found (implicit counts)

  MentionTally& operator+=(const MentionTally& o);
};

struct DocumentMentions {
  std::string doc_id;
  std::vector<MentionVerdict> verdicts;  // one per distinct entity
  MentionTally tally;

  bool pair_complete() const { return tally.pairs_complete == tally.relations; }
};

/// Throws DataError when the document has no abstract.
DocumentMentions classify_document_mentions(const Document& doc, const SynonymTable& synonyms);

struct MismatchReport {
  std::size_t documents = 0;
  std::size_t skipped_without_abstract = 0;
  std::size_t pair_complete_documents = 0;
  MentionTally tally;
};

/// Classifies every document with an abstract; runs per document in
/// parallel and aggregates in corpus order.
MismatchReport mismatch_report(const Corpus& corpus, const SynonymTable& synonyms);

nlohmann::json to_json(const MismatchReport& report);

}  // namespace divsample
