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
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "divsample/corpus.hpp"
#include "divsample/templates.hpp"

namespace divsample {

struct TransformationConfig {
  double p_class_replace = 0.2;
  double p_contract = 0.9;
  double p_shuffle = 0.25;
  double p_number = 0.9;
  double p_direction = 0.5;
  std::vector<double> temperatures{0.5, 0.6, 0.7, 0.8};
  std::uint64_t rng_seed = 0;

  /// Throws UsageError unless probabilities lie in [0, 1] and at least one
  /// temperature is given.
  void validate() const;
};

enum class Direction { produces, isolated_from };
std::string_view to_string(Direction d);

namespace tags {
inline constexpr std::string_view class_replace = "class_replace";
inline constexpr std::string_view contract = "contract";
inline constexpr std::string_view shuffle = "shuffle";
inline constexpr std::string_view number = "number";
inline constexpr std::string_view direction = "direction";
}  // namespace tags

struct VerbalisedFindings {
  std::string text;
  /// Ground truth after transformation, in mention order.
  std::vector<Relation> expected_relations;
  std::set<std::string> applied;
  Direction direction = Direction::produces;
  double temperature = 0.0;

  bool operator==(const VerbalisedFindings&) const = default;
};

/// chemical id -> chemical class name.
using ClassMap = std::map<std::string, std::string>;

/// Collects the class annotations carried by the relations.
ClassMap class_map_from(const std::vector<Relation>& relations);

/// Renders the relations as findings sentences, sampling the five
/// transformations from a stream seeded with cfg.rng_seed. Class
/// replacement, contraction and numbering are drawn per eligible group;
/// shuffle and direction once per call. Throws DataError on empty input.
VerbalisedFindings verbalise_findings(const std::vector<Relation>& relations,
                                      const ClassMap& class_map, const TransformationConfig& cfg);

/// "five Meroterpenoids"; counts above ten use digits.
std::string class_phrase(std::size_t count, std::string_view class_name);

/// Plural class name used as the label of a class-level relation.
std::string class_label(std::string_view class_name);

// Keywords.

/// Case-folded labels and synonyms of every entity in the document, plus the
/// synonym table entries and any external annotation surfaces.
std::set<std::string> build_exclusion_list(const Document& doc,
                                           const std::vector<std::string>& annotations,
                                           const SynonymTable& synonyms);

/// Drops candidates whose folded form equals, contains or is contained in an
/// exclusion entry; keeps the order of the rest.
std::vector<std::string> filter_keywords(const std::vector<std::string>& candidates,
                                         const std::set<std::string>& exclusion);

inline constexpr std::size_t kMaxKeywords = 10;

// Instructions.

struct GenerationInstruction {
  std::string doc_id;
  std::size_t index = 0;
  std::string title;
  std::vector<std::string> keywords;
  VerbalisedFindings findings;
  std::string prompt_text;
  std::string template_id;
  /// Length in unicode scalars of the seed abstract, used by the selector.
  std::size_t seed_abstract_chars = 0;
};

/// Renders the template slots {{title}}, {{keywords}} and {{findings}}.
GenerationInstruction build_instruction(const Document& doc, std::vector<std::string> keywords,
                                        VerbalisedFindings findings,
                                        const PromptTemplate& prompt);

struct InstructionSampling {
  std::size_t m = 10;
  /// Draw attempts per requested instruction before giving up on more
  /// distinct verbalisations.
  std::size_t attempts_per_instruction = 20;
};

/// Samples up to m distinct instructions for one seed document. Attempt i
/// uses the stream derive_seed(cfg.rng_seed, doc id, i), so results do not
/// depend on the order documents are processed in.
std::vector<GenerationInstruction> sample_instructions(const Document& doc,
                                                       const std::vector<std::string>& keywords,
                                                       const TransformationConfig& cfg,
                                                       const PromptTemplate& prompt,
                                                       const InstructionSampling& sampling);

nlohmann::json to_json(const VerbalisedFindings& f);
nlohmann::json to_json(const GenerationInstruction& g);
GenerationInstruction instruction_from_json(const nlohmann::json& j);

void write_instructions_jsonl(const std::vector<GenerationInstruction>& items, std::ostream& out);
std::vector<GenerationInstruction> read_instructions_jsonl(std::istream& in);

/// doc_id -> list of strings, from JSONL lines {"doc_id": ..., field: [...]}.
/// List items may be strings or objects with a "text" member.
std::map<std::string, std::vector<std::string>> read_doc_lists_jsonl(std::istream& in,
                                                                     std::string_view field);

}  // namespace divsample
