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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "divsample/corpus.hpp"
#include "divsample/verbalise.hpp"

namespace divsample {

struct GenerationRequest {
  std::string prompt;
  double temperature = 0.7;
  int max_tokens = 512;
};

/// Text generation service. Implementations hold no per-call state, so a
/// failed call can be retried as is. Failures throw BackendError.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string generate(const GenerationRequest& request) = 0;
  virtual std::string name() const = 0;
};

/// Offline backend. `echo` returns a deterministic framing sentence followed
/// by the findings block of the prompt (the text after the last
/// "Main findings:" marker up to the next blank line, or the whole prompt);
/// `empty` returns ""; `fail` always throws BackendError.
class MockBackend final : public GenerationBackend {
 public:
  enum class Mode { echo, empty, fail };

  explicit MockBackend(Mode mode = Mode::echo) : mode_(mode) {}
  std::string generate(const GenerationRequest& request) override;
  std::string name() const override;

 private:
  Mode mode_;
};

inline constexpr std::string_view kFindingsMarker = "Main findings:";

/// POSTs {"prompt", "temperature", "max_tokens"} as JSON and reads the
/// "text" member of the JSON reply.
class HttpBackend final : public GenerationBackend {
 public:
  /// url: http://host[:port][/path]. Throws UsageError on a malformed URL.
  explicit HttpBackend(std::string url,
                       std::chrono::milliseconds timeout = std::chrono::seconds(120));
  std::string generate(const GenerationRequest& request) override;
  std::string name() const override { return "http:" + url_; }

 private:
  std::string url_;
  std::string origin_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

/// "mock", "mock:empty", "mock:fail" or an http:// URL.
std::unique_ptr<GenerationBackend> make_backend(std::string_view spec,
                                                std::chrono::milliseconds timeout);

// Candidates.

struct GeneratedCandidate {
  std::string seed_doc_id;
  std::size_t instruction_index = 0;
  std::string text;
  double mention_coverage = 0.0;
  bool failed = false;
  std::string error;
  bool accepted = false;
  std::size_t seed_abstract_chars = 0;
  std::vector<Relation> expected_relations;
  std::set<std::string> applied;
  double temperature = 0.0;
};

struct GenerationOptions {
  std::size_t parallelism = 4;
  std::size_t max_attempts = 3;
  int max_tokens = 512;
  std::chrono::milliseconds retry_backoff{0};
};

/// One candidate per instruction, in input order. Calls that still fail
/// after max_attempts are kept as failure records. Throws BackendError when
/// every call fails, UsageError when parallelism or max_attempts is zero.
std::vector<GeneratedCandidate> generate_candidates(
    const std::vector<GenerationInstruction>& instructions, GenerationBackend& backend,
    const GenerationOptions& options);

/// Fraction of relations whose organism (label or synonym) and chemical
/// (label, synonym, or member of an enumeration in the text) are both
/// mentioned. Class-level chemicals count by their class label. Zero for an
/// empty relation list.
double mention_coverage(std::string_view text, const std::vector<Relation>& relations);

/// Candidates of one seed with coverage >= q, best first: coverage
/// descending, then closeness of length to the seed abstract, then index.
/// Returns at most k. Failed candidates are never eligible.
std::vector<GeneratedCandidate> select_top_k(std::vector<GeneratedCandidate> candidates,
                                             std::size_t k, double q);

/// Groups candidates by seed, applies select_top_k to each, and marks the
/// survivors accepted. Seed order follows first appearance.
std::vector<GeneratedCandidate> select_all(const std::vector<GeneratedCandidate>& candidates,
                                           std::size_t k, double q);

// Dataset.

enum class Split { train, valid };
std::string_view to_string(Split s);

struct SyntheticExample {
  std::string input;
  std::string output;
  std::string seed_doc_id;
  std::set<std::string> applied;
  double temperature = 0.0;
  double mention_coverage = 0.0;
  Split split = Split::train;
};

struct SyntheticDataset {
  std::vector<SyntheticExample> train;
  std::vector<SyntheticExample> valid;
};

/// Splits accepted candidates by seed document: seeds are shuffled with the
/// given seed and the first round(ratio * n_seeds) go to train. Throws
/// UsageError unless 0 < ratio < 1.
SyntheticDataset assemble_dataset(const std::vector<GeneratedCandidate>& accepted,
                                  double split_ratio, std::uint64_t seed);

nlohmann::json to_json(const GeneratedCandidate& c);
GeneratedCandidate candidate_from_json(const nlohmann::json& j);
void write_candidates_jsonl(const std::vector<GeneratedCandidate>& items, std::ostream& out);
std::vector<GeneratedCandidate> read_candidates_jsonl(std::istream& in);

nlohmann::json to_json(const SyntheticExample& e);
void write_examples_jsonl(const std::vector<SyntheticExample>& items, std::ostream& out);

}  // namespace divsample
