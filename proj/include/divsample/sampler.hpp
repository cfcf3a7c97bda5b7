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
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "divsample/corpus.hpp"
#include "divsample/error.hpp"
#include "divsample/kernels.hpp"

namespace divsample {

struct TraceStep {
  std::size_t rank = 0;  // 1-based
  std::string doc_id;
  std::string stratum;
  double h_organisms = 0.0;
  double h_chemicals = 0.0;
  double distance = 0.0;
};

struct SamplerTrace {
  std::vector<TraceStep> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
};

struct RankedSample {
  std::vector<std::string> doc_ids;
  SamplerTrace trace;
};

struct GmeOptions {
  /// Number of documents to rank; nullopt ranks the whole corpus.
  std::optional<std::size_t> limit;
  kernels::Execution execution = kernels::Execution::parallel;
  /// Distances closer than this to the step minimum count as ties, which go
  /// to the smallest document id.
  double tie_tolerance = 1e-12;
};

/// Greedy maximum-entropy ranking. At each step adds the document whose
/// inclusion brings (H(O), H(C)) closest to (ln|O|, ln|C|) of the corpus.
/// Throws DataError on an empty corpus or a document without relations.
RankedSample gme_sample(const Corpus& corpus, const GmeOptions& options = {});

struct StratifiedOptions {
  std::size_t n_per_stratum = 500;
  /// Rank each stratum to the end for the trace, keeping the top n as sample.
  bool full_trace = false;
  kernels::Execution execution = kernels::Execution::parallel;
};

std::map<std::string, RankedSample> stratified_gme(const Corpus& corpus,
                                                   const StratifiedOptions& options);

/// Uniform sample without replacement, per stratum. Each stratum draws from
/// its own stream derived from (seed, stratum).
std::map<std::string, std::vector<std::string>> random_sample(const Corpus& corpus,
                                                              std::size_t n_per_stratum,
                                                              std::uint64_t seed);

enum class TopCriterion { organisms, chemicals, relations };
TopCriterion top_criterion_from_string(std::string_view s);

/// Per stratum, the n documents with the most distinct entities of the
/// criterion; ties by ascending document id.
std::map<std::string, std::vector<std::string>> top_entity_sample(const Corpus& corpus,
                                                                  std::size_t n_per_stratum,
                                                                  TopCriterion criterion);

Corpus exclude_documents(const Corpus& corpus, const std::set<std::string>& ids);

// Trace analysis.

enum class Curve { organisms, chemicals };
std::string_view to_string(Curve c);

struct KneeReport {
  std::size_t rank = 0;
  double entropy_at_knee = 0.0;
  Curve curve = Curve::organisms;
  double sensitivity = 1.0;
};

/// Thrown when a trace has no bend (e.g. a straight line).
class NoKneeError : public DataError {
 public:
  using DataError::DataError;
};

/// Knee of a concave increasing curve: the point of largest distance above
/// the chord joining the endpoints, after min-max normalizing both axes.
/// Returns the 0-based index. Requires at least 3 points.
std::size_t knee_index(std::span<const double> y);

KneeReport detect_knee(const SamplerTrace& trace, Curve curve, double sensitivity = 1.0);

/// 100 * H(at_rank) / max H over the trace.
double percent_of_max(const SamplerTrace& trace, std::size_t at_rank, Curve curve);

struct TraceAnalysisOptions {
  bool knee = true;
  double sensitivity = 1.0;
  std::vector<std::size_t> percent_ranks;
};

/// Per-stratum report: trace length, maximum entropies with their ranks,
/// knee points and percent-of-max at the requested ranks.
nlohmann::json analyze_traces(const std::map<std::string, SamplerTrace>& traces,
                              const TraceAnalysisOptions& options);

// File formats.

void write_trace_csv(const std::map<std::string, RankedSample>& samples, std::ostream& out);
void write_trace_csv(const SamplerTrace& trace, std::ostream& out, bool header = true);
std::map<std::string, SamplerTrace> read_trace_csv(std::istream& in);

struct RankedEntry {
  std::size_t rank = 0;
  std::string doc_id;
  std::string stratum;
};

void write_ranked_jsonl(const std::vector<RankedEntry>& entries, std::ostream& out);
std::vector<RankedEntry> read_ranked_jsonl(std::istream& in);

}  // namespace divsample
