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

#include "divsample/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "divsample/entropy.hpp"
#include "divsample/rng.hpp"
#include "divsample/text.hpp"

namespace divsample {

using nlohmann::json;

namespace {

// Position of each document in ascending id order; used to break ties.
std::vector<std::uint32_t> id_ranks(const Corpus& corpus) {
  std::vector<std::uint32_t> order(corpus.documents.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return corpus.documents[a].id < corpus.documents[b].id;
  });
  std::vector<std::uint32_t> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r > 0 && corpus.documents[order[r]].id == corpus.documents[order[r - 1]].id) {
      throw DataError(fmt::format("duplicate document id '{}'", corpus.documents[order[r]].id));
    }
    rank[order[r]] = static_cast<std::uint32_t>(r);
  }
  return rank;
}

}  // namespace

RankedSample gme_sample(const Corpus& corpus, const GmeOptions& options) {
  if (corpus.empty()) throw DataError("cannot rank an empty corpus");
  for (const auto& d : corpus.documents) {
    if (d.relations.empty()) {
      throw DataError(fmt::format("document '{}' has no relations", d.id));
    }
  }
  const std::size_t size = corpus.documents.size();
  const std::size_t limit = options.limit.value_or(size);
  if (limit > size) {
    throw UsageError(fmt::format("cannot rank {} documents from a corpus of {}", limit, size));
  }

  const auto index = CorpusIndex::build(corpus);
  const auto tie_rank = id_ranks(corpus);
  const kernels::UtopianPoint utopia{std::log(static_cast<double>(index.organisms.size())),
                                     std::log(static_cast<double>(index.chemicals.size()))};

  std::vector<std::uint32_t> candidates(size);
  std::iota(candidates.begin(), candidates.end(), 0u);
  std::vector<double> distances(size);
  EntropyState state(index.organisms.size(), index.chemicals.size());

  RankedSample out;
  out.doc_ids.reserve(limit);
  out.trace.steps.reserve(limit);
  for (std::size_t step = 0; step < limit; ++step) {
    const std::span<double> scored(distances.data(), candidates.size());
    kernels::score_candidates(options.execution, state, index.profiles, candidates, utopia, scored);
    const auto pos =
        kernels::select_best(options.execution, scored, candidates, tie_rank, options.tie_tolerance);
    const auto chosen = candidates[pos];
    const auto& profile = index.profiles[chosen];
    const auto h = state.peek(profile);
    state.apply(profile);

    const auto& doc = corpus.documents[chosen];
    out.doc_ids.push_back(doc.id);
    out.trace.steps.push_back({step + 1, doc.id, doc.stratum, h.h_organisms, h.h_chemicals,
                               utopian_distance(h, utopia.h_organisms, utopia.h_chemicals)});
    // Candidate order is irrelevant to the selection rule.
    candidates[pos] = candidates.back();
    candidates.pop_back();
  }
  return out;
}

std::map<std::string, RankedSample> stratified_gme(const Corpus& corpus,
                                                   const StratifiedOptions& options) {
  if (options.n_per_stratum < 1) throw UsageError("n per stratum must be at least 1");
  std::map<std::string, RankedSample> out;
  for (const auto& [name, part] : stratify(corpus)) {
    const auto n = std::min(options.n_per_stratum, part.documents.size());
    GmeOptions gme;
    gme.execution = options.execution;
    if (!options.full_trace) gme.limit = n;
    auto ranked = gme_sample(part, gme);
    ranked.doc_ids.resize(n);
    out.emplace(name, std::move(ranked));
  }
  return out;
}

std::map<std::string, std::vector<std::string>> random_sample(const Corpus& corpus,
                                                              std::size_t n_per_stratum,
                                                              std::uint64_t seed) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [name, part] : stratify(corpus)) {
    Rng rng(derive_seed(seed, name));
    std::vector<std::size_t> idx(part.documents.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto n = std::min(n_per_stratum, idx.size());
    auto& ids = out[name];
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_below(rng, idx.size() - i));
      std::swap(idx[i], idx[j]);
      ids.push_back(part.documents[idx[i]].id);
    }
  }
  return out;
}

TopCriterion top_criterion_from_string(std::string_view s) {
  if (s == "organisms") return TopCriterion::organisms;
  if (s == "chemicals") return TopCriterion::chemicals;
  if (s == "relations") return TopCriterion::relations;
  throw UsageError(fmt::format("unknown top-entity criterion '{}'", s));
}

std::map<std::string, std::vector<std::string>> top_entity_sample(const Corpus& corpus,
                                                                  std::size_t n_per_stratum,
                                                                  TopCriterion criterion) {
  auto distinct = [&](const Document& d) -> std::size_t {
    if (criterion == TopCriterion::relations) return d.n_relations();
    std::set<std::string_view> ids;
    for (const auto& r : d.relations) {
      ids.insert(criterion == TopCriterion::organisms ? std::string_view(r.organism.id)
                                                      : std::string_view(r.chemical.id));
    }
    return ids.size();
  };

  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [name, part] : stratify(corpus)) {
    std::vector<std::pair<std::size_t, const Document*>> scored;
    for (const auto& d : part.documents) scored.emplace_back(distinct(d), &d);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second->id < b.second->id;
    });
    auto& ids = out[name];
    const auto n = std::min(n_per_stratum, scored.size());
    for (std::size_t i = 0; i < n; ++i) ids.push_back(scored[i].second->id);
  }
  return out;
}

Corpus exclude_documents(const Corpus& corpus, const std::set<std::string>& ids) {
  std::vector<Document> kept;
  for (const auto& d : corpus.documents) {
    if (!ids.contains(d.id)) kept.push_back(d);
  }
  return Corpus::from_documents(std::move(kept));
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> parse_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty() && !quoted) {
      in_quotes = quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      quoted = false;
    } else {
      cur += c;
    }
  }
  if (in_quotes) throw DataError(fmt::format("line {}: unterminated quoted field", line_no));
  fields.push_back(std::move(cur));
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no, std::string_view field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(fmt::format("line {}: field '{}' is not a number: '{}'", line_no, field, s));
  }
}

constexpr std::string_view kTraceHeader = "rank,doc_id,stratum,h_organisms,h_chemicals,distance";

}  // namespace

void write_trace_csv(const SamplerTrace& trace, std::ostream& out, bool header) {
  if (header) out << kTraceHeader << '\n';
  for (const auto& s : trace.steps) {
    out << fmt::format("{},{},{},{:.9f},{:.9f},{:.9f}\n", s.rank, csv_field(s.doc_id),
                       csv_field(s.stratum), s.h_organisms, s.h_chemicals, s.distance);
  }
}

void write_trace_csv(const std::map<std::string, RankedSample>& samples, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& [name, sample] : samples) write_trace_csv(sample.trace, out, false);
}

std::map<std::string, SamplerTrace> read_trace_csv(std::istream& in) {
  std::map<std::string, SamplerTrace> out;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    if (!seen_header) {
      if (line != kTraceHeader) {
        throw DataError(fmt::format("line {}: expected trace header '{}'", line_no, kTraceHeader));
      }
      seen_header = true;
      continue;
    }
    const auto f = parse_csv_line(line, line_no);
    if (f.size() != 6) {
      throw DataError(fmt::format("line {}: expected 6 fields, found {}", line_no, f.size()));
    }
    TraceStep s;
    const double rank = parse_double(f[0], line_no, "rank");
    if (rank < 1 || rank != std::floor(rank)) {
      throw DataError(fmt::format("line {}: invalid rank '{}'", line_no, f[0]));
    }
    s.rank = static_cast<std::size_t>(rank);
    s.doc_id = f[1];
    s.stratum = f[2];
    s.h_organisms = parse_double(f[3], line_no, "h_organisms");
    s.h_chemicals = parse_double(f[4], line_no, "h_chemicals");
    s.distance = parse_double(f[5], line_no, "distance");
    auto& trace = out[s.stratum];
    if (s.rank != trace.steps.size() + 1) {
      throw DataError(fmt::format("line {}: rank {} out of sequence in stratum '{}'", line_no,
                                  s.rank, s.stratum));
    }
    trace.steps.push_back(std::move(s));
  }
  return out;
}

void write_ranked_jsonl(const std::vector<RankedEntry>& entries, std::ostream& out) {
  for (const auto& e : entries) {
    out << json{{"rank", e.rank}, {"doc_id", e.doc_id}, {"stratum", e.stratum}}.dump() << '\n';
  }
}

std::vector<RankedEntry> read_ranked_jsonl(std::istream& in) {
  std::vector<RankedEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      RankedEntry e;
      e.rank = j.value("rank", out.size() + 1);
      e.doc_id = j.at("doc_id").get<std::string>();
      e.stratum = j.value("stratum", std::string{});
      out.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw DataError(fmt::format("line {}: invalid ranked entry: {}", line_no, e.what()));
    }
  }
  return out;
}

}  // namespace divsample
