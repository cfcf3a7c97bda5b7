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

#include "divsample/synthgen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "divsample/error.hpp"
#include "divsample/mention.hpp"
#include "divsample/rng.hpp"
#include "divsample/score.hpp"
#include "divsample/text.hpp"

namespace divsample {

using nlohmann::json;

namespace {

std::string_view findings_block(std::string_view prompt) {
  const auto at = prompt.rfind(kFindingsMarker);
  if (at == std::string_view::npos) return text::trim(prompt);
  auto rest = prompt.substr(at + kFindingsMarker.size());
  if (const auto stop = rest.find("\n\n"); stop != std::string_view::npos) rest = rest.substr(0, stop);
  return text::trim(rest);
}

}  // namespace

std::string MockBackend::generate(const GenerationRequest& request) {
  switch (mode_) {
    case Mode::empty:
      return {};
    case Mode::fail:
      throw BackendError("mock backend configured to fail");
    case Mode::echo:
      break;
  }
  static constexpr std::string_view kOpenings[] = {
      "The chemical investigation of this source yielded several metabolites.",
      "Bioassay-guided fractionation of the extract led to the following results.",
      "The structures were elucidated by extensive spectroscopic analysis.",
      "This study describes secondary metabolites obtained from a natural source."};
  const auto pick = derive_seed(0, request.prompt, static_cast<std::uint64_t>(
                                                      std::llround(request.temperature * 1000)));
  return fmt::format("{} {}", kOpenings[pick % std::size(kOpenings)], findings_block(request.prompt));
}

std::string MockBackend::name() const {
  switch (mode_) {
    case Mode::empty:
      return "mock:empty";
    case Mode::fail:
      return "mock:fail";
    case Mode::echo:
      break;
  }
  return "mock";
}

std::unique_ptr<GenerationBackend> make_backend(std::string_view spec,
                                                std::chrono::milliseconds timeout) {
  if (spec == "mock") return std::make_unique<MockBackend>(MockBackend::Mode::echo);
  if (spec == "mock:empty") return std::make_unique<MockBackend>(MockBackend::Mode::empty);
  if (spec == "mock:fail") return std::make_unique<MockBackend>(MockBackend::Mode::fail);
  if (spec.starts_with("http://")) {
    return std::make_unique<HttpBackend>(std::string(spec), timeout);
  }
  throw UsageError(fmt::format("unknown backend '{}' (expected mock, mock:empty, mock:fail or a URL)", spec));
}

std::vector<GeneratedCandidate> generate_candidates(
    const std::vector<GenerationInstruction>& instructions, GenerationBackend& backend,
    const GenerationOptions& options) {
  if (options.parallelism < 1) throw UsageError("parallelism must be at least 1");
  if (options.max_attempts < 1) throw UsageError("max attempts must be at least 1");

  std::vector<GeneratedCandidate> out(instructions.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < instructions.size(); i = next++) {
      const auto& g = instructions[i];
      auto& c = out[i];
      c.seed_doc_id = g.doc_id;
      c.instruction_index = g.index;
      c.seed_abstract_chars = g.seed_abstract_chars;
      c.expected_relations = g.findings.expected_relations;
      c.applied = g.findings.applied;
      c.temperature = g.findings.temperature;
      const GenerationRequest request{g.prompt_text, g.findings.temperature, options.max_tokens};
      c.failed = true;
      for (std::size_t attempt = 0; attempt < options.max_attempts && c.failed; ++attempt) {
        if (attempt > 0 && options.retry_backoff.count() > 0) {
          std::this_thread::sleep_for(options.retry_backoff * static_cast<long>(attempt));
        }
        try {
          c.text = backend.generate(request);
          c.failed = false;
          c.error.clear();
        } catch (const std::exception& e) {
          c.error = e.what();
        }
      }
      if (!c.failed) c.mention_coverage = mention_coverage(c.text, c.expected_relations);
    }
  };

  const auto n_threads = std::min(options.parallelism, std::max<std::size_t>(1, instructions.size()));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  if (!out.empty() && std::all_of(out.begin(), out.end(), [](const auto& c) { return c.failed; })) {
    throw BackendError(fmt::format("all {} generation requests failed; last error: {}", out.size(),
                                   out.back().error));
  }
  return out;
}

double mention_coverage(std::string_view text, const std::vector<Relation>& relations) {
  if (relations.empty()) return 0.0;
  std::set<std::string> implicit;
  for (const auto& p : detect_enumerations(text)) {
    for (const auto& m : p.members) implicit.insert(text::fold_key(m));
  }
  auto mentioned = [&](const Entity& e, bool allow_implicit) {
    if (match_entity(text, e).status != MentionStatus::not_found) return true;
    return allow_implicit && implicit.contains(text::fold_key(e.label));
  };
  std::size_t covered = 0;
  for (const auto& r : relations) {
    if (mentioned(r.organism, false) && mentioned(r.chemical, true)) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(relations.size());
}

std::vector<GeneratedCandidate> select_top_k(std::vector<GeneratedCandidate> candidates,
                                             std::size_t k, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw UsageError(fmt::format("q must lie in [0, 1], got {}", q));
  if (k < 1) throw UsageError("k must be at least 1");
  std::vector<std::pair<std::size_t, GeneratedCandidate>> eligible;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& c = candidates[i];
    if (!c.failed && c.mention_coverage >= q) eligible.emplace_back(i, std::move(c));
  }
  auto deviation = [](const GeneratedCandidate& c) {
    const auto len = text::scalar_count(c.text);
    return len > c.seed_abstract_chars ? len - c.seed_abstract_chars : c.seed_abstract_chars - len;
  };
  std::stable_sort(eligible.begin(), eligible.end(), [&](const auto& a, const auto& b) {
    if (a.second.mention_coverage != b.second.mention_coverage) {
      return a.second.mention_coverage > b.second.mention_coverage;
    }
    const auto da = deviation(a.second);
    const auto db = deviation(b.second);
    if (da != db) return da < db;
    return a.first < b.first;
  });
  if (eligible.size() > k) eligible.resize(k);
  std::vector<GeneratedCandidate> out;
  for (auto& [_, c] : eligible) {
    c.accepted = true;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<GeneratedCandidate> select_all(const std::vector<GeneratedCandidate>& candidates,
                                           std::size_t k, double q) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<GeneratedCandidate>> by_seed;
  for (const auto& c : candidates) {
    auto [it, inserted] = by_seed.try_emplace(c.seed_doc_id);
    if (inserted) order.push_back(c.seed_doc_id);
    it->second.push_back(c);
  }
  std::vector<GeneratedCandidate> out;
  for (const auto& seed : order) {
    for (auto& c : select_top_k(std::move(by_seed[seed]), k, q)) out.push_back(std::move(c));
  }
  return out;
}

std::string_view to_string(Split s) { return s == Split::train ? "train" : "valid"; }

SyntheticDataset assemble_dataset(const std::vector<GeneratedCandidate>& accepted,
                                  double split_ratio, std::uint64_t seed) {
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw UsageError(fmt::format("split ratio must lie in (0, 1), got {}", split_ratio));
  }
  std::set<std::string> seed_set;
  for (const auto& c : accepted) seed_set.insert(c.seed_doc_id);
  std::vector<std::string> seeds(seed_set.begin(), seed_set.end());
  Rng rng(derive_seed(seed, "split"));
  shuffle(seeds, rng);
  const auto n_train = static_cast<std::size_t>(std::llround(split_ratio * static_cast<double>(seeds.size())));
  std::set<std::string> train_seeds(seeds.begin(), seeds.begin() + static_cast<std::ptrdiff_t>(n_train));

  SyntheticDataset out;
  for (const auto& c : accepted) {
    if (c.failed) continue;
    SyntheticExample e;
    e.input = c.text;
    e.output = linearise(c.expected_relations);
    e.seed_doc_id = c.seed_doc_id;
    e.applied = c.applied;
    e.temperature = c.temperature;
    e.mention_coverage = c.mention_coverage;
    e.split = train_seeds.contains(c.seed_doc_id) ? Split::train : Split::valid;
    (e.split == Split::train ? out.train : out.valid).push_back(std::move(e));
  }
  return out;
}

json to_json(const GeneratedCandidate& c) {
  json rels = json::array();
  for (const auto& r : c.expected_relations) rels.push_back(to_json(r));
  json j{{"seed_doc_id", c.seed_doc_id},
         {"instruction_index", c.instruction_index},
         {"text", c.text},
         {"mention_coverage", c.mention_coverage},
         {"failed", c.failed},
         {"accepted", c.accepted},
         {"seed_abstract_chars", c.seed_abstract_chars},
         {"expected_relations", std::move(rels)},
         {"applied", c.applied},
         {"temperature", c.temperature}};
  if (c.failed) j["error"] = c.error;
  return j;
}

GeneratedCandidate candidate_from_json(const json& j) {
  GeneratedCandidate c;
  c.seed_doc_id = j.at("seed_doc_id").get<std::string>();
  c.instruction_index = j.value("instruction_index", std::size_t{0});
  c.text = j.value("text", std::string{});
  c.mention_coverage = j.value("mention_coverage", 0.0);
  c.failed = j.value("failed", false);
  c.error = j.value("error", std::string{});
  c.accepted = j.value("accepted", false);
  c.seed_abstract_chars = j.value("seed_abstract_chars", std::size_t{0});
  for (const auto& r : j.at("expected_relations")) c.expected_relations.push_back(relation_from_json(r));
  c.applied = j.value("applied", std::set<std::string>{});
  c.temperature = j.value("temperature", 0.0);
  return c;
}

void write_candidates_jsonl(const std::vector<GeneratedCandidate>& items, std::ostream& out) {
  for (const auto& c : items) out << to_json(c).dump() << '\n';
}

std::vector<GeneratedCandidate> read_candidates_jsonl(std::istream& in) {
  std::vector<GeneratedCandidate> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(candidate_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw DataError(fmt::format("line {}: invalid candidate: {}", line_no, e.what()));
    } catch (const DataError& e) {
      throw DataError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return out;
}

json to_json(const SyntheticExample& e) {
  return json{{"input", e.input},
              {"output", e.output},
              {"split", to_string(e.split)},
              {"provenance",
               {{"seed_doc_id", e.seed_doc_id},
                {"applied", e.applied},
                {"temperature", e.temperature},
                {"mention_coverage", e.mention_coverage}}}};
}

void write_examples_jsonl(const std::vector<SyntheticExample>& items, std::ostream& out) {
  for (const auto& e : items) out << to_json(e).dump() << '\n';
}

}  // namespace divsample
