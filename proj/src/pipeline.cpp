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

#include "divsample/pipeline.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "divsample/error.hpp"
#include "divsample/mention.hpp"
#include "divsample/rng.hpp"
#include "divsample/sampler.hpp"
#include "divsample/score.hpp"
#include "divsample/synthgen.hpp"
#include "divsample/templates.hpp"
#include "divsample/verbalise.hpp"

namespace divsample {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream s;
  s << in.rdbuf();
  return sha256_hex(s.str());
}

namespace {

struct Stage {
  std::string name;
  std::vector<std::string> artifacts;  // relative to the output directory
};

class Run {
 public:
  explicit Run(const PipelineConfig& config) : c_(config), dir_(config.output_dir) {}

  PipelineResult execute() {
    PipelineResult result;
    fs::create_directories(dir_);
    manifest_ = json{{"format", 1},
                     {"config", to_json(c_)},
                     {"config_sha256", sha256_hex(to_json(c_).dump())},
                     {"inputs", inputs()},
                     {"stages", json::array()}};
    const std::pair<const char*, void (Run::*)(Stage&)> stages[] = {
        {"preprocess", &Run::preprocess}, {"sample", &Run::sample},
        {"verbalise", &Run::verbalise},   {"generate", &Run::generate},
        {"select", &Run::select},         {"assemble", &Run::assemble},
        {"score", &Run::score}};
    for (const auto& [name, fn] : stages) {
      Stage stage{name, {}};
      try {
        (this->*fn)(stage);
        record(stage, "ok");
      } catch (const Error& e) {
        fail(result, stage, e.what(), e.exit_code());
        break;
      } catch (const std::exception& e) {
        fail(result, stage, e.what(), 2);
        break;
      }
    }
    manifest_["status"] = result.ok ? "ok" : "failed";
    result.manifest_path = dir_ / "manifest.json";
    std::ofstream(result.manifest_path, std::ios::binary) << manifest_.dump(2) << '\n';
    result.manifest = manifest_;
    return result;
  }

 private:
  json inputs() const {
    json in = json::array();
    auto add = [&](const char* role, const std::optional<fs::path>& p) {
      if (p) in.push_back({{"role", role}, {"sha256", sha256_file(*p)}});
    };
    add("corpus", c_.corpus.path);
    add("synonyms", c_.corpus.synonyms);
    add("keywords", c_.corpus.keywords);
    add("annotations", c_.corpus.annotations);
    add("gold", c_.score.gold);
    add("predictions", c_.score.predictions);
    return in;
  }

  void record(const Stage& stage, const char* status) {
    json artifacts = json::array();
    for (const auto& a : stage.artifacts) {
      const auto path = dir_ / a;
      if (!fs::exists(path)) continue;
      artifacts.push_back({{"path", a}, {"sha256", sha256_file(path)}, {"bytes", fs::file_size(path)}});
    }
    manifest_["stages"].push_back({{"name", stage.name}, {"status", status}, {"artifacts", artifacts}});
  }

  void fail(PipelineResult& result, const Stage& stage, const std::string& what, int code) {
    record(stage, "failed");
    manifest_["stages"].back()["error"] = what;
    result.ok = false;
    result.failed_stage = stage.name;
    result.error = what;
    result.exit_code = code;
  }

  std::ofstream open(Stage& stage, const std::string& name) {
    stage.artifacts.push_back(name);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write '{}'", (dir_ / name).string()));
    return out;
  }

  void write_json(Stage& stage, const std::string& name, const json& j) {
    open(stage, name) << j.dump(2) << '\n';
  }

  void preprocess(Stage& stage) {
    const auto raw = load_corpus(c_.corpus.path, c_.corpus.format, {c_.corpus.stratum_rule});
    corpus_ = divsample::preprocess(raw, c_.preprocess);
    if (corpus_.empty()) throw DataError("no documents survive preprocessing");
    if (c_.corpus.synonyms) synonyms_ = load_synonyms(*c_.corpus.synonyms);
    auto out = open(stage, "corpus.jsonl");
    write_corpus_jsonl(corpus_, out);
    write_json(stage, "preprocess.json",
               {{"input_documents", raw.documents.size()},
                {"input_relations", raw.total_relations()},
                {"documents", corpus_.documents.size()},
                {"relations", corpus_.total_relations()},
                {"strata", corpus_.strata}});
  }

  void sample(Stage& stage) {
    std::map<std::string, std::vector<std::string>> picked;
    switch (c_.sampler.strategy) {
      case SamplerStrategy::gme: {
        StratifiedOptions options;
        options.n_per_stratum = c_.sampler.n;
        options.execution = c_.sampler.execution;
        const auto ranked = stratified_gme(corpus_, options);
        for (const auto& [name, s] : ranked) picked[name] = s.doc_ids;
        auto trace = open(stage, "trace.csv");
        write_trace_csv(ranked, trace);
        break;
      }
      case SamplerStrategy::random:
        picked = random_sample(corpus_, c_.sampler.n, derive_seed(c_.seed, "sample"));
        break;
      case SamplerStrategy::top:
        picked = top_entity_sample(corpus_, c_.sampler.n,
                                   top_criterion_from_string(c_.sampler.top_criterion));
        break;
    }
    std::vector<RankedEntry> entries;
    for (const auto& [name, ids] : picked) {
      for (std::size_t i = 0; i < ids.size(); ++i) {
        entries.push_back({i + 1, ids[i], name});
        sampled_.push_back(corpus_.find(ids[i]));
      }
    }
    auto out = open(stage, "sample.jsonl");
    write_ranked_jsonl(entries, out);
  }

  void verbalise(Stage& stage) {
    const auto library = TemplateLibrary::load(c_.verbalise.templates_dir);
    const auto& prompt = library.get(c_.verbalise.template_id);
    std::map<std::string, std::vector<std::string>> keywords, annotations;
    if (c_.corpus.keywords) keywords = read_lists(*c_.corpus.keywords, "keywords");
    if (c_.corpus.annotations) annotations = read_lists(*c_.corpus.annotations, "annotations");

    TransformationConfig cfg = c_.verbalise.transformations;
    cfg.rng_seed = derive_seed(c_.seed, "verbalise", cfg.rng_seed);
    const InstructionSampling sampling{c_.verbalise.m, 20};
    std::vector<std::vector<GenerationInstruction>> per_doc(sampled_.size());
    std::vector<std::string> errors(sampled_.size());
    const auto n = static_cast<std::ptrdiff_t>(sampled_.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto& doc = *sampled_[static_cast<std::size_t>(i)];
      try {
        const auto kw_it = keywords.find(doc.id);
        const auto an_it = annotations.find(doc.id);
        const std::vector<std::string> none;
        const auto exclusion =
            build_exclusion_list(doc, an_it == annotations.end() ? none : an_it->second, synonyms_);
        const auto kws = filter_keywords(kw_it == keywords.end() ? none : kw_it->second, exclusion);
        per_doc[static_cast<std::size_t>(i)] = sample_instructions(doc, kws, cfg, prompt, sampling);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = fmt::format("document '{}': {}", doc.id, e.what());
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw DataError(e);
    }
    for (auto& v : per_doc) {
      for (auto& g : v) instructions_.push_back(std::move(g));
    }
    auto out = open(stage, "instructions.jsonl");
    write_instructions_jsonl(instructions_, out);
  }

  void generate(Stage& stage) {
    auto backend = make_backend(c_.generate.backend, std::chrono::milliseconds(c_.generate.timeout_ms));
    GenerationOptions options;
    options.parallelism = c_.generate.parallelism;
    options.max_attempts = c_.generate.max_attempts;
    options.max_tokens = c_.generate.max_tokens;
    candidates_ = generate_candidates(instructions_, *backend, options);
    auto out = open(stage, "candidates.jsonl");
    write_candidates_jsonl(candidates_, out);
  }

  void select(Stage& stage) {
    selected_ = select_all(candidates_, c_.select.k, c_.select.q);
    auto out = open(stage, "selected.jsonl");
    write_candidates_jsonl(selected_, out);
  }

  void assemble(Stage& stage) {
    const auto data = assemble_dataset(selected_, c_.assemble.split_ratio, derive_seed(c_.seed, "assemble"));
    auto train = open(stage, "train.jsonl");
    write_examples_jsonl(data.train, train);
    auto valid = open(stage, "valid.jsonl");
    write_examples_jsonl(data.valid, valid);
  }

  void score(Stage& stage) {
    const ScoreOptions options{c_.score.matching, c_.score.ignore_classes};
    if (c_.score.predictions) {
      std::ifstream in(*c_.score.predictions);
      if (!in) throw DataError(fmt::format("cannot read '{}'", c_.score.predictions->string()));
      const auto report = divsample::score(load_gold(*c_.score.gold), read_predictions_jsonl(in), options);
      write_json(stage, "score.json", {{"mode", "predictions"}, {"report", to_json(report)}});
      return;
    }
    // Without predictions, audit the selected examples: their linearised
    // outputs must parse back to the expected relations, and their coverage
    // must reproduce and meet the threshold.
    std::vector<GoldDocument> gold;
    std::vector<PredictedDocument> pred;
    std::size_t violations = 0;
    for (const auto& c : selected_) {
      const auto id = fmt::format("{}#{}", c.seed_doc_id, c.instruction_index);
      GoldDocument g{id, {}};
      for (const auto& r : c.expected_relations) {
        g.relations.push_back({r.organism.label, r.chemical.label,
                               r.chemical.kind == EntityKind::chemical_class});
      }
      gold.push_back(std::move(g));
      auto parsed = parse_output(linearise(c.expected_relations));
      pred.push_back({id, std::move(parsed.pairs), parsed.malformed});
      const double coverage = mention_coverage(c.text, c.expected_relations);
      if (coverage != c.mention_coverage || coverage < c_.select.q) ++violations;
    }
    const auto report = divsample::score(gold, pred, {Matching::exact, false});
    write_json(stage, "score.json",
               {{"mode", "dataset_audit"},
                {"examples", selected_.size()},
                {"coverage_violations", violations},
                {"report", to_json(report, false)}});
  }

  static std::map<std::string, std::vector<std::string>> read_lists(const fs::path& p,
                                                                    std::string_view field) {
    std::ifstream in(p);
    if (!in) throw DataError(fmt::format("cannot read '{}'", p.string()));
    return read_doc_lists_jsonl(in, field);
  }

  const PipelineConfig& c_;
  fs::path dir_;
  json manifest_;
  Corpus corpus_;
  SynonymTable synonyms_;
  std::vector<const Document*> sampled_;
  std::vector<GenerationInstruction> instructions_;
  std::vector<GeneratedCandidate> candidates_;
  std::vector<GeneratedCandidate> selected_;
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  return Run(config).execute();
}

}  // namespace divsample
