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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "divsample/config.hpp"
#include "divsample/corpus.hpp"
#include "divsample/error.hpp"
#include "divsample/mention.hpp"
#include "divsample/pipeline.hpp"
#include "divsample/sampler.hpp"
#include "divsample/score.hpp"
#include "divsample/stats.hpp"
#include "divsample/synthgen.hpp"
#include "divsample/text.hpp"
#include "divsample/verbalise.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace divsample;

namespace {

#ifndef DIVSAMPLE_TEMPLATE_DIR
#define DIVSAMPLE_TEMPLATE_DIR "templates"
#endif

CorpusFormat guess_format(const std::string& format, const fs::path& path) {
  if (format != "auto") return corpus_format_from_string(format);
  const auto ext = path.extension().string();
  if (ext == ".tsv" || ext == ".txt") return CorpusFormat::tsv;
  if (ext == ".jsonl" || ext == ".json") return CorpusFormat::jsonl;
  throw UsageError(fmt::format("cannot infer the format of '{}'; pass --format", path.string()));
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

// Writes to a file, or to stdout when path is empty or "-".
template <typename Fn>
void write_out(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path));
  fn(out);
}

void write_json_out(const std::string& path, const json& j) {
  write_out(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

std::vector<std::string> read_id_list(std::istream& in) {
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = text::trim(line);
    if (t.empty()) continue;
    if (t.front() == '{') {
      ids.push_back(json::parse(t).at("doc_id").get<std::string>());
    } else {
      ids.emplace_back(t);
    }
  }
  return ids;
}

// A comma separated list, or @file with one id (or ranked JSONL entry) per line.
std::set<std::string> parse_exclusion(const std::string& spec) {
  std::set<std::string> ids;
  if (spec.empty()) return ids;
  if (spec.front() == '@') {
    auto in = open_in(spec.substr(1));
    for (auto& id : read_id_list(in)) ids.insert(std::move(id));
    return ids;
  }
  for (const auto& part : text::split(spec, ',')) {
    const auto t = text::trim(part);
    if (!t.empty()) ids.emplace(t);
  }
  return ids;
}

struct CorpusArgs {
  std::string path;
  std::string format = "auto";
  std::string stratum_rule = "majority";

  void add(CLI::App* app) {
    app->add_option("--corpus,--input", path, "Corpus file (TSV or JSONL)")->required()->check(CLI::ExistingFile);
    app->add_option("--format", format, "Corpus format")->check(CLI::IsMember({"auto", "tsv", "jsonl"}));
    app->add_option("--stratum-rule", stratum_rule, "Stratum of multi-stratum documents")
        ->check(CLI::IsMember({"majority", "first"}));
  }

  Corpus load() const {
    LoadOptions options;
    options.stratum_rule = stratum_rule == "first" ? StratumRule::first : StratumRule::majority;
    return load_corpus(path, guess_format(format, path), options);
  }
};

void add_preprocess(CLI::App& app) {
  auto* cmd = app.add_subcommand("preprocess", "Filter a corpus dump and write it as JSONL");
  auto args = std::make_shared<CorpusArgs>();
  auto opts = std::make_shared<PreprocessOptions>();
  auto out = std::make_shared<std::string>();
  auto require = std::make_shared<bool>(true);
  args->add(cmd);
  cmd->add_option("--max-relations", opts->max_relations, "Keep documents with fewer relations")
      ->capture_default_str();
  cmd->add_option("--max-label-chars", opts->max_label_chars, "Drop longer chemical labels")
      ->capture_default_str();
  cmd->add_flag("--require-abstract,!--keep-missing-abstracts", *require, "Drop documents without an abstract")
      ->capture_default_str();
  cmd->add_option("--out", *out, "Output JSONL (default stdout)");
  cmd->callback([=] {
    opts->require_abstract = *require;
    const auto raw = args->load();
    const auto corpus = preprocess(raw, *opts);
    write_out(*out, [&](std::ostream& o) { write_corpus_jsonl(corpus, o); });
    std::cerr << fmt::format("{} documents / {} relations -> {} documents / {} relations\n",
                             raw.documents.size(), raw.total_relations(), corpus.documents.size(),
                             corpus.total_relations());
  });
}

Corpus pool_strata(Corpus corpus) {
  for (auto& d : corpus.documents) d.stratum = "all";
  corpus.reindex();
  return corpus;
}

void add_sample(CLI::App& app) {
  auto* cmd = app.add_subcommand("sample", "Select documents per stratum");
  auto args = std::make_shared<CorpusArgs>();
  struct Opts {
    std::string strategy = "gme";
    std::size_t n = 500;
    std::uint64_t seed = 0;
    std::string out, trace, exclude, execution = "parallel", criterion = "relations";
    bool full_trace = false, stratify = true;
  };
  auto o = std::make_shared<Opts>();
  args->add(cmd);
  cmd->add_option("--strategy", o->strategy,
                  "gme, random, top-organisms, top-chemicals, top-relations (or top with --criterion)")
      ->check(CLI::IsMember({"gme", "random", "top", "top-organisms", "top-chemicals", "top-relations"}))
      ->capture_default_str();
  cmd->add_option("--n", o->n, "Documents per stratum")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Seed for the random strategy")->capture_default_str();
  cmd->add_option("--out", o->out, "Ranked JSONL output (default stdout)");
  cmd->add_option("--trace-out,--trace", o->trace, "Entropy trace CSV (gme only)");
  cmd->add_flag("--stratify,!--no-stratify", o->stratify, "Sample each stratum separately")
      ->capture_default_str();
  cmd->add_flag("--full-trace", o->full_trace, "Rank each stratum to the end for the trace");
  cmd->add_option("--exclude", o->exclude, "Document ids to leave out: a,b,c or @file");
  cmd->add_option("--execution", o->execution, "serial or parallel scoring")
      ->check(CLI::IsMember({"serial", "parallel"}));
  cmd->add_option("--criterion", o->criterion, "organisms, chemicals or relations (top only)");
  cmd->callback([=] {
    if (o->n < 1) throw UsageError("--n must be at least 1");
    auto corpus = args->load();
    if (!o->exclude.empty()) corpus = exclude_documents(corpus, parse_exclusion(o->exclude));
    if (!o->stratify) corpus = pool_strata(std::move(corpus));
    std::map<std::string, std::vector<std::string>> picked;
    std::string criterion = o->criterion;
    std::string strategy_name = o->strategy;
    if (strategy_name.starts_with("top-")) {
      criterion = strategy_name.substr(4);
      strategy_name = "top";
    }
    const auto strategy = sampler_strategy_from_string(strategy_name);
    if (strategy != SamplerStrategy::gme && (!o->trace.empty() || o->full_trace)) {
      throw UsageError("--trace and --full-trace apply to the gme strategy only");
    }
    if (strategy == SamplerStrategy::gme) {
      StratifiedOptions so;
      so.n_per_stratum = o->n;
      so.full_trace = o->full_trace;
      so.execution = kernels::execution_from_string(o->execution);
      const auto ranked = stratified_gme(corpus, so);
      for (const auto& [name, s] : ranked) picked[name] = s.doc_ids;
      if (!o->trace.empty()) write_out(o->trace, [&](std::ostream& os) { write_trace_csv(ranked, os); });
    } else if (strategy == SamplerStrategy::random) {
      picked = random_sample(corpus, o->n, o->seed);
    } else {
      picked = top_entity_sample(corpus, o->n, top_criterion_from_string(criterion));
    }
    std::vector<RankedEntry> entries;
    for (const auto& [name, ids] : picked) {
      for (std::size_t i = 0; i < ids.size(); ++i) entries.push_back({i + 1, ids[i], name});
    }
    write_out(o->out, [&](std::ostream& os) { write_ranked_jsonl(entries, os); });
  });
}

std::vector<std::size_t> parse_ranks(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& part : text::split(s, ',')) {
    const auto t = std::string(text::trim(part));
    if (t.empty()) continue;
    try {
      std::size_t used = 0;
      const auto v = std::stoull(t, &used);
      if (used != t.size() || v == 0) throw std::invalid_argument(t);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("invalid rank '{}'", t));
    }
  }
  return out;
}

void add_analyze_trace(CLI::App& app) {
  auto* cmd = app.add_subcommand("analyze-trace", "Knee points and percent-of-max of entropy traces");
  struct Opts {
    std::string trace, report, percent_at;
    bool knee = true;
    double sensitivity = 1.0;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--trace", o->trace, "Trace CSV written by sample --trace")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--percent-of-max,--percent-at", o->percent_at, "Ranks for percent-of-max, e.g. 250,500");
  cmd->add_flag("--knee,!--no-knee", o->knee, "Detect knee points")->capture_default_str();
  cmd->add_option("--sensitivity", o->sensitivity, "Recorded with the knee")->capture_default_str();
  cmd->add_option("--report", o->report, "JSON report (default stdout)");
  cmd->callback([=] {
    auto in = open_in(o->trace);
    const auto traces = read_trace_csv(in);
    TraceAnalysisOptions options;
    options.knee = o->knee;
    options.sensitivity = o->sensitivity;
    options.percent_ranks = parse_ranks(o->percent_at);
    write_json_out(o->report, analyze_traces(traces, options));
  });
}

SynonymTable maybe_synonyms(const std::string& path) {
  return path.empty() ? SynonymTable{} : load_synonyms(path);
}

void add_mismatch(CLI::App& app) {
  auto* cmd = app.add_subcommand("mismatch", "Count how relation labels are mentioned in abstracts");
  auto args = std::make_shared<CorpusArgs>();
  auto synonyms = std::make_shared<std::string>();
  auto report = std::make_shared<std::string>();
  args->add(cmd);
  cmd->add_option("--synonyms", *synonyms, "Synonym table TSV")->check(CLI::ExistingFile);
  cmd->add_option("--report", *report, "JSON report (default stdout)");
  cmd->callback([=] {
    const auto corpus = args->load();
    write_json_out(*report, to_json(mismatch_report(corpus, maybe_synonyms(*synonyms))));
  });
}

void add_verbalise(CLI::App& app) {
  auto* cmd = app.add_subcommand("verbalise", "Build generation instructions for seed documents");
  auto args = std::make_shared<CorpusArgs>();
  struct Opts {
    std::string config, out, templ = "abstract_v1", templates_dir = DIVSAMPLE_TEMPLATE_DIR;
    std::string keywords, annotations, synonyms, sample;
    std::size_t m = 10;
    std::optional<std::uint64_t> seed;
  };
  auto o = std::make_shared<Opts>();
  args->add(cmd);
  cmd->add_option("--config", o->config, "Transformation config (TOML)")->check(CLI::ExistingFile);
  cmd->add_option("--m", o->m, "Instructions per seed document")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Root seed (overrides rng_seed)");
  cmd->add_option("--template", o->templ, "Template id")->capture_default_str();
  cmd->add_option("--templates-dir", o->templates_dir, "Template directory")->capture_default_str();
  cmd->add_option("--keywords", o->keywords, "JSONL {doc_id, keywords}")->check(CLI::ExistingFile);
  cmd->add_option("--annotations", o->annotations, "JSONL {doc_id, annotations}")->check(CLI::ExistingFile);
  cmd->add_option("--synonyms", o->synonyms, "Synonym table TSV")->check(CLI::ExistingFile);
  cmd->add_option("--sample", o->sample, "Only documents listed in this ranked JSONL")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o->out, "Instructions JSONL (default stdout)");
  cmd->callback([=] {
    if (o->m < 1) throw UsageError("--m must be at least 1");
    TransformationConfig cfg = o->config.empty() ? TransformationConfig{} : load_transformation_config(o->config);
    if (o->seed) cfg.rng_seed = *o->seed;
    cfg.validate();
    const auto corpus = args->load();
    const auto library = TemplateLibrary::load(o->templates_dir);
    const auto& prompt = library.get(o->templ);
    const auto synonyms = maybe_synonyms(o->synonyms);
    std::map<std::string, std::vector<std::string>> keywords, annotations;
    if (!o->keywords.empty()) {
      auto in = open_in(o->keywords);
      keywords = read_doc_lists_jsonl(in, "keywords");
    }
    if (!o->annotations.empty()) {
      auto in = open_in(o->annotations);
      annotations = read_doc_lists_jsonl(in, "annotations");
    }
    std::vector<const Document*> docs;
    if (o->sample.empty()) {
      for (const auto& d : corpus.documents) docs.push_back(&d);
    } else {
      auto in = open_in(o->sample);
      for (const auto& id : read_id_list(in)) {
        const auto* d = corpus.find(id);
        if (d == nullptr) throw DataError(fmt::format("sampled document '{}' is not in the corpus", id));
        docs.push_back(d);
      }
    }
    const std::vector<std::string> none;
    std::vector<GenerationInstruction> all;
    for (const auto* d : docs) {
      const auto an = annotations.find(d->id);
      const auto kw = keywords.find(d->id);
      const auto exclusion = build_exclusion_list(*d, an == annotations.end() ? none : an->second, synonyms);
      const auto kws = filter_keywords(kw == keywords.end() ? none : kw->second, exclusion);
      for (auto& g : sample_instructions(*d, kws, cfg, prompt, {o->m, 20})) all.push_back(std::move(g));
    }
    write_out(o->out, [&](std::ostream& os) { write_instructions_jsonl(all, os); });
  });
}

void add_generate(CLI::App& app) {
  auto* cmd = app.add_subcommand("generate", "Send instructions to a generation backend");
  struct Opts {
    std::string instructions, backend = "mock", out;
    std::size_t timeout_ms = 120000;
    GenerationOptions gen;
    std::optional<std::size_t> k;
    std::optional<double> q;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--instructions", o->instructions, "Instructions JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--backend,--backend-url", o->backend, "mock, mock:empty, mock:fail or http://host:port/path")
      ->capture_default_str();
  cmd->add_option("--parallelism", o->gen.parallelism, "Concurrent requests")->capture_default_str();
  cmd->add_option("--max-attempts", o->gen.max_attempts, "Attempts per request")->capture_default_str();
  cmd->add_option("--max-tokens", o->gen.max_tokens, "Token budget per request")->capture_default_str();
  cmd->add_option("--timeout-ms", o->timeout_ms, "Per request timeout")->capture_default_str();
  cmd->add_option("--k", o->k, "Keep the top k candidates per seed document (default 3 with --q)");
  cmd->add_option("--q", o->q, "Minimal mention coverage of kept candidates (default 1.0 with --k)");
  cmd->add_option("--out", o->out, "Candidates JSONL (default stdout)");
  cmd->callback([=] {
    auto in = open_in(o->instructions);
    const auto instructions = read_instructions_jsonl(in);
    auto backend = make_backend(o->backend, std::chrono::milliseconds(o->timeout_ms));
    auto candidates = generate_candidates(instructions, *backend, o->gen);
    if (o->k || o->q) candidates = select_all(candidates, o->k.value_or(3), o->q.value_or(1.0));
    std::size_t failed = 0;
    for (const auto& c : candidates) failed += c.failed ? 1 : 0;
    write_out(o->out, [&](std::ostream& os) { write_candidates_jsonl(candidates, os); });
    std::cerr << fmt::format("{} candidates, {} failed\n", candidates.size(), failed);
  });
}

void add_assemble(CLI::App& app) {
  auto* cmd = app.add_subcommand("assemble", "Select top-k candidates and split train/valid");
  struct Opts {
    std::string candidates, out_dir, out_train, out_valid;
    std::size_t k = 3;
    double q = 1.0;
    double split = 0.9;
    std::uint64_t seed = 0;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--candidates", o->candidates, "Candidates JSONL")->required()->check(CLI::ExistingFile);
  cmd->add_option("--k", o->k, "Examples kept per seed document")->capture_default_str();
  cmd->add_option("--q", o->q, "Minimal mention coverage")->capture_default_str();
  cmd->add_option("--split", o->split, "Train fraction of seed documents")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Split seed")->capture_default_str();
  auto* dir_opt = cmd->add_option("--out-dir", o->out_dir, "Directory for selected, train and valid JSONL");
  auto* train_opt = cmd->add_option("--out-train", o->out_train, "Train JSONL");
  auto* valid_opt = cmd->add_option("--out-valid", o->out_valid, "Valid JSONL");
  train_opt->needs(valid_opt);
  valid_opt->needs(train_opt);
  dir_opt->excludes(train_opt);
  cmd->callback([=] {
    if (o->out_dir.empty() && o->out_train.empty()) throw UsageError("give --out-dir or --out-train/--out-valid");
    auto in = open_in(o->candidates);
    const auto selected = select_all(read_candidates_jsonl(in), o->k, o->q);
    const auto data = assemble_dataset(selected, o->split, o->seed);
    auto train = o->out_train, valid = o->out_valid;
    if (!o->out_dir.empty()) {
      const fs::path dir(o->out_dir);
      fs::create_directories(dir);
      write_out((dir / "selected.jsonl").string(), [&](std::ostream& os) { write_candidates_jsonl(selected, os); });
      train = (dir / "train.jsonl").string();
      valid = (dir / "valid.jsonl").string();
    }
    write_out(train, [&](std::ostream& os) { write_examples_jsonl(data.train, os); });
    write_out(valid, [&](std::ostream& os) { write_examples_jsonl(data.valid, os); });
    std::cerr << fmt::format("{} selected, {} train, {} valid\n", selected.size(), data.train.size(),
                             data.valid.size());
  });
}

void add_score(CLI::App& app) {
  auto* cmd = app.add_subcommand("score", "Exact-match relation scoring or keyword precision");
  struct Opts {
    std::string gold, pred, matching = "casefold", report, keywords_pred, keywords_gold;
    bool ignore_classes = false, per_document = false;
    std::size_t k = 10;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--gold", o->gold, "Gold relations JSON")->check(CLI::ExistingFile);
  cmd->add_option("--pred", o->pred, "Predictions JSONL {doc_id, output}")->check(CLI::ExistingFile);
  cmd->add_option("--matching", o->matching, "exact or casefold")
      ->check(CLI::IsMember({"exact", "casefold"}))
      ->capture_default_str();
  cmd->add_flag("--ignore-classes", o->ignore_classes, "Leave chemical-class relations out");
  cmd->add_flag("--per-document", o->per_document, "Include per-document counts");
  cmd->add_option("--keywords-pred", o->keywords_pred, "Predicted keywords JSONL")->check(CLI::ExistingFile);
  cmd->add_option("--keywords-gold", o->keywords_gold, "Gold keyphrases JSONL")->check(CLI::ExistingFile);
  cmd->add_option("--k", o->k, "Keywords considered per document")->capture_default_str();
  cmd->add_option("--report", o->report, "JSON report (default stdout)");
  cmd->callback([=] {
    const bool relations = !o->gold.empty() || !o->pred.empty();
    const bool keywords = !o->keywords_pred.empty() || !o->keywords_gold.empty();
    if (relations == keywords) {
      throw UsageError("pass either --gold and --pred, or --keywords-pred and --keywords-gold");
    }
    if (keywords) {
      if (o->keywords_pred.empty() || o->keywords_gold.empty()) {
        throw UsageError("--keywords-pred and --keywords-gold go together");
      }
      auto pin = open_in(o->keywords_pred);
      auto gin = open_in(o->keywords_gold);
      const auto pred = read_doc_lists_jsonl(pin, "keywords");
      const auto gold = read_doc_lists_jsonl(gin, "keywords");
      write_json_out(o->report, {{"k", o->k}, {"precision", keyword_precision(pred, gold, o->k)}});
      return;
    }
    if (o->gold.empty() || o->pred.empty()) throw UsageError("--gold and --pred go together");
    auto in = open_in(o->pred);
    const auto report = score(load_gold(o->gold), read_predictions_jsonl(in),
                              {matching_from_string(o->matching), o->ignore_classes});
    auto j = to_json(report, o->per_document);
    j["matching"] = o->matching;
    write_json_out(o->report, j);
  });
}

Corpus restrict(const Corpus& corpus, const std::vector<std::string>& ids) {
  std::vector<Document> docs;
  std::set<std::string> seen;
  for (const auto& id : ids) {
    const auto* d = corpus.find(id);
    if (d == nullptr) throw DataError(fmt::format("document '{}' is not in the corpus", id));
    if (seen.insert(id).second) docs.push_back(*d);
  }
  return Corpus::from_documents(std::move(docs));
}

void add_stats(CLI::App& app) {
  auto* cmd = app.add_subcommand("stats", "Diversity statistics of a corpus or a sample");
  auto args = std::make_shared<CorpusArgs>();
  auto sample = std::make_shared<std::string>();
  auto report = std::make_shared<std::string>();
  auto curves = std::make_shared<bool>(false);
  args->add(cmd);
  cmd->add_option("--sample", *sample, "Restrict to the documents of a ranked JSONL")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--curves", *curves, "Include the full Pareto curves");
  cmd->add_option("--report", *report, "JSON report (default stdout)");
  cmd->callback([=] {
    auto corpus = args->load();
    if (!sample->empty()) {
      auto in = open_in(*sample);
      corpus = restrict(corpus, read_id_list(in));
    }
    write_json_out(*report, to_json(diversity_stats(corpus), *curves));
  });
}

void add_compare(CLI::App& app) {
  auto* cmd = app.add_subcommand("compare", "Compare diversity of several samples");
  auto args = std::make_shared<CorpusArgs>();
  auto specs = std::make_shared<std::vector<std::string>>();
  auto report = std::make_shared<std::string>();
  auto table = std::make_shared<std::string>();
  args->add(cmd);
  cmd->add_option("--sample", *specs, "name=path; names like random#1 are pooled")->required();
  cmd->add_option("--report", *report, "JSON report");
  cmd->add_option("--table", *table, "Tab separated table (default stdout)");
  cmd->callback([=] {
    const auto corpus = args->load();
    std::vector<std::pair<std::string, std::vector<std::string>>> samples;
    for (const auto& spec : *specs) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw UsageError(fmt::format("--sample expects name=path, got '{}'", spec));
      }
      auto in = open_in(spec.substr(eq + 1));
      samples.emplace_back(spec.substr(0, eq), read_id_list(in));
    }
    const auto rows = compare_samples(samples, corpus);
    if (!report->empty()) write_json_out(*report, to_json(rows));
    if (!table->empty() || report->empty()) {
      write_out(*table, [&](std::ostream& os) { os << to_table(rows); });
    }
  });
}

void add_run(CLI::App& app, int& exit_code) {
  auto* cmd = app.add_subcommand("run", "Run the whole pipeline from a config file");
  struct Opts {
    std::string config, out, backend;
    std::optional<std::uint64_t> seed;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--config", o->config, "Pipeline config (TOML)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o->out, "Output directory (overrides output.dir)");
  cmd->add_option("--seed", o->seed, "Root seed (overrides seed)");
  cmd->add_option("--backend", o->backend, "Generation backend (overrides generate.backend)");
  cmd->callback([=, &exit_code] {
    auto config = load_pipeline_config(o->config);
    if (!o->out.empty()) config.output_dir = o->out;
    if (o->seed) config.seed = *o->seed;
    if (!o->backend.empty()) config.generate.backend = o->backend;
    const auto result = run_pipeline(config);
    if (!result.ok) {
      std::cerr << fmt::format("error: stage '{}' failed: {}\n", result.failed_stage, result.error);
      std::cerr << fmt::format("partial manifest written to {}\n", result.manifest_path.string());
      exit_code = result.exit_code;
      return;
    }
    std::cerr << fmt::format("manifest written to {}\n", result.manifest_path.string());
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diversity-driven document sampling and synthetic relation-extraction data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "divsample 0.1.0");
  int exit_code = 0;
  add_preprocess(app);
  add_sample(app);
  add_analyze_trace(app);
  add_mismatch(app);
  add_verbalise(app);
  add_generate(app);
  add_assemble(app);
  add_score(app);
  add_stats(app);
  add_compare(app);
  add_run(app, exit_code);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const divsample::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}
