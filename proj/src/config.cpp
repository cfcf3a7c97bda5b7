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

#include "divsample/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <toml.hpp>

#include "divsample/error.hpp"

namespace divsample {

using nlohmann::json;

SamplerStrategy sampler_strategy_from_string(std::string_view s) {
  if (s == "gme") return SamplerStrategy::gme;
  if (s == "random") return SamplerStrategy::random;
  if (s == "top") return SamplerStrategy::top;
  throw UsageError(fmt::format("unknown sampler strategy '{}' (expected gme, random or top)", s));
}

std::string_view to_string(SamplerStrategy s) {
  switch (s) {
    case SamplerStrategy::gme:
      return "gme";
    case SamplerStrategy::random:
      return "random";
    case SamplerStrategy::top:
      return "top";
  }
  return "gme";
}

namespace {

std::string_view to_string(CorpusFormat f) { return f == CorpusFormat::tsv ? "tsv" : "jsonl"; }
std::string_view to_string(StratumRule r) { return r == StratumRule::majority ? "majority" : "first"; }
StratumRule stratum_rule_from_string(std::string_view s) {
  if (s == "majority") return StratumRule::majority;
  if (s == "first") return StratumRule::first;
  throw UsageError(fmt::format("unknown stratum rule '{}' (expected majority or first)", s));
}

// Reads typed keys from one table and rejects keys nobody asked for.
class Section {
 public:
  Section(const toml::table& table, std::string name) : table_(table), name_(std::move(name)) {}

  template <typename T>
  void get(std::string_view key, T& out) {
    const auto* node = table_.get(key);
    used_.emplace(key);
    if (node == nullptr) return;
    read(*node, key, out);
  }

  const toml::table* subtable(std::string_view key) {
    const auto* node = table_.get(key);
    used_.emplace(key);
    if (node == nullptr) return nullptr;
    if (!node->is_table()) fail(key, "a table");
    return node->as_table();
  }

  void finish() const {
    for (const auto& [key, _] : table_) {
      if (!used_.contains(std::string(key.str()))) {
        throw UsageError(fmt::format("unknown key '{}'", qualified(key.str())));
      }
    }
  }

 private:
  std::string qualified(std::string_view key) const {
    return name_.empty() ? std::string(key) : name_ + "." + std::string(key);
  }

  [[noreturn]] void fail(std::string_view key, std::string_view expected) const {
    throw UsageError(fmt::format("config key '{}' must be {}", qualified(key), expected));
  }

  void read(const toml::node& n, std::string_view key, bool& out) const {
    if (const auto v = n.value_exact<bool>()) {
      out = *v;
    } else {
      fail(key, "a boolean");
    }
  }

  void read(const toml::node& n, std::string_view key, std::string& out) const {
    if (const auto v = n.value_exact<std::string>()) {
      out = *v;
    } else {
      fail(key, "a string");
    }
  }

  void read(const toml::node& n, std::string_view key, double& out) const {
    if (const auto v = n.value_exact<double>()) {
      out = *v;
    } else if (const auto i = n.value_exact<std::int64_t>()) {
      out = static_cast<double>(*i);
    } else {
      fail(key, "a number");
    }
  }

  void read(const toml::node& n, std::string_view key, std::size_t& out) const {
    const auto v = n.value_exact<std::int64_t>();
    if (!v || *v < 0) fail(key, "a non-negative integer");
    out = static_cast<std::size_t>(*v);
  }

  void read(const toml::node& n, std::string_view key, int& out) const {
    const auto v = n.value_exact<std::int64_t>();
    if (!v || *v < 0 || *v > std::numeric_limits<int>::max()) fail(key, "a non-negative integer");
    out = static_cast<int>(*v);
  }

  void read(const toml::node& n, std::string_view key, std::vector<double>& out) const {
    const auto* arr = n.as_array();
    if (arr == nullptr) fail(key, "an array of numbers");
    out.clear();
    for (const auto& item : *arr) {
      double d = 0.0;
      read(item, key, d);
      out.push_back(d);
    }
  }

  const toml::table& table_;
  std::string name_;
  std::set<std::string, std::less<>> used_;
};

toml::table parse_toml(std::string_view text, std::string_view source) {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    const auto& where = e.source().begin;
    throw UsageError(fmt::format("{}:{}:{}: {}", source, where.line, where.column, e.description()));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(fmt::format("cannot read config file '{}'", path.string()));
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void read_transformations(Section& s, TransformationConfig& t) {
  s.get("p_class_replace", t.p_class_replace);
  s.get("p_contract", t.p_contract);
  s.get("p_shuffle", t.p_shuffle);
  s.get("p_number", t.p_number);
  s.get("p_direction", t.p_direction);
  s.get("temperatures", t.temperatures);
  s.get("rng_seed", t.rng_seed);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

void optional_path(Section& s, std::string_view key, const std::filesystem::path& base,
                   std::optional<std::filesystem::path>& out) {
  std::string value;
  s.get(key, value);
  if (!value.empty()) out = resolve(base, value);
}

}  // namespace

void PipelineConfig::validate() const {
  if (corpus.path.empty()) throw UsageError("config key 'corpus.path' is required");
  if (sampler.n < 1) throw UsageError("sampler.n must be at least 1");
  verbalise.transformations.validate();
  if (verbalise.m < 1) throw UsageError("verbalise.m must be at least 1");
  if (generate.parallelism < 1) throw UsageError("generate.parallelism must be at least 1");
  if (generate.max_attempts < 1) throw UsageError("generate.max_attempts must be at least 1");
  if (select.k < 1) throw UsageError("select.k must be at least 1");
  if (!(select.q >= 0.0 && select.q <= 1.0)) throw UsageError("select.q must lie in [0, 1]");
  if (!(assemble.split_ratio > 0.0 && assemble.split_ratio < 1.0)) {
    throw UsageError("assemble.split_ratio must lie in (0, 1)");
  }
  if (score.predictions && !score.gold) {
    throw UsageError("score.predictions requires score.gold");
  }
}

PipelineConfig parse_pipeline_config(std::string_view toml_text, const std::filesystem::path& base_dir,
                                     std::string_view source) {
  const auto root = parse_toml(toml_text, source);
  PipelineConfig c;
  c.verbalise.templates_dir = base_dir / "templates";
  Section top(root, "");
  top.get("seed", c.seed);

  if (const auto* t = top.subtable("corpus")) {
    Section s(*t, "corpus");
    std::string path, format = "tsv", rule = "majority";
    s.get("path", path);
    s.get("format", format);
    s.get("stratum_rule", rule);
    if (!path.empty()) c.corpus.path = resolve(base_dir, path);
    c.corpus.format = corpus_format_from_string(format);
    c.corpus.stratum_rule = stratum_rule_from_string(rule);
    optional_path(s, "synonyms", base_dir, c.corpus.synonyms);
    optional_path(s, "keywords", base_dir, c.corpus.keywords);
    optional_path(s, "annotations", base_dir, c.corpus.annotations);
    s.finish();
  }
  if (const auto* t = top.subtable("preprocess")) {
    Section s(*t, "preprocess");
    s.get("max_relations", c.preprocess.max_relations);
    s.get("max_label_chars", c.preprocess.max_label_chars);
    s.get("require_abstract", c.preprocess.require_abstract);
    s.finish();
  }
  if (const auto* t = top.subtable("sampler")) {
    Section s(*t, "sampler");
    std::string strategy = "gme", execution = "parallel";
    s.get("strategy", strategy);
    s.get("n", c.sampler.n);
    s.get("execution", execution);
    s.get("top_criterion", c.sampler.top_criterion);
    c.sampler.strategy = sampler_strategy_from_string(strategy);
    c.sampler.execution = kernels::execution_from_string(execution);
    s.finish();
  }
  if (const auto* t = top.subtable("verbalise")) {
    Section s(*t, "verbalise");
    read_transformations(s, c.verbalise.transformations);
    s.get("m", c.verbalise.m);
    s.get("template", c.verbalise.template_id);
    std::string dir;
    s.get("templates_dir", dir);
    if (!dir.empty()) c.verbalise.templates_dir = resolve(base_dir, dir);
    s.finish();
  }
  if (const auto* t = top.subtable("generate")) {
    Section s(*t, "generate");
    s.get("backend", c.generate.backend);
    s.get("timeout_ms", c.generate.timeout_ms);
    s.get("max_attempts", c.generate.max_attempts);
    s.get("parallelism", c.generate.parallelism);
    s.get("max_tokens", c.generate.max_tokens);
    s.finish();
  }
  if (const auto* t = top.subtable("select")) {
    Section s(*t, "select");
    s.get("k", c.select.k);
    s.get("q", c.select.q);
    s.finish();
  }
  if (const auto* t = top.subtable("assemble")) {
    Section s(*t, "assemble");
    s.get("split_ratio", c.assemble.split_ratio);
    s.finish();
  }
  if (const auto* t = top.subtable("score")) {
    Section s(*t, "score");
    std::string matching = "casefold";
    s.get("matching", matching);
    s.get("ignore_classes", c.score.ignore_classes);
    c.score.matching = matching_from_string(matching);
    optional_path(s, "gold", base_dir, c.score.gold);
    optional_path(s, "predictions", base_dir, c.score.predictions);
    s.finish();
  }
  if (const auto* t = top.subtable("output")) {
    Section s(*t, "output");
    std::string dir;
    s.get("dir", dir);
    if (!dir.empty()) c.output_dir = resolve(base_dir, dir);
    s.finish();
  }
  top.finish();
  c.validate();
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return parse_pipeline_config(read_file(path), base, path.string());
}

TransformationConfig parse_transformation_config(std::string_view toml_text, std::string_view source) {
  const auto root = parse_toml(toml_text, source);
  TransformationConfig t;
  Section top(root, "");
  if (const auto* v = top.subtable("verbalise")) {
    Section s(*v, "verbalise");
    read_transformations(s, t);
    s.finish();
  } else {
    read_transformations(top, t);
  }
  top.finish();
  t.validate();
  return t;
}

TransformationConfig load_transformation_config(const std::filesystem::path& path) {
  return parse_transformation_config(read_file(path), path.string());
}

json to_json(const PipelineConfig& c) {
  const auto& t = c.verbalise.transformations;
  return json{
      {"seed", c.seed},
      {"corpus",
       {{"format", to_string(c.corpus.format)}, {"stratum_rule", to_string(c.corpus.stratum_rule)}}},
      {"preprocess",
       {{"max_relations", c.preprocess.max_relations},
        {"max_label_chars", c.preprocess.max_label_chars},
        {"require_abstract", c.preprocess.require_abstract}}},
      {"sampler",
       {{"strategy", to_string(c.sampler.strategy)},
        {"n", c.sampler.n},
        {"top_criterion", c.sampler.top_criterion}}},
      {"verbalise",
       {{"p_class_replace", t.p_class_replace},
        {"p_contract", t.p_contract},
        {"p_shuffle", t.p_shuffle},
        {"p_number", t.p_number},
        {"p_direction", t.p_direction},
        {"temperatures", t.temperatures},
        {"rng_seed", t.rng_seed},
        {"m", c.verbalise.m},
        {"template", c.verbalise.template_id}}},
      {"generate",
       {{"backend", c.generate.backend},
        {"max_attempts", c.generate.max_attempts},
        {"max_tokens", c.generate.max_tokens}}},
      {"select", {{"k", c.select.k}, {"q", c.select.q}}},
      {"assemble", {{"split_ratio", c.assemble.split_ratio}}},
      {"score",
       {{"matching", to_string(c.score.matching)}, {"ignore_classes", c.score.ignore_classes}}}};
}

}  // namespace divsample
