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

#include "divsample/score.hpp"

#include <fstream>
#include <istream>

#include <fmt/format.h>

#include "divsample/error.hpp"
#include "divsample/text.hpp"

namespace divsample {

using nlohmann::json;

std::string linearise(const std::vector<Relation>& relations) {
  std::string out;
  for (const auto& r : relations) {
    for (const auto* label : {&r.organism.label, &r.chemical.label}) {
      if (label->find(';') != std::string::npos) {
        throw DataError(fmt::format("label '{}' contains ';' and cannot be linearised", *label));
      }
    }
    if (!out.empty()) out += kSeparator;
    out += r.organism.label;
    out += kVerb;
    out += r.chemical.label;
  }
  return out;
}

ParsedOutput parse_output(std::string_view text) {
  ParsedOutput out;
  for (const auto& clause : text::split(text, ';')) {
    const auto trimmed = text::trim(clause);
    if (trimmed.empty()) continue;
    // Match the verb against the padded clause so a trimmed edge still counts.
    const std::string padded = " " + std::string(trimmed) + " ";
    const auto at = padded.find(kVerb);
    if (at == std::string::npos) {
      ++out.malformed;
      continue;
    }
    const auto head = text::trim(std::string_view(padded).substr(0, at));
    const auto tail = text::trim(std::string_view(padded).substr(at + kVerb.size()));
    if (head.empty() || tail.empty()) {
      ++out.malformed;
      continue;
    }
    out.pairs.insert({std::string(head), std::string(tail)});
  }
  return out;
}

Matching matching_from_string(std::string_view s) {
  if (s == "exact") return Matching::exact;
  if (s == "casefold") return Matching::casefold;
  throw UsageError(fmt::format("unknown matching mode '{}' (expected exact or casefold)", s));
}

std::string_view to_string(Matching m) { return m == Matching::exact ? "exact" : "casefold"; }

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

std::string normalize(std::string_view s, Matching m) {
  return m == Matching::exact ? std::string(text::trim(s)) : text::fold_key(s);
}

RelationPair normalize(const RelationPair& p, Matching m) {
  return {normalize(p.organism, m), normalize(p.chemical, m)};
}

}  // namespace

double Counts::precision() const { return ratio(tp, tp + fp); }
double Counts::recall() const { return ratio(tp, tp + fn); }
double Counts::f1() const { return harmonic(precision(), recall()); }

Counts& Counts::operator+=(const Counts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

ScoreReport score(const std::vector<GoldDocument>& gold, const std::vector<PredictedDocument>& pred,
                  const ScoreOptions& options) {
  std::map<std::string, const PredictedDocument*> by_id;
  for (const auto& p : pred) {
    if (!by_id.emplace(p.doc_id, &p).second) {
      throw DataError(fmt::format("duplicate document '{}' in predictions", p.doc_id));
    }
  }
  std::set<std::string> gold_ids;
  for (const auto& g : gold) {
    if (!gold_ids.insert(g.doc_id).second) {
      throw DataError(fmt::format("duplicate document '{}' in gold", g.doc_id));
    }
  }
  for (const auto& p : pred) {
    if (!gold_ids.contains(p.doc_id)) {
      throw DataError(fmt::format("predictions for document '{}' which is not in the gold set", p.doc_id));
    }
  }

  ScoreReport report;
  double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
  for (const auto& g : gold) {
    std::set<RelationPair> gold_pairs;
    std::set<RelationPair> ignored;
    for (const auto& r : g.relations) {
      auto p = normalize(RelationPair{r.organism, r.chemical}, options.matching);
      (options.ignore_classes && r.chemical_is_class ? ignored : gold_pairs).insert(std::move(p));
    }
    DocumentScore ds;
    ds.doc_id = g.doc_id;
    std::set<RelationPair> pred_pairs;
    if (const auto it = by_id.find(g.doc_id); it != by_id.end()) {
      ds.predicted = true;
      ds.malformed = it->second->malformed;
      for (const auto& p : it->second->pairs) {
        auto n = normalize(p, options.matching);
        if (!gold_pairs.contains(n) && ignored.contains(n)) continue;
        pred_pairs.insert(std::move(n));
      }
    }
    for (const auto& p : pred_pairs) (gold_pairs.contains(p) ? ds.counts.tp : ds.counts.fp) += 1;
    ds.counts.fn = gold_pairs.size() - ds.counts.tp;
    report.micro += ds.counts;
    report.malformed += ds.malformed;
    sum_p += ds.counts.precision();
    sum_r += ds.counts.recall();
    sum_f += ds.counts.f1();
    report.per_document.push_back(std::move(ds));
  }
  if (!gold.empty()) {
    const auto n = static_cast<double>(gold.size());
    report.macro = {sum_p / n, sum_r / n, sum_f / n};
  }
  return report;
}

double keyword_precision(const std::map<std::string, std::vector<std::string>>& predicted,
                         const std::map<std::string, std::vector<std::string>>& gold,
                         std::size_t k) {
  if (k < 1) throw UsageError("k must be at least 1");
  std::size_t hits = 0;
  std::size_t made = 0;
  for (const auto& [doc, preds] : predicted) {
    std::set<std::string> reference;
    if (const auto it = gold.find(doc); it != gold.end()) {
      for (const auto& g : it->second) reference.insert(text::fold_key(g));
    }
    const auto n = std::min(k, preds.size());
    made += n;
    for (std::size_t i = 0; i < n; ++i) {
      if (reference.contains(text::fold_key(preds[i]))) ++hits;
    }
  }
  return ratio(hits, made);
}

json to_json(const ScoreReport& report, bool per_document) {
  auto counts = [](const Counts& c) {
    return json{{"true_positives", c.tp}, {"false_positives", c.fp}, {"false_negatives", c.fn},
                {"precision", c.precision()}, {"recall", c.recall()}, {"f1", c.f1()}};
  };
  json j = counts(report.micro);
  j["macro"] = {{"precision", report.macro.precision},
                {"recall", report.macro.recall},
                {"f1", report.macro.f1}};
  j["malformed_clauses"] = report.malformed;
  j["documents"] = report.per_document.size();
  if (per_document) {
    json docs = json::array();
    for (const auto& d : report.per_document) {
      auto e = counts(d.counts);
      e["doc_id"] = d.doc_id;
      e["predicted"] = d.predicted;
      e["malformed_clauses"] = d.malformed;
      docs.push_back(std::move(e));
    }
    j["per_document"] = std::move(docs);
  }
  return j;
}

namespace {

std::string side_label(const json& rel, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    if (!rel.contains(key)) continue;
    const auto& v = rel.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_object()) {
      for (const char* field : {"label", "name", "text"}) {
        if (v.contains(field) && v.at(field).is_string()) return v.at(field).get<std::string>();
      }
    }
  }
  throw DataError(fmt::format("relation {} has no {} label", rel.dump(), *keys.begin()));
}

bool chemical_is_class(const json& rel) {
  if (rel.contains("chemical_class") && rel.at("chemical_class").is_boolean()) {
    return rel.at("chemical_class").get<bool>();
  }
  for (const char* key : {"chemical", "object"}) {
    if (!rel.contains(key) || !rel.at(key).is_object()) continue;
    const auto& c = rel.at(key);
    if (c.contains("kind") && c.at("kind") == "chemical_class") return true;
    if (c.contains("is_class") && c.at("is_class").is_boolean()) return c.at("is_class").get<bool>();
  }
  return false;
}

GoldDocument gold_document(std::string id, const json& doc) {
  GoldDocument g;
  g.doc_id = std::move(id);
  const json* rels = nullptr;
  if (doc.is_array()) {
    rels = &doc;
  } else {
    for (const char* key : {"relations", "triplets"}) {
      if (doc.contains(key)) {
        rels = &doc.at(key);
        break;
      }
    }
  }
  if (rels == nullptr || !rels->is_array()) {
    throw DataError(fmt::format("gold document '{}' has no relation list", g.doc_id));
  }
  for (const auto& r : *rels) {
    g.relations.push_back({side_label(r, {"organism", "subject"}),
                           side_label(r, {"chemical", "object"}), chemical_is_class(r)});
  }
  return g;
}

std::string doc_id_of(const json& doc) {
  for (const char* key : {"doc_id", "id", "pmid"}) {
    if (!doc.contains(key)) continue;
    const auto& v = doc.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
  }
  throw DataError("gold document without an id");
}

}  // namespace

std::vector<GoldDocument> gold_from_json(const json& j) {
  std::vector<GoldDocument> out;
  try {
    if (j.is_array()) {
      for (const auto& doc : j) out.push_back(gold_document(doc_id_of(doc), doc));
    } else if (j.is_object() && j.contains("documents") && j.at("documents").is_array()) {
      return gold_from_json(j.at("documents"));
    } else if (j.is_object()) {
      for (const auto& [id, doc] : j.items()) out.push_back(gold_document(id, doc));
    } else {
      throw DataError("gold file must hold an array or an object of documents");
    }
  } catch (const json::exception& e) {
    throw DataError(fmt::format("invalid gold file: {}", e.what()));
  }
  return out;
}

std::vector<GoldDocument> load_gold(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open gold file '{}'", path.string()));
  try {
    return gold_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw DataError(fmt::format("gold file '{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

std::vector<GoldDocument> gold_from_corpus(const Corpus& corpus) {
  std::vector<GoldDocument> out;
  for (const auto& d : corpus.documents) {
    GoldDocument g{d.id, {}};
    for (const auto& r : d.relations) {
      g.relations.push_back({r.organism.label, r.chemical.label,
                             r.chemical.kind == EntityKind::chemical_class});
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<PredictedDocument> read_predictions_jsonl(std::istream& in) {
  std::vector<PredictedDocument> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      const auto& id = j.at("doc_id");
      PredictedDocument p;
      p.doc_id = id.is_string() ? id.get<std::string>() : std::to_string(id.get<long long>());
      auto parsed = parse_output(j.at("output").get<std::string>());
      p.pairs = std::move(parsed.pairs);
      p.malformed = parsed.malformed;
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw DataError(fmt::format("line {}: invalid prediction: {}", line_no, e.what()));
    }
  }
  return out;
}

}  // namespace divsample
