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

#include "divsample/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "divsample/error.hpp"

namespace divsample {

using nlohmann::json;

namespace {

ParetoCurve pareto(const std::map<std::string, std::size_t>& counts, std::size_t total) {
  std::vector<std::size_t> sorted;
  sorted.reserve(counts.size());
  for (const auto& [_, c] : counts) sorted.push_back(c);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  ParetoCurve curve;
  curve.reserve(sorted.size());
  std::size_t cum = 0;
  const auto n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cum += sorted[i];
    curve.emplace_back(static_cast<double>(i + 1) / n,
                       static_cast<double>(cum) / static_cast<double>(total));
  }
  if (!curve.empty()) curve.back() = {1.0, 1.0};
  return curve;
}

std::map<std::size_t, std::size_t> histogram(const std::map<std::string, std::size_t>& counts) {
  std::map<std::size_t, std::size_t> h;
  for (const auto& [_, c] : counts) ++h[c];
  return h;
}

json curve_json(const ParetoCurve& c) {
  json a = json::array();
  for (const auto& [x, y] : c) a.push_back({x, y});
  return a;
}

json histogram_json(const std::map<std::size_t, std::size_t>& h) {
  json o = json::object();
  for (const auto& [k, v] : h) o[std::to_string(k)] = v;
  return o;
}

const std::vector<std::string> kMetrics{"n_documents", "n_relations", "distinct_organisms",
                                        "distinct_chemicals", "distinct_relations"};

std::map<std::string, double> metrics(const DiversityStats& s) {
  return {{"n_documents", static_cast<double>(s.n_documents)},
          {"n_relations", static_cast<double>(s.n_relations)},
          {"distinct_organisms", static_cast<double>(s.distinct_organisms)},
          {"distinct_chemicals", static_cast<double>(s.distinct_chemicals)},
          {"distinct_relations", static_cast<double>(s.distinct_relations)}};
}

}  // namespace

DiversityStats diversity_stats(const Corpus& corpus) {
  if (corpus.empty()) throw DataError("cannot compute statistics of an empty corpus");
  DiversityStats s;
  s.n_documents = corpus.documents.size();
  std::map<std::string, std::size_t> organisms;
  std::map<std::string, std::size_t> chemicals;
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& d : corpus.documents) {
    for (const auto& r : d.relations) {
      ++organisms[r.organism.id];
      ++chemicals[r.chemical.id];
      pairs.emplace(r.organism.id, r.chemical.id);
      ++s.n_relations;
    }
  }
  s.distinct_organisms = organisms.size();
  s.distinct_chemicals = chemicals.size();
  s.distinct_relations = pairs.size();
  s.organism_curve = pareto(organisms, s.n_relations);
  s.chemical_curve = pareto(chemicals, s.n_relations);
  s.organism_histogram = histogram(organisms);
  s.chemical_histogram = histogram(chemicals);
  return s;
}

double share_at(const ParetoCurve& curve, double fraction) {
  if (curve.empty()) return 0.0;
  if (!(fraction > 0.0)) return 0.0;
  const auto n = static_cast<double>(curve.size());
  auto k = static_cast<std::size_t>(std::ceil(fraction * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, curve.size());
  return curve[k - 1].second;
}

json to_json(const DiversityStats& s, bool include_curves) {
  json j{{"n_documents", s.n_documents},
         {"n_relations", s.n_relations},
         {"distinct_organisms", s.distinct_organisms},
         {"distinct_chemicals", s.distinct_chemicals},
         {"distinct_relations", s.distinct_relations},
         {"organisms_top20_share", share_at(s.organism_curve, 0.2)},
         {"chemicals_top20_share", share_at(s.chemical_curve, 0.2)},
         {"organism_histogram", histogram_json(s.organism_histogram)},
         {"chemical_histogram", histogram_json(s.chemical_histogram)}};
  if (include_curves) {
    j["organism_curve"] = curve_json(s.organism_curve);
    j["chemical_curve"] = curve_json(s.chemical_curve);
  }
  return j;
}

std::vector<SampleRow> compare_samples(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& samples,
    const Corpus& corpus) {
  std::map<std::string_view, const Document*> by_id;
  for (const auto& d : corpus.documents) by_id.emplace(d.id, &d);

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::map<std::string, double>>> families;
  for (const auto& [name, ids] : samples) {
    std::vector<Document> docs;
    std::set<std::string> seen;
    for (const auto& id : ids) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw DataError(fmt::format("sample '{}' names unknown document '{}'", name, id));
      }
      if (seen.insert(id).second) docs.push_back(*it->second);
    }
    if (docs.empty()) throw DataError(fmt::format("sample '{}' is empty", name));
    const auto hash = name.find('#');
    const auto family = hash == std::string::npos ? name : name.substr(0, hash);
    auto [fam, inserted] = families.try_emplace(family);
    if (inserted) order.push_back(family);
    fam->second.push_back(metrics(diversity_stats(Corpus::from_documents(std::move(docs)))));
  }

  std::vector<SampleRow> rows;
  for (const auto& family : order) {
    const auto& members = families[family];
    SampleRow row;
    row.name = family;
    row.members = members.size();
    const auto n = static_cast<double>(members.size());
    for (const auto& metric : kMetrics) {
      double sum = 0.0;
      for (const auto& m : members) sum += m.at(metric);
      const double mean = sum / n;
      double ss = 0.0;
      for (const auto& m : members) ss += (m.at(metric) - mean) * (m.at(metric) - mean);
      row.mean[metric] = mean;
      row.stddev[metric] = members.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const std::vector<SampleRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json j{{"name", r.name}, {"samples", r.members}};
    for (const auto& metric : kMetrics) {
      if (r.members > 1) {
        j[metric] = {{"mean", r.mean.at(metric)}, {"stddev", r.stddev.at(metric)}};
      } else {
        j[metric] = r.mean.at(metric);
      }
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::string to_table(const std::vector<SampleRow>& rows) {
  std::string out = "sample";
  for (const auto& metric : kMetrics) out += "\t" + metric;
  out += '\n';
  for (const auto& r : rows) {
    out += r.name;
    for (const auto& metric : kMetrics) {
      if (r.members > 1) {
        out += fmt::format("\t{:.2f} ± {:.2f}", r.mean.at(metric), r.stddev.at(metric));
      } else {
        out += fmt::format("\t{:.0f}", r.mean.at(metric));
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace divsample
