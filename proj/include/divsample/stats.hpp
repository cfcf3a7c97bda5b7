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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "divsample/corpus.hpp"

namespace divsample {

/// (fraction of entities, cumulative fraction of relations), entities in
/// descending order of relation count. Ends at (1, 1).
using ParetoCurve = std::vector<std::pair<double, double>>;

struct DiversityStats {
  std::size_t n_documents = 0;
  std::size_t n_relations = 0;  // repeated pairs in distinct documents count separately
  std::size_t distinct_organisms = 0;
  std::size_t distinct_chemicals = 0;
  std::size_t distinct_relations = 0;
  ParetoCurve organism_curve;
  ParetoCurve chemical_curve;
  /// relation count -> number of entities with that count
  std::map<std::size_t, std::size_t> organism_histogram;
  std::map<std::size_t, std::size_t> chemical_histogram;
};

/// Throws DataError on an empty corpus.
DiversityStats diversity_stats(const Corpus& corpus);

/// Share of relations held by the top ceil(fraction * n) entities.
double share_at(const ParetoCurve& curve, double fraction);

nlohmann::json to_json(const DiversityStats& s, bool include_curves = true);

struct SampleRow {
  std::string name;
  std::size_t members = 1;  // samples aggregated into this row
  std::map<std::string, double> mean;
  std::map<std::string, double> stddev;  // sample standard deviation, 0 for single samples
};

/// Per named sample, diversity statistics of the documents it selects.
/// Names of the form "family#i" are pooled into one "family" row reported
/// as mean and standard deviation. Throws DataError naming any id missing
/// from the corpus.
std::vector<SampleRow> compare_samples(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& samples,
    const Corpus& corpus);

nlohmann::json to_json(const std::vector<SampleRow>& rows);
std::string to_table(const std::vector<SampleRow>& rows);

}  // namespace divsample
