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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "divsample/corpus.hpp"
#include "divsample/kernels.hpp"
#include "divsample/score.hpp"
#include "divsample/verbalise.hpp"

namespace divsample {

enum class SamplerStrategy { gme, random, top };
SamplerStrategy sampler_strategy_from_string(std::string_view s);
std::string_view to_string(SamplerStrategy s);

struct PipelineConfig {
  std::uint64_t seed = 0;

  struct {
    std::filesystem::path path;
    CorpusFormat format = CorpusFormat::tsv;
    StratumRule stratum_rule = StratumRule::majority;
    std::optional<std::filesystem::path> synonyms;
    std::optional<std::filesystem::path> keywords;
    std::optional<std::filesystem::path> annotations;
  } corpus;

  PreprocessOptions preprocess;

  struct {
    SamplerStrategy strategy = SamplerStrategy::gme;
    std::size_t n = 500;
    kernels::Execution execution = kernels::Execution::parallel;
    std::string top_criterion = "relations";
  } sampler;

  struct {
    TransformationConfig transformations;
    std::size_t m = 10;
    std::string template_id = "abstract_v1";
    std::filesystem::path templates_dir;
  } verbalise;

  struct {
    std::string backend = "mock";
    std::size_t timeout_ms = 120000;
    std::size_t max_attempts = 3;
    std::size_t parallelism = 4;
    int max_tokens = 512;
  } generate;

  struct {
    std::size_t k = 3;
    double q = 1.0;
  } select;

  struct {
    double split_ratio = 0.9;
  } assemble;

  struct {
    Matching matching = Matching::casefold;
    bool ignore_classes = false;
    std::optional<std::filesystem::path> gold;
    std::optional<std::filesystem::path> predictions;
  } score;

  std::filesystem::path output_dir = "run";

  /// Throws UsageError on out-of-range values.
  void validate() const;
};

/// Parses a pipeline config. Relative paths resolve against base_dir.
/// Unknown sections or keys are rejected with UsageError; TOML syntax errors
/// raise UsageError with the source position.
PipelineConfig parse_pipeline_config(std::string_view toml_text, const std::filesystem::path& base_dir,
                                     std::string_view source = "config");
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Reads the transformation keys (p_class_replace, p_contract, p_shuffle,
/// p_number, p_direction, temperatures, rng_seed) from the top level or from
/// a [verbalise] table.
TransformationConfig parse_transformation_config(std::string_view toml_text,
                                                 std::string_view source = "config");
TransformationConfig load_transformation_config(const std::filesystem::path& path);

/// Canonical serialization. Paths are left out so that a config moved to
/// another directory serializes identically; inputs are identified by
/// content hashes in the run manifest instead.
nlohmann::json to_json(const PipelineConfig& c);

}  // namespace divsample
