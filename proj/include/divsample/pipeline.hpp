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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "divsample/config.hpp"

namespace divsample {

/// Hex SHA-256 of a file's bytes. Throws DataError when it cannot be read.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

struct PipelineResult {
  bool ok = true;
  std::string failed_stage;
  std::string error;
  int exit_code = 0;
  nlohmann::json manifest;
  std::filesystem::path manifest_path;
};

/// Runs preprocess, sample, verbalise, generate, select, assemble and score,
/// writing each stage's artifacts into config.output_dir and a manifest with
/// their SHA-256 hashes. A failing stage stops the run; the artifacts of the
/// stages before it are kept and the manifest records the failure.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace divsample
