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
#include <span>
#include <string_view>

#include "divsample/entropy.hpp"

// Candidate-scoring kernels of the greedy sampler. Each step scores every
// remaining document against a frozen EntropyState and then reduces to a
// single winner. The serial versions are the reference the OpenMP versions
// are tested against; both produce identical results for any thread count.
namespace divsample::kernels {

enum class Execution { serial, parallel };

Execution execution_from_string(std::string_view s);

struct UtopianPoint {
  double h_organisms = 0.0;
  double h_chemicals = 0.0;
};

/// distances[i] = utopian distance of the sample extended by
/// profiles[candidates[i]].
void score_candidates_serial(const EntropyState& state, std::span<const DocumentProfile> profiles,
                             std::span<const std::uint32_t> candidates, UtopianPoint utopia,
                             std::span<double> distances);
void score_candidates_parallel(const EntropyState& state,
                               std::span<const DocumentProfile> profiles,
                               std::span<const std::uint32_t> candidates, UtopianPoint utopia,
                               std::span<double> distances);

/// Position of the winning candidate: among distances within `tolerance` of
/// the minimum, the one with the smallest tie_rank[candidates[i]].
std::size_t select_best_serial(std::span<const double> distances,
                               std::span<const std::uint32_t> candidates,
                               std::span<const std::uint32_t> tie_rank, double tolerance);
std::size_t select_best_parallel(std::span<const double> distances,
                                 std::span<const std::uint32_t> candidates,
                                 std::span<const std::uint32_t> tie_rank, double tolerance);

inline void score_candidates(Execution ex, const EntropyState& state,
                             std::span<const DocumentProfile> profiles,
                             std::span<const std::uint32_t> candidates, UtopianPoint utopia,
                             std::span<double> distances) {
  if (ex == Execution::parallel) {
    score_candidates_parallel(state, profiles, candidates, utopia, distances);
  } else {
    score_candidates_serial(state, profiles, candidates, utopia, distances);
  }
}

inline std::size_t select_best(Execution ex, std::span<const double> distances,
                               std::span<const std::uint32_t> candidates,
                               std::span<const std::uint32_t> tie_rank, double tolerance) {
  return ex == Execution::parallel
             ? select_best_parallel(distances, candidates, tie_rank, tolerance)
             : select_best_serial(distances, candidates, tie_rank, tolerance);
}

}  // namespace divsample::kernels
