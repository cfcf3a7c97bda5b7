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

#include "divsample/kernels.hpp"

#include <limits>

#include <fmt/format.h>

#include "divsample/error.hpp"

namespace divsample::kernels {

Execution execution_from_string(std::string_view s) {
  if (s == "serial") return Execution::serial;
  if (s == "parallel" || s == "openmp") return Execution::parallel;
  throw UsageError(fmt::format("unknown execution mode '{}'", s));
}

namespace {

inline double score_one(const EntropyState& state, const DocumentProfile& doc,
                        UtopianPoint utopia) {
  return utopian_distance(state.peek(doc), utopia.h_organisms, utopia.h_chemicals);
}

}  // namespace

void score_candidates_serial(const EntropyState& state, std::span<const DocumentProfile> profiles,
                             std::span<const std::uint32_t> candidates, UtopianPoint utopia,
                             std::span<double> distances) {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    distances[i] = score_one(state, profiles[candidates[i]], utopia);
  }
}

void score_candidates_parallel(const EntropyState& state,
                               std::span<const DocumentProfile> profiles,
                               std::span<const std::uint32_t> candidates, UtopianPoint utopia,
                               std::span<double> distances) {
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(static) if (n > 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    distances[i] = score_one(state, profiles[candidates[i]], utopia);
  }
}

std::size_t select_best_serial(std::span<const double> distances,
                               std::span<const std::uint32_t> candidates,
                               std::span<const std::uint32_t> tie_rank, double tolerance) {
  double best = std::numeric_limits<double>::infinity();
  for (const double d : distances) best = d < best ? d : best;
  const double cutoff = best + tolerance;
  std::size_t winner = 0;
  std::uint32_t winner_rank = std::numeric_limits<std::uint32_t>::max();
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const auto rank = tie_rank[candidates[i]];
    if (distances[i] <= cutoff && rank < winner_rank) {
      winner = i;
      winner_rank = rank;
    }
  }
  return winner;
}

std::size_t select_best_parallel(std::span<const double> distances,
                                 std::span<const std::uint32_t> candidates,
                                 std::span<const std::uint32_t> tie_rank, double tolerance) {
  const auto n = static_cast<std::ptrdiff_t>(distances.size());
  double best = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : best) schedule(static) if (n > 4096)
  for (std::ptrdiff_t i = 0; i < n; ++i) best = distances[i] < best ? distances[i] : best;

  const double cutoff = best + tolerance;
  std::uint32_t winner_rank = std::numeric_limits<std::uint32_t>::max();
#pragma omp parallel for reduction(min : winner_rank) schedule(static) if (n > 4096)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto rank = tie_rank[candidates[i]];
    if (distances[i] <= cutoff && rank < winner_rank) winner_rank = rank;
  }
  // Tie ranks are unique, so exactly one position carries the winning rank.
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (tie_rank[candidates[i]] == winner_rank) return static_cast<std::size_t>(i);
  }
  return 0;
}

}  // namespace divsample::kernels
