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

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "divsample/sampler.hpp"

namespace divsample {

using nlohmann::json;

std::string_view to_string(Curve c) { return c == Curve::organisms ? "organisms" : "chemicals"; }

namespace {

// Normalized distances below this are treated as a flat (knee-less) curve,
// and distances within it of the maximum as ties.
constexpr double kKneeTolerance = 1e-9;

double curve_value(const TraceStep& s, Curve c) {
  return c == Curve::organisms ? s.h_organisms : s.h_chemicals;
}

std::vector<double> curve_values(const SamplerTrace& trace, Curve c) {
  std::vector<double> y;
  y.reserve(trace.size());
  for (const auto& s : trace.steps) y.push_back(curve_value(s, c));
  return y;
}

}  // namespace

std::size_t knee_index(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 3) throw DataError(fmt::format("knee detection needs at least 3 points, got {}", n));
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) throw NoKneeError("no knee: the curve is flat");

  const double first = (y.front() - *lo) / span;
  const double last = (y.back() - *lo) / span;
  const double slope = last - first;
  const double norm = std::sqrt(1.0 + slope * slope);

  std::vector<double> dist(n);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    const double yn = (y[i] - *lo) / span;
    dist[i] = (yn - (first + slope * x)) / norm;
    best = std::max(best, dist[i]);
  }
  if (best <= kKneeTolerance) throw NoKneeError("no knee: the curve does not bend above its chord");
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i] >= best - kKneeTolerance) return i;
  }
  return 0;
}

KneeReport detect_knee(const SamplerTrace& trace, Curve curve, double sensitivity) {
  const auto y = curve_values(trace, curve);
  const auto i = knee_index(y);
  return {trace.steps[i].rank, y[i], curve, sensitivity};
}

double percent_of_max(const SamplerTrace& trace, std::size_t at_rank, Curve curve) {
  if (at_rank < 1 || at_rank > trace.size()) {
    throw DataError(fmt::format("rank {} is outside the trace (length {})", at_rank, trace.size()));
  }
  double max_h = 0.0;
  for (const auto& s : trace.steps) max_h = std::max(max_h, curve_value(s, curve));
  if (!(max_h > 0.0)) throw DataError("percent of max is undefined: maximal entropy is zero");
  return 100.0 * curve_value(trace.steps[at_rank - 1], curve) / max_h;
}

json analyze_traces(const std::map<std::string, SamplerTrace>& traces,
                    const TraceAnalysisOptions& options) {
  json strata = json::object();
  for (const auto& [name, trace] : traces) {
    json entry{{"n", trace.size()}};
    for (const auto curve : {Curve::organisms, Curve::chemicals}) {
      json c = json::object();
      if (!trace.empty()) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < trace.size(); ++i) {
          if (curve_value(trace.steps[i], curve) > curve_value(trace.steps[arg], curve)) arg = i;
        }
        c["max"] = {{"entropy", curve_value(trace.steps[arg], curve)},
                    {"rank", trace.steps[arg].rank}};
      }
      if (options.knee) {
        try {
          const auto knee = detect_knee(trace, curve, options.sensitivity);
          c["knee"] = {{"rank", knee.rank}, {"entropy", knee.entropy_at_knee}};
        } catch (const DataError& e) {
          c["knee"] = {{"error", e.what()}};
        }
      }
      if (!options.percent_ranks.empty()) {
        json pct = json::object();
        for (const auto r : options.percent_ranks) {
          const auto key = std::to_string(r);
          if (r < 1 || r > trace.size()) {
            pct[key] = nullptr;
            continue;
          }
          try {
            pct[key] = percent_of_max(trace, r, curve);
          } catch (const DataError&) {
            pct[key] = nullptr;
          }
        }
        c["percent_of_max"] = std::move(pct);
      }
      entry[std::string(to_string(curve))] = std::move(c);
    }
    strata[name] = std::move(entry);
  }
  return json{{"strata", std::move(strata)}};
}

}  // namespace divsample
