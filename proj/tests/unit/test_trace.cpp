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

#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "divsample/sampler.hpp"
#include "oracles.hpp"

using namespace divsample;

namespace {

SamplerTrace trace_of(const std::vector<double>& ho, const std::vector<double>& hc = {}) {
  SamplerTrace t;
  for (std::size_t i = 0; i < ho.size(); ++i) {
    t.steps.push_back({i + 1, "d" + std::to_string(i), "S", ho[i], hc.empty() ? ho[i] : hc[i], 0.0});
  }
  return t;
}

std::vector<double> random_concave(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const std::size_t n = 5 + rng() % 60;
  std::vector<double> steps(n - 1);
  for (auto& s : steps) s = u(rng);
  std::sort(steps.rbegin(), steps.rend());
  std::vector<double> y{u(rng)};
  for (double s : steps) y.push_back(y.back() + s);
  return y;
}

}  // namespace

TEST_CASE("geometric fixture") {
  const std::vector<double> y{1, 1.5, 1.75, 1.875, 1.9375};
  // Chord distances after normalization are 0, 0.283, 0.300, 0.183, 0:
  // the largest is at index 2.
  CHECK(oracle::knee(y) == std::size_t{2});
  CHECK(knee_index(y) == 2);
  const auto r = detect_knee(trace_of(y), Curve::organisms);
  CHECK(r.rank == 3);
  CHECK(r.entropy_at_knee == 1.75);
  CHECK(r.curve == Curve::organisms);
}

TEST_CASE("no knee") {
  CHECK_THROWS_AS(knee_index(std::vector<double>{1, 2, 3, 4, 5}), NoKneeError);
  CHECK_THROWS_AS(knee_index(std::vector<double>{2, 2, 2}), NoKneeError);
  CHECK_THROWS_AS(knee_index(std::vector<double>{1, 2}), DataError);
  CHECK_FALSE(oracle::knee({1, 2, 3, 4, 5}).has_value());
}

TEST_CASE("knee agrees with the chord oracle and is affine invariant") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> a(0.01, 50.0), b(-10.0, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto y = random_concave(rng);
    const auto expected = oracle::knee(y);
    if (!expected) continue;
    CHECK(knee_index(y) == *expected);
    std::vector<double> z(y);
    const double s = a(rng), t = b(rng);
    for (auto& v : z) v = s * v + t;
    CHECK(knee_index(z) == *expected);
  }
}

TEST_CASE("percent of max") {
  const auto t = trace_of({0.5, 1.0, 2.0, 1.5});
  CHECK(percent_of_max(t, 3, Curve::organisms) == 100.0);
  CHECK(percent_of_max(t, 1, Curve::organisms) == 25.0);
  CHECK_THROWS_AS(percent_of_max(t, 0, Curve::organisms), DataError);
  CHECK_THROWS_AS(percent_of_max(t, 5, Curve::organisms), DataError);
  CHECK_THROWS_AS(percent_of_max(trace_of({0, 0, 0}), 2, Curve::chemicals), DataError);
  const auto mono = trace_of({0.1, 0.4, 0.6, 0.65, 0.7});
  for (std::size_t r = 2; r <= 5; ++r) {
    CHECK(percent_of_max(mono, r, Curve::chemicals) >= percent_of_max(mono, r - 1, Curve::chemicals));
  }
}

TEST_CASE("trace CSV round trip") {
  auto t = trace_of({0.0, 0.693147181, 1.098612289}, {0.0, 1.0, 1.5});
  for (auto& s : t.steps) s.distance = 0.123456789;
  std::stringstream out;
  write_trace_csv(t, out);
  CHECK(out.str().starts_with("rank,doc_id,stratum,h_organisms,h_chemicals,distance\n"));
  CHECK(out.str().find("2,d1,S,0.693147181,1.000000000,0.123456789") != std::string::npos);
  const auto back = read_trace_csv(out);
  REQUIRE(back.count("S") == 1);
  CHECK(back.at("S").size() == 3);
  CHECK(back.at("S").steps[2].h_chemicals == 1.5);
}

TEST_CASE("analysis report") {
  std::map<std::string, SamplerTrace> traces{{"S", trace_of({1, 1.5, 1.75, 1.875, 1.9375})}};
  TraceAnalysisOptions o;
  o.percent_ranks = {1, 5, 9};
  const auto j = analyze_traces(traces, o);
  const auto& s = j["strata"]["S"]["organisms"];
  CHECK(s["knee"]["rank"] == 3);
  CHECK(s["max"]["rank"] == 5);
  CHECK(s["percent_of_max"]["5"].get<double>() == 100.0);
  CHECK(s["percent_of_max"]["9"].is_null());
}
