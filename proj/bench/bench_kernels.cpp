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

// Serial reference against the OpenMP kernels on Zipf corpora.

#include <numeric>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "divsample/entropy.hpp"
#include "divsample/kernels.hpp"
#include "divsample/sampler.hpp"
#include "generators.hpp"

using namespace divsample;

namespace {

struct Fixture {
  Corpus corpus;
  CorpusIndex index;
  EntropyState state;
  std::vector<std::uint32_t> candidates;
  kernels::UtopianPoint utopia;

  explicit Fixture(std::size_t n_docs)
      : corpus(make(n_docs)),
        index(CorpusIndex::build(corpus)),
        state(index.organisms.size(), index.chemicals.size()),
        candidates(index.profiles.size()) {
    std::iota(candidates.begin(), candidates.end(), 0u);
    utopia = {std::log(double(index.organisms.size())), std::log(double(index.chemicals.size()))};
    // Partial sample so the scored state is not empty.
    for (std::size_t i = 0; i < index.profiles.size(); i += 10) state.apply(index.profiles[i]);
  }

  static Corpus make(std::size_t n) {
    std::mt19937_64 rng(42);
    return gen::zipf_corpus(rng, n, n / 2 + 10, n * 2 + 10);
  }
};

const Fixture& fixture(std::size_t n) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.try_emplace(n, n).first;
  return it->second;
}

void BM_ScoreCandidates(benchmark::State& st, kernels::Execution ex) {
  const auto& f = fixture(std::size_t(st.range(0)));
  std::vector<double> distances(f.candidates.size());
  for (auto _ : st) {
    kernels::score_candidates(ex, f.state, f.index.profiles, f.candidates, f.utopia, distances);
    benchmark::DoNotOptimize(distances.data());
  }
  st.SetItemsProcessed(std::int64_t(st.iterations()) * std::int64_t(f.candidates.size()));
}

void BM_GmeSample(benchmark::State& st, kernels::Execution ex) {
  const auto& f = fixture(std::size_t(st.range(0)));
  GmeOptions o;
  o.execution = ex;
  o.limit = 200;
  for (auto _ : st) benchmark::DoNotOptimize(gme_sample(f.corpus, o));
}

}  // namespace

BENCHMARK_CAPTURE(BM_ScoreCandidates, serial, kernels::Execution::serial)->Arg(2000)->Arg(20000)->Arg(100000);
BENCHMARK_CAPTURE(BM_ScoreCandidates, parallel, kernels::Execution::parallel)->Arg(2000)->Arg(20000)->Arg(100000);
BENCHMARK_CAPTURE(BM_GmeSample, serial, kernels::Execution::serial)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_GmeSample, parallel, kernels::Execution::parallel)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
