// Copyright 2026 The noonsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// OpenMP kernels against their serial references on the default experiment.

#include <benchmark/benchmark.h>

#include "noonsim/config.hpp"
#include "noonsim/detection.hpp"
#include "noonsim/experiment.hpp"

namespace {

noonsim::InterferometerSpec spec_with_points(std::int64_t points) {
  noonsim::InterferometerSpec spec = noonsim::default_config().interferometer();
  spec.scan_nm = noonsim::uniform_scan(0.0, 25.0 * static_cast<double>(points - 1), 25.0);
  return spec;
}

void BM_ScanExactParallel(benchmark::State& state) {
  const auto spec = spec_with_points(state.range(0));
  const auto source = noonsim::default_config().source_model();
  for (auto _ : state) benchmark::DoNotOptimize(noonsim::run_scan_exact(spec, source));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScanExactSerial(benchmark::State& state) {
  const auto spec = spec_with_points(state.range(0));
  const auto source = noonsim::default_config().source_model();
  for (auto _ : state) benchmark::DoNotOptimize(noonsim::run_scan_exact_serial(spec, source));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool kParallel>
void BM_SampleTrace(benchmark::State& state) {
  const auto config = noonsim::default_config();
  const auto scan = noonsim::run_scan_exact(spec_with_points(state.range(0)), config.source_model());
  for (auto _ : state) {
    if constexpr (kParallel) {
      benchmark::DoNotOptimize(noonsim::sample_trace(scan, config.source.pair_rate_per_s,
                                                     config.duration_per_point_s, config.detectors, config.seed));
    } else {
      benchmark::DoNotOptimize(noonsim::sample_trace_serial(scan, config.source.pair_rate_per_s,
                                                            config.duration_per_point_s, config.detectors, config.seed));
    }
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_ScanExactParallel)->Arg(162)->Arg(1024);
BENCHMARK(BM_ScanExactSerial)->Arg(162)->Arg(1024);
BENCHMARK(BM_SampleTrace<true>)->Name("BM_SampleTraceParallel")->Arg(162)->Arg(1024);
BENCHMARK(BM_SampleTrace<false>)->Name("BM_SampleTraceSerial")->Arg(162)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
