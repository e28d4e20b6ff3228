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

#pragma once

// Monte Carlo photon counting: turns exact outcome distributions into SPCM
// count records (singles on detectors A and B, coincidences).

#include <cstdint>
#include <string>
#include <vector>

#include "noonsim/experiment.hpp"

namespace noonsim {

struct DetectorSpec {
  double efficiency_a = 0.6;
  double efficiency_b = 0.6;
  double dark_rate_per_s = 100.0;
  double window_ns = 10.0;

  void validate() const;
};

struct CountRecord {
  double delta_nm = 0.0;
  std::int64_t counts_a = 0;
  std::int64_t counts_b = 0;
  std::int64_t coincidences = 0;
  double duration_s = 0.0;

  bool operator==(const CountRecord&) const = default;
};

struct CoincidenceTrace {
  std::vector<CountRecord> records;
  std::uint64_t seed = 0;
  std::string config_digest;
  double wavelength_nm = 0.0;

  std::vector<double> delta_nm() const;
  std::vector<double> coincidences() const;
  std::vector<double> counts_a() const;
  std::vector<double> counts_b() const;
  /// Throws ValidationError unless deltas increase strictly and every record
  /// has coincidences <= min(counts_a, counts_b).
  void validate() const;

  bool operator==(const CoincidenceTrace&) const = default;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
/// Counter-based per-point seed: depends only on (master seed, index).
std::uint64_t point_seed(std::uint64_t master_seed, std::uint64_t index);

/// One integration window. Pair events arrive as Poisson(rate * duration);
/// each event draws (n3, n4) from `dist`, each photon is detected with the
/// detector efficiency, and a detector clicks when it sees at least one photon.
/// Dark counts are independent Poisson streams; accidental coincidences have
/// mean counts_a * counts_b * 2 window / duration.
CountRecord sample_record(const OutcomeDistribution& dist, double pair_rate_per_s, double duration_s,
                          const DetectorSpec& detectors, std::uint64_t seed, double delta_nm = 0.0);

/// Mean singles and coincidences for one point (accidentals excluded).
struct ExpectedCounts {
  double counts_a = 0.0;
  double counts_b = 0.0;
  double coincidences = 0.0;
};
ExpectedCounts expected_counts(const OutcomeDistribution& dist, double pair_rate_per_s, double duration_s,
                               const DetectorSpec& detectors);

/// Samples every point of an exact scan (OpenMP over points).
CoincidenceTrace sample_trace(const ScanResult& scan, double pair_rate_per_s, double duration_s,
                              const DetectorSpec& detectors, std::uint64_t seed);
/// Single-threaded reference; bit-identical to sample_trace.
CoincidenceTrace sample_trace_serial(const ScanResult& scan, double pair_rate_per_s, double duration_s,
                                     const DetectorSpec& detectors, std::uint64_t seed);

/// run_scan_exact followed by sample_trace. The trace carries the seed and
/// wavelength; the config digest is left for the caller to fill.
CoincidenceTrace generate_trace(const InterferometerSpec& spec, const SourceModel& source,
                                const DetectorSpec& detectors, double duration_per_point_s, std::uint64_t seed);
CoincidenceTrace generate_trace_serial(const InterferometerSpec& spec, const SourceModel& source,
                                       const DetectorSpec& detectors, double duration_per_point_s,
                                       std::uint64_t seed);

}  // namespace noonsim
