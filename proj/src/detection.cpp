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

#include "noonsim/detection.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

#include "noonsim/error.hpp"

namespace noonsim {

namespace {

constexpr double kDistributionTolerance = 1e-9;

std::int64_t draw_poisson(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

std::int64_t draw_binomial(std::mt19937_64& rng, std::int64_t trials, double p) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  return std::binomial_distribution<std::int64_t>(trials, p)(rng);
}

// Probability that a non-number-resolving detector clicks on n photons.
double click_probability(int photons, double efficiency) {
  return 1.0 - std::pow(1.0 - efficiency, photons);
}

void check_distribution(const OutcomeDistribution& dist) {
  double total = 0.0;
  for (const auto& [counts, p] : dist.probabilities) {
    if (counts.first < 0 || counts.second < 0) throw ValidationError("outcome with negative photon number");
    if (!(p >= -kDistributionTolerance)) throw ValidationError("outcome distribution has a negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kDistributionTolerance) {
    throw ValidationError("outcome distribution sums to " + std::to_string(total) + ", not 1");
  }
}

}  // namespace

void DetectorSpec::validate() const {
  if (!(efficiency_a >= 0.0 && efficiency_a <= 1.0) || !(efficiency_b >= 0.0 && efficiency_b <= 1.0)) {
    throw ValidationError("detector efficiency must lie in [0, 1]");
  }
  if (!(dark_rate_per_s >= 0.0) || !std::isfinite(dark_rate_per_s)) {
    throw ValidationError("dark rate must be finite and >= 0");
  }
  if (!(window_ns > 0.0)) throw ValidationError("coincidence window must be positive");
}

std::vector<double> CoincidenceTrace::delta_nm() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.delta_nm);
  return out;
}

std::vector<double> CoincidenceTrace::coincidences() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(static_cast<double>(r.coincidences));
  return out;
}

std::vector<double> CoincidenceTrace::counts_a() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(static_cast<double>(r.counts_a));
  return out;
}

std::vector<double> CoincidenceTrace::counts_b() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(static_cast<double>(r.counts_b));
  return out;
}

void CoincidenceTrace::validate() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.counts_a < 0 || r.counts_b < 0 || r.coincidences < 0) {
      throw ValidationError("record " + std::to_string(i) + " has negative counts");
    }
    if (r.coincidences > std::min(r.counts_a, r.counts_b)) {
      throw ValidationError("record " + std::to_string(i) + " has more coincidences than singles");
    }
    if (i > 0 && !(r.delta_nm > records[i - 1].delta_nm)) {
      throw ValidationError("trace deltas must be strictly increasing (record " + std::to_string(i) + ")");
    }
  }
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t point_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(mix64(master_seed) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

CountRecord sample_record(const OutcomeDistribution& dist, double pair_rate_per_s, double duration_s,
                          const DetectorSpec& detectors, std::uint64_t seed, double delta_nm) {
  detectors.validate();
  check_distribution(dist);
  if (!(pair_rate_per_s >= 0.0) || !(duration_s > 0.0)) {
    throw ValidationError("pair rate must be >= 0 and duration > 0");
  }

  std::mt19937_64 rng(seed);
  CountRecord rec;
  rec.delta_nm = delta_nm;
  rec.duration_s = duration_s;

  // Poisson splitting: the event count of each outcome class is an independent
  // Poisson variable, and within a class the events split multinomially into
  // (both click, only A, only B, neither). Same law as per-event sampling.
  const double events = pair_rate_per_s * duration_s;
  for (const auto& [counts, p] : dist.probabilities) {
    const std::int64_t m = draw_poisson(rng, events * std::max(p, 0.0));
    const double pa = click_probability(counts.first, detectors.efficiency_a);
    const double pb = click_probability(counts.second, detectors.efficiency_b);
    const double p_both = pa * pb;
    const std::int64_t both = draw_binomial(rng, m, p_both);
    std::int64_t rest = m - both;
    const double p_rest = 1.0 - p_both;
    const std::int64_t only_a = p_rest > 0.0 ? draw_binomial(rng, rest, pa * (1.0 - pb) / p_rest) : 0;
    rest -= only_a;
    const double p_rest_b = p_rest - pa * (1.0 - pb);
    const std::int64_t only_b = p_rest_b > 0.0 ? draw_binomial(rng, rest, (1.0 - pa) * pb / p_rest_b) : 0;
    rec.counts_a += both + only_a;
    rec.counts_b += both + only_b;
    rec.coincidences += both;
  }

  rec.counts_a += draw_poisson(rng, detectors.dark_rate_per_s * duration_s);
  rec.counts_b += draw_poisson(rng, detectors.dark_rate_per_s * duration_s);

  const double accidental_mean = static_cast<double>(rec.counts_a) * static_cast<double>(rec.counts_b) * 2.0 *
                                 detectors.window_ns * 1e-9 / duration_s;
  const std::int64_t headroom = std::min(rec.counts_a, rec.counts_b) - rec.coincidences;
  rec.coincidences += std::min(draw_poisson(rng, accidental_mean), headroom);
  return rec;
}

ExpectedCounts expected_counts(const OutcomeDistribution& dist, double pair_rate_per_s, double duration_s,
                               const DetectorSpec& detectors) {
  detectors.validate();
  ExpectedCounts e;
  const double events = pair_rate_per_s * duration_s;
  for (const auto& [counts, p] : dist.probabilities) {
    const double pa = click_probability(counts.first, detectors.efficiency_a);
    const double pb = click_probability(counts.second, detectors.efficiency_b);
    e.counts_a += events * p * pa;
    e.counts_b += events * p * pb;
    e.coincidences += events * p * pa * pb;
  }
  e.counts_a += detectors.dark_rate_per_s * duration_s;
  e.counts_b += detectors.dark_rate_per_s * duration_s;
  return e;
}

CoincidenceTrace sample_trace(const ScanResult& scan, double pair_rate_per_s, double duration_s,
                              const DetectorSpec& detectors, std::uint64_t seed) {
  detectors.validate();
  CoincidenceTrace trace;
  trace.seed = seed;
  trace.records.resize(scan.outcomes.size());
  const auto n = static_cast<std::ptrdiff_t>(scan.outcomes.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      trace.records[i] = sample_record(scan.outcomes[i], pair_rate_per_s, duration_s, detectors,
                                       point_seed(seed, static_cast<std::uint64_t>(i)), scan.delta_nm[i]);
    } catch (...) {
#pragma omp critical(noonsim_sample_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return trace;
}

CoincidenceTrace sample_trace_serial(const ScanResult& scan, double pair_rate_per_s, double duration_s,
                                     const DetectorSpec& detectors, std::uint64_t seed) {
  CoincidenceTrace trace;
  trace.seed = seed;
  trace.records.reserve(scan.outcomes.size());
  for (std::size_t i = 0; i < scan.outcomes.size(); ++i) {
    trace.records.push_back(
        sample_record(scan.outcomes[i], pair_rate_per_s, duration_s, detectors, point_seed(seed, i), scan.delta_nm[i]));
  }
  return trace;
}

CoincidenceTrace generate_trace(const InterferometerSpec& spec, const SourceModel& source,
                                const DetectorSpec& detectors, double duration_per_point_s, std::uint64_t seed) {
  CoincidenceTrace trace =
      sample_trace(run_scan_exact(spec, source), source.pair_rate_per_s, duration_per_point_s, detectors, seed);
  trace.wavelength_nm = spec.wavelength_nm;
  return trace;
}

CoincidenceTrace generate_trace_serial(const InterferometerSpec& spec, const SourceModel& source,
                                       const DetectorSpec& detectors, double duration_per_point_s,
                                       std::uint64_t seed) {
  CoincidenceTrace trace = sample_trace_serial(run_scan_exact_serial(spec, source), source.pair_rate_per_s,
                                               duration_per_point_s, detectors, seed);
  trace.wavelength_nm = spec.wavelength_nm;
  return trace;
}

}  // namespace noonsim
