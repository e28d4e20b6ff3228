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

// The two-stage interferometer: a Hong-Ou-Mandel stage that turns photon
// pairs into (mostly) two-photon NOON states, followed by a Mach-Zehnder whose
// arms carry lossy propagation and a relative delay and recombine on a
// (possibly lossy) splitter.
//
// Mode layout shared by every branch state. Distinguishable photons carry
// internal labels a and b, each label with its own pair of arm modes:
//   0: arm 1, label a    1: arm 2, label a
//   2: arm 1, label b    3: arm 2, label b
// After the recombining splitter, arm-1 modes become output 3 and arm-2 modes
// output 4; detectors do not resolve labels.

#include <array>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "noonsim/elements.hpp"
#include "noonsim/fock.hpp"

namespace noonsim {

namespace layout {
inline constexpr std::size_t kArm1A = 0;
inline constexpr std::size_t kArm2A = 1;
inline constexpr std::size_t kArm1B = 2;
inline constexpr std::size_t kArm2B = 3;
inline constexpr std::size_t kSignalModes = 4;
}  // namespace layout

struct SourceModel {
  double pair_rate_per_s = 5000.0;
  /// Overlap eta of the two photons' internal states.
  double overlap = 1.0;
  /// Fraction beta of pairs that take part in the HOM interference at all.
  double bunching_fidelity = 1.0;

  void validate() const;
};

/// Gaussian HOM-delay model: eta = exp(-delay^2 / (2 l^2)).
double overlap_from_delay(double hom_delay_nm, double coherence_length_nm);

enum class BranchKind {
  coalesced,        // same internal state, interferes at the HOM splitter
  distinguishable,  // labeled photons through the HOM splitter
  unbunched,        // labeled photons entering the MZ one per arm
};

const char* to_string(BranchKind kind);

struct MixtureBranch {
  BranchKind kind;
  double weight;
  StateVector state;
};

/// Incoherent mixture; weights sum to 1.
using Mixture = std::vector<MixtureBranch>;

/// Post-HOM mixture. Weights: beta*eta^2 coalesced, beta*(1-eta^2)
/// distinguishable, 1-beta unbunched. Zero-weight branches are omitted.
Mixture hom_stage(const SourceModel& source, const BeamsplitterSpec& splitter);

/// Probability that both arms are occupied after the HOM stage.
double arm_coincidence_probability(const Mixture& mixture);

struct InterferometerSpec {
  double wavelength_nm = 806.0;
  BeamsplitterSpec hom_splitter = BeamsplitterSpec::balanced_lossless();
  BeamsplitterSpec spbs = BeamsplitterSpec::with_relation(0.25, 0.25, BeamsplitterSpec::Relation::plus);
  std::array<PropagationSpec, 2> arm_propagation{};
  std::vector<double> scan_nm;

  /// Throws ValidationError; the Nyquist message names the lambda/4 rule.
  void validate() const;
};

/// start, start + step, ... while <= stop (with a small tolerance).
std::vector<double> uniform_scan(double start_nm, double stop_nm, double step_nm);

/// Joint distribution of detected-mode photon numbers (n3, n4).
struct OutcomeDistribution {
  std::map<std::pair<int, int>, double> probabilities;

  double probability(int n3, int n4) const;
  /// P(1_3, 1_4).
  double coincidence() const { return probability(1, 1); }
  /// Probability that n3 + n4 == n.
  double total_count_probability(int n) const;
  /// <N_3>, <N_4>.
  double mean_count_3() const;
  double mean_count_4() const;
  double total_probability() const;
};

/// Applies arm propagation to every branch (independent of the delay).
Mixture propagate_arms(const Mixture& mixture, const InterferometerSpec& spec);

/// Phase on arm 2, recombining splitter, environment marginalized, labels
/// merged, branches averaged with their weights.
OutcomeDistribution recombine(const Mixture& propagated, const BeamsplitterSpec& spbs, double phase);

OutcomeDistribution outcome_distribution(const StateVector& output_state);

struct ScanResult {
  std::vector<double> delta_nm;
  std::vector<OutcomeDistribution> outcomes;

  std::vector<double> coincidence_trace() const;
};

/// Exact outcome distribution at every scan point; points are evaluated in
/// parallel (OpenMP).
ScanResult run_scan_exact(const InterferometerSpec& spec, const SourceModel& source);
/// Single-threaded reference for run_scan_exact; results are identical.
ScanResult run_scan_exact_serial(const InterferometerSpec& spec, const SourceModel& source);

/// 2|t|^2|r|^2 (1 + cos 2 phase).
double coincidence_probability_analytic(Complex t, Complex r, double phase);

struct SinglesProbability {
  double p3 = 0.0;
  double p4 = 0.0;
};

/// One photon in (|1,0> + |0,1>)/sqrt(2) with the phase on arm 2:
/// p3 = |t + r e^{i phase}|^2 / 2, p4 = |r + t e^{i phase}|^2 / 2.
SinglesProbability singles_probability_analytic(Complex t, Complex r, double phase);

/// 1 / (2 n k_imag).
double decay_length(int n, double k_imag_per_nm);

}  // namespace noonsim
