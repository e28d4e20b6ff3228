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

// Linear optical elements acting on Fock states.
//
// Every element is applied by substituting the creation operators of its input
// modes, a_j^dagger -> sum_k U(k, j) a_k^dagger. Lossy elements are purified:
// their 2x2 (or 1x1) transfer matrix is dilated to a unitary over extra
// environment modes that are appended to the state and never reused.

#include <map>
#include <span>

#include <Eigen/Dense>

#include "noonsim/fock.hpp"

namespace noonsim {

/// Two-port splitter with transfer matrix [[t, r], [r, t]].
struct BeamsplitterSpec {
  Complex t{1.0, 0.0};
  Complex r{0.0, 0.0};

  /// Phase of r relative to t.
  enum class Relation { plus, minus, plus_i, minus_i };

  /// t = sqrt(transmittance), r = sqrt(reflectance) * {1, -1, i, -i}.
  static BeamsplitterSpec with_relation(double transmittance, double reflectance, Relation relation);
  /// t = 1/sqrt(2), r = i/sqrt(2).
  static BeamsplitterSpec balanced_lossless();

  Eigen::Matrix2cd matrix() const;
};

/// Lossy propagation over `distance_nm` with complex wavevector k_real + i k_imag.
struct PropagationSpec {
  double k_real_per_nm = 0.0;
  double k_imag_per_nm = 0.0;
  double distance_nm = 0.0;

  /// exp(i k d).
  Complex transmission() const;
  void validate() const;
};

struct PhaseSpec {
  double delay_nm = 0.0;
  double wavelength_nm = 0.0;
};

double phase_of(const PhaseSpec& spec);

enum class SplitterClass { lossless, lossy, invalid };

SplitterClass validate(const BeamsplitterSpec& spec);
const char* to_string(SplitterClass c);

/// Arbitrary unitaries applied to the environment outputs and inputs of a
/// dilation. Any choice leaves all signal-mode statistics unchanged.
struct EnvironmentGauge {
  Eigen::MatrixXcd out;  // empty = identity
  Eigen::MatrixXcd in;   // empty = identity
};

/// Unitary dilation of an n x n contraction to 2n x 2n. With A = W S V^dagger,
///   U = [[A, -W C], [C V^dagger, S]],  C = sqrt(1 - S^2),
/// so an isometric block decouples the environment exactly (identity block).
Eigen::MatrixXcd dilate_contraction(const Eigen::MatrixXcd& contraction, const EnvironmentGauge& gauge = {});

/// 4x4 dilation over (signal 3, signal 4, environment 1, environment 2).
/// Throws ValidationError for an invalid spec.
Eigen::Matrix4cd dilate(const BeamsplitterSpec& spec, const EnvironmentGauge& gauge = {});

/// Substitutes the creation operators of `modes` according to `unitary`
/// (column j = image of modes[j]). Modes not listed are untouched.
StateVector apply_mode_transform(const StateVector& state, std::span<const std::size_t> modes,
                                 const Eigen::MatrixXcd& unitary);

/// Lossless specs act directly on the two modes. Lossy specs first append two
/// environment modes and act with the 4x4 dilation.
StateVector apply_beamsplitter(const StateVector& state, ModeIndex mode_1, ModeIndex mode_2,
                               const BeamsplitterSpec& spec, const EnvironmentGauge& gauge = {});

/// Multiplies each ket by e^{i n phase}, n the occupation of `mode`.
StateVector apply_phase(const StateVector& state, ModeIndex mode, double phase);

/// One-mode loss element against a single fresh environment mode.
StateVector apply_propagation(const StateVector& state, ModeIndex mode, const PropagationSpec& spec);

using SignalDistribution = std::map<OccupationVector, double>;

/// Probability of each signal-mode ket, summed over environment outcomes.
SignalDistribution marginal_signal_distribution(const StateVector& state);

}  // namespace noonsim
