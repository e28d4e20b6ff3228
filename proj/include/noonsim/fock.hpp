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

// Sparse multimode Fock-space states.
//
// A StateVector is an immutable map from occupation-number kets to complex
// amplitudes. Signal modes come first; environment (loss) modes are only ever
// appended after them, so the first `signal_modes()` entries of every ket are
// the observable part.

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace noonsim {

using Complex = std::complex<double>;

inline constexpr int kDefaultMaxPhotons = 4;
inline constexpr double kPruneThreshold = 1e-14;

/// Photons per mode for one basis ket.
struct OccupationVector {
  std::vector<int> counts;

  OccupationVector() = default;
  OccupationVector(std::initializer_list<int> c) : counts(c) {}
  explicit OccupationVector(std::vector<int> c) : counts(std::move(c)) {}

  std::size_t size() const { return counts.size(); }
  int operator[](std::size_t i) const { return counts[i]; }
  int total() const;

  auto operator<=>(const OccupationVector&) const = default;
  bool operator==(const OccupationVector&) const = default;
};

std::string to_string(const OccupationVector& occ);

enum class ModeKind { signal, environment };

/// Strongly-typed handle on one network mode.
struct ModeIndex {
  std::size_t index = 0;
  ModeKind kind = ModeKind::signal;
};

constexpr ModeIndex signal_mode(std::size_t i) { return {i, ModeKind::signal}; }

class StateVector {
 public:
  using AmplitudeMap = std::map<OccupationVector, Complex>;

  /// Vacuum on `signal_modes` modes.
  explicit StateVector(std::size_t signal_modes, int max_photons = kDefaultMaxPhotons);

  /// Builds a state from raw amplitudes. Amplitudes with magnitude at or below
  /// the prune threshold are dropped; kets must have `signal + environment`
  /// entries, non-negative counts, and at most `max_photons` photons.
  static StateVector from_amplitudes(std::size_t signal_modes, std::size_t environment_modes,
                                     int max_photons, AmplitudeMap amplitudes);

  std::size_t modes() const { return signal_modes_ + environment_modes_; }
  std::size_t signal_modes() const { return signal_modes_; }
  std::size_t environment_modes() const { return environment_modes_; }
  int max_photons() const { return max_photons_; }

  const AmplitudeMap& amplitudes() const { return amplitudes_; }
  Complex amplitude(const OccupationVector& ket) const;
  bool is_zero() const { return amplitudes_.empty(); }

  double squared_norm() const;
  StateVector normalized() const;

  /// Same state with `count` vacuum environment modes appended.
  StateVector with_environment_modes(std::size_t count) const;

  /// Mode handle for the `i`-th environment mode.
  ModeIndex environment_mode(std::size_t i) const { return {signal_modes_ + i, ModeKind::environment}; }

  friend StateVector operator+(const StateVector& a, const StateVector& b);
  friend StateVector operator*(Complex scale, const StateVector& s);

 private:
  StateVector(std::size_t signal_modes, std::size_t environment_modes, int max_photons);

  std::size_t signal_modes_ = 0;
  std::size_t environment_modes_ = 0;
  int max_photons_ = kDefaultMaxPhotons;
  AmplitudeMap amplitudes_;
};

/// Throws ValidationError unless `mode` addresses a mode of `state` with the
/// right kind.
void check_mode(const StateVector& state, ModeIndex mode);

StateVector make_fock(const OccupationVector& occupations, int max_photons = kDefaultMaxPhotons);

/// (|n,0> + e^{i n phase}|0,n>)/sqrt(2) on `mode_a`, `mode_b`; all other
/// signal modes empty.
StateVector make_noon(int n, double phase, ModeIndex mode_a, ModeIndex mode_b,
                      std::size_t signal_modes = 2, int max_photons = kDefaultMaxPhotons);

/// a^dagger on `mode`; result is not renormalized.
StateVector apply_creation(const StateVector& state, ModeIndex mode);
/// a on `mode`; result is not renormalized.
StateVector apply_annihilation(const StateVector& state, ModeIndex mode);

/// <a|b>. Both states must have the same mode layout.
Complex inner_product(const StateVector& a, const StateVector& b);

double number_expectation(const StateVector& state, ModeIndex mode);
/// <N_i N_j> for distinct modes.
double pair_expectation(const StateVector& state, ModeIndex mode_i, ModeIndex mode_j);

}  // namespace noonsim
