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

#include "noonsim/fock.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "noonsim/error.hpp"

namespace noonsim {

int OccupationVector::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

std::string to_string(const OccupationVector& occ) {
  std::ostringstream out;
  out << '|';
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (i) out << ',';
    out << occ[i];
  }
  out << '>';
  return out.str();
}

StateVector::StateVector(std::size_t signal_modes, std::size_t environment_modes, int max_photons)
    : signal_modes_(signal_modes), environment_modes_(environment_modes), max_photons_(max_photons) {
  if (max_photons < 0) throw ValidationError("max_photons must be non-negative");
}

StateVector::StateVector(std::size_t signal_modes, int max_photons) : StateVector(signal_modes, 0, max_photons) {
  amplitudes_.emplace(OccupationVector(std::vector<int>(signal_modes, 0)), Complex{1.0, 0.0});
}

StateVector StateVector::from_amplitudes(std::size_t signal_modes, std::size_t environment_modes, int max_photons,
                                         AmplitudeMap amplitudes) {
  StateVector out(signal_modes, environment_modes, max_photons);
  const std::size_t width = signal_modes + environment_modes;
  for (auto it = amplitudes.begin(); it != amplitudes.end();) {
    const auto& ket = it->first;
    if (ket.size() != width) {
      throw ValidationError("ket " + to_string(ket) + " does not match a " + std::to_string(width) + "-mode layout");
    }
    for (int n : ket.counts) {
      if (n < 0) throw ValidationError("negative occupation in ket " + to_string(ket));
    }
    if (std::abs(it->second) <= kPruneThreshold) {
      it = amplitudes.erase(it);
      continue;
    }
    if (ket.total() > max_photons) {
      throw TruncationError("ket " + to_string(ket) + " exceeds the truncation bound of " +
                            std::to_string(max_photons) + " photons");
    }
    ++it;
  }
  out.amplitudes_ = std::move(amplitudes);
  return out;
}

Complex StateVector::amplitude(const OccupationVector& ket) const {
  auto it = amplitudes_.find(ket);
  return it == amplitudes_.end() ? Complex{} : it->second;
}

double StateVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& [ket, amp] : amplitudes_) sum += std::norm(amp);
  return sum;
}

StateVector StateVector::normalized() const {
  const double norm = std::sqrt(squared_norm());
  if (norm == 0.0) throw ValidationError("cannot normalize the zero vector");
  return Complex{1.0 / norm, 0.0} * *this;
}

StateVector StateVector::with_environment_modes(std::size_t count) const {
  AmplitudeMap extended;
  for (const auto& [ket, amp] : amplitudes_) {
    std::vector<int> counts = ket.counts;
    counts.resize(counts.size() + count, 0);
    extended.emplace_hint(extended.end(), OccupationVector(std::move(counts)), amp);
  }
  return from_amplitudes(signal_modes_, environment_modes_ + count, max_photons_, std::move(extended));
}

StateVector operator+(const StateVector& a, const StateVector& b) {
  if (a.signal_modes_ != b.signal_modes_ || a.environment_modes_ != b.environment_modes_) {
    throw ValidationError("cannot add states with different mode layouts");
  }
  StateVector::AmplitudeMap sum = a.amplitudes_;
  for (const auto& [ket, amp] : b.amplitudes_) sum[ket] += amp;
  return StateVector::from_amplitudes(a.signal_modes_, a.environment_modes_,
                                      std::max(a.max_photons_, b.max_photons_), std::move(sum));
}

StateVector operator*(Complex scale, const StateVector& s) {
  StateVector::AmplitudeMap scaled;
  for (const auto& [ket, amp] : s.amplitudes_) scaled.emplace_hint(scaled.end(), ket, scale * amp);
  return StateVector::from_amplitudes(s.signal_modes_, s.environment_modes_, s.max_photons_, std::move(scaled));
}

void check_mode(const StateVector& state, ModeIndex mode) {
  if (mode.index >= state.modes()) {
    throw ValidationError("mode " + std::to_string(mode.index) + " out of range for a " +
                          std::to_string(state.modes()) + "-mode state");
  }
  const bool is_signal = mode.index < state.signal_modes();
  if (is_signal != (mode.kind == ModeKind::signal)) {
    throw ValidationError("mode " + std::to_string(mode.index) + " has the wrong kind (signal/environment)");
  }
}

StateVector make_fock(const OccupationVector& occupations, int max_photons) {
  StateVector::AmplitudeMap amps{{occupations, Complex{1.0, 0.0}}};
  return StateVector::from_amplitudes(occupations.size(), 0, max_photons, std::move(amps));
}

StateVector make_noon(int n, double phase, ModeIndex mode_a, ModeIndex mode_b, std::size_t signal_modes,
                      int max_photons) {
  if (n < 0) throw ValidationError("NOON photon number must be non-negative");
  if (mode_a.index == mode_b.index) throw ValidationError("NOON state needs two distinct modes");
  if (mode_a.kind != ModeKind::signal || mode_b.kind != ModeKind::signal) {
    throw ValidationError("NOON state modes must be signal modes");
  }
  if (mode_a.index >= signal_modes || mode_b.index >= signal_modes) {
    throw ValidationError("NOON mode index out of range");
  }
  if (n > max_photons) {
    throw TruncationError("NOON state with " + std::to_string(n) + " photons exceeds the truncation bound");
  }
  std::vector<int> left(signal_modes, 0), right(signal_modes, 0);
  left[mode_a.index] = n;
  right[mode_b.index] = n;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  StateVector::AmplitudeMap amps;
  amps[OccupationVector(left)] += inv_sqrt2;
  amps[OccupationVector(right)] += std::polar(inv_sqrt2, n * phase);
  // n == 0 collapses both kets onto the vacuum.
  if (n == 0) amps.begin()->second = 1.0;
  return StateVector::from_amplitudes(signal_modes, 0, max_photons, std::move(amps));
}

StateVector apply_creation(const StateVector& state, ModeIndex mode) {
  check_mode(state, mode);
  StateVector::AmplitudeMap out;
  for (const auto& [ket, amp] : state.amplitudes()) {
    std::vector<int> counts = ket.counts;
    const int n = counts[mode.index]++;
    out.emplace(OccupationVector(std::move(counts)), amp * std::sqrt(static_cast<double>(n + 1)));
  }
  return StateVector::from_amplitudes(state.signal_modes(), state.environment_modes(), state.max_photons(),
                                      std::move(out));
}

StateVector apply_annihilation(const StateVector& state, ModeIndex mode) {
  check_mode(state, mode);
  StateVector::AmplitudeMap out;
  for (const auto& [ket, amp] : state.amplitudes()) {
    const int n = ket[mode.index];
    if (n == 0) continue;
    std::vector<int> counts = ket.counts;
    --counts[mode.index];
    out.emplace(OccupationVector(std::move(counts)), amp * std::sqrt(static_cast<double>(n)));
  }
  return StateVector::from_amplitudes(state.signal_modes(), state.environment_modes(), state.max_photons(),
                                      std::move(out));
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.modes() != b.modes()) {
    throw ValidationError("inner product of states with " + std::to_string(a.modes()) + " and " +
                          std::to_string(b.modes()) + " modes");
  }
  // Walk the smaller map, look up in the larger.
  const auto& small = a.amplitudes().size() <= b.amplitudes().size() ? a.amplitudes() : b.amplitudes();
  const bool small_is_a = &small == &a.amplitudes();
  Complex sum{};
  for (const auto& [ket, amp] : small) {
    const Complex other = small_is_a ? b.amplitude(ket) : a.amplitude(ket);
    sum += small_is_a ? std::conj(amp) * other : std::conj(other) * amp;
  }
  return sum;
}

double number_expectation(const StateVector& state, ModeIndex mode) {
  check_mode(state, mode);
  double sum = 0.0;
  for (const auto& [ket, amp] : state.amplitudes()) sum += ket[mode.index] * std::norm(amp);
  return sum;
}

double pair_expectation(const StateVector& state, ModeIndex mode_i, ModeIndex mode_j) {
  check_mode(state, mode_i);
  check_mode(state, mode_j);
  if (mode_i.index == mode_j.index) throw ValidationError("pair expectation needs two distinct modes");
  double sum = 0.0;
  for (const auto& [ket, amp] : state.amplitudes()) sum += ket[mode_i.index] * ket[mode_j.index] * std::norm(amp);
  return sum;
}

}  // namespace noonsim
