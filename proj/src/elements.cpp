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

#include "noonsim/elements.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "noonsim/error.hpp"

namespace noonsim {

namespace {

constexpr double kUnitTolerance = 1e-12;
// Singular values this close to 1 are treated as exactly 1; otherwise
// sqrt(1 - s^2) turns rounding noise into a ~1e-8 environment coupling.
constexpr double kSingularSnap = 1e-13;

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Expansion of prod_j (sum_k U(k,j) b_k^dagger)^{n_j} as a map from output
// exponents to coefficients.
using Polynomial = std::map<std::vector<int>, Complex>;

Polynomial expand_product(const std::vector<int>& inputs, const Eigen::MatrixXcd& unitary) {
  const auto width = static_cast<std::size_t>(unitary.rows());
  Polynomial poly{{std::vector<int>(width, 0), Complex{1.0, 0.0}}};
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    for (int rep = 0; rep < inputs[j]; ++rep) {
      Polynomial next;
      for (const auto& [exponents, coeff] : poly) {
        for (std::size_t k = 0; k < width; ++k) {
          const Complex u = unitary(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
          if (u == Complex{}) continue;
          std::vector<int> e = exponents;
          ++e[k];
          next[std::move(e)] += coeff * u;
        }
      }
      poly = std::move(next);
    }
  }
  return poly;
}

bool is_isometry(const Eigen::MatrixXcd& a) {
  const auto n = a.cols();
  return ((a.adjoint() * a) - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < kUnitTolerance;
}

}  // namespace

BeamsplitterSpec BeamsplitterSpec::with_relation(double transmittance, double reflectance, Relation relation) {
  if (transmittance < 0.0 || reflectance < 0.0) throw ValidationError("negative transmittance or reflectance");
  Complex unit{1.0, 0.0};
  switch (relation) {
    case Relation::plus: unit = {1.0, 0.0}; break;
    case Relation::minus: unit = {-1.0, 0.0}; break;
    case Relation::plus_i: unit = {0.0, 1.0}; break;
    case Relation::minus_i: unit = {0.0, -1.0}; break;
  }
  return {Complex{std::sqrt(transmittance), 0.0}, std::sqrt(reflectance) * unit};
}

BeamsplitterSpec BeamsplitterSpec::balanced_lossless() {
  const double h = 1.0 / std::sqrt(2.0);
  return {Complex{h, 0.0}, Complex{0.0, h}};
}

Eigen::Matrix2cd BeamsplitterSpec::matrix() const {
  Eigen::Matrix2cd m;
  m << t, r, r, t;
  return m;
}

Complex PropagationSpec::transmission() const {
  return std::exp(Complex{0.0, 1.0} * Complex{k_real_per_nm, k_imag_per_nm} * distance_nm);
}

void PropagationSpec::validate() const {
  if (!(k_imag_per_nm >= 0.0)) throw ValidationError("propagation k_imag must be >= 0 (gain is not passive)");
  if (!(distance_nm >= 0.0)) throw ValidationError("propagation distance must be >= 0");
  if (!std::isfinite(k_real_per_nm)) throw ValidationError("propagation k_real must be finite");
}

double phase_of(const PhaseSpec& spec) {
  if (!(spec.wavelength_nm > 0.0)) throw ValidationError("wavelength must be positive");
  return 2.0 * std::numbers::pi * spec.delay_nm / spec.wavelength_nm;
}

SplitterClass validate(const BeamsplitterSpec& spec) {
  // [[t, r], [r, t]] is normal with eigenvalues t + r and t - r, so these are
  // its singular values.
  const double s_max = std::max(std::abs(spec.t + spec.r), std::abs(spec.t - spec.r));
  if (!std::isfinite(s_max) || s_max > 1.0 + kUnitTolerance) return SplitterClass::invalid;
  const double power = std::norm(spec.t) + std::norm(spec.r);
  const double cross = 2.0 * (spec.t * std::conj(spec.r)).real();  // t r* + t* r
  if (std::abs(power - 1.0) <= kUnitTolerance && std::abs(cross) <= kUnitTolerance) return SplitterClass::lossless;
  return SplitterClass::lossy;
}

const char* to_string(SplitterClass c) {
  switch (c) {
    case SplitterClass::lossless: return "lossless";
    case SplitterClass::lossy: return "lossy";
    case SplitterClass::invalid: return "invalid";
  }
  return "?";
}

Eigen::MatrixXcd dilate_contraction(const Eigen::MatrixXcd& contraction, const EnvironmentGauge& gauge) {
  const auto n = contraction.rows();
  if (contraction.cols() != n) throw ValidationError("dilation needs a square matrix");

  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  u.topLeftCorner(n, n) = contraction;
  if (is_isometry(contraction)) {
    u.bottomRightCorner(n, n).setIdentity();
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(contraction, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd s = svd.singularValues();
    if (s.maxCoeff() > 1.0 + kUnitTolerance) throw ValidationError("matrix is not a contraction");
    Eigen::VectorXd c(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (s(i) > 1.0 - kSingularSnap) s(i) = 1.0;
      c(i) = std::sqrt(std::max(0.0, 1.0 - s(i) * s(i)));
    }
    const Eigen::MatrixXcd& w = svd.matrixU();
    const Eigen::MatrixXcd& v = svd.matrixV();
    u.topRightCorner(n, n) = -w * c.cast<Complex>().asDiagonal();
    u.bottomLeftCorner(n, n) = c.cast<Complex>().asDiagonal() * v.adjoint();
    u.bottomRightCorner(n, n) = s.cast<Complex>().asDiagonal();
  }

  if (gauge.out.size() > 0) {
    if (gauge.out.rows() != n || gauge.out.cols() != n) throw ValidationError("gauge size mismatch");
    u.bottomRows(n) = (gauge.out * u.bottomRows(n)).eval();
  }
  if (gauge.in.size() > 0) {
    if (gauge.in.rows() != n || gauge.in.cols() != n) throw ValidationError("gauge size mismatch");
    u.rightCols(n) = (u.rightCols(n) * gauge.in).eval();
  }
  return u;
}

Eigen::Matrix4cd dilate(const BeamsplitterSpec& spec, const EnvironmentGauge& gauge) {
  if (validate(spec) == SplitterClass::invalid) {
    throw ValidationError("beamsplitter is not passive (largest singular value > 1)");
  }
  return dilate_contraction(spec.matrix(), gauge);
}

StateVector apply_mode_transform(const StateVector& state, std::span<const std::size_t> modes,
                                 const Eigen::MatrixXcd& unitary) {
  const std::size_t m = modes.size();
  if (static_cast<std::size_t>(unitary.rows()) != m || static_cast<std::size_t>(unitary.cols()) != m) {
    throw ValidationError("transform size does not match the number of modes");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (modes[i] >= state.modes()) throw ValidationError("transform mode out of range");
    for (std::size_t j = 0; j < i; ++j) {
      if (modes[i] == modes[j]) throw ValidationError("transform modes must be distinct");
    }
  }

  std::map<std::vector<int>, Polynomial> cache;
  StateVector::AmplitudeMap out;
  std::vector<int> inputs(m);
  for (const auto& [ket, amp] : state.amplitudes()) {
    double input_norm = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      inputs[j] = ket[modes[j]];
      input_norm *= factorial(inputs[j]);
    }
    auto [it, fresh] = cache.try_emplace(inputs);
    if (fresh) it->second = expand_product(inputs, unitary);
    const double in_scale = 1.0 / std::sqrt(input_norm);

    for (const auto& [exponents, coeff] : it->second) {
      std::vector<int> counts = ket.counts;
      double output_norm = 1.0;
      for (std::size_t k = 0; k < m; ++k) {
        counts[modes[k]] = exponents[k];
        output_norm *= factorial(exponents[k]);
      }
      out[OccupationVector(std::move(counts))] += amp * coeff * (in_scale * std::sqrt(output_norm));
    }
  }
  return StateVector::from_amplitudes(state.signal_modes(), state.environment_modes(), state.max_photons(),
                                      std::move(out));
}

StateVector apply_beamsplitter(const StateVector& state, ModeIndex mode_1, ModeIndex mode_2,
                               const BeamsplitterSpec& spec, const EnvironmentGauge& gauge) {
  check_mode(state, mode_1);
  check_mode(state, mode_2);
  if (mode_1.index == mode_2.index) throw ValidationError("beamsplitter needs two distinct modes");

  switch (validate(spec)) {
    case SplitterClass::invalid:
      throw ValidationError("beamsplitter is not passive (largest singular value > 1)");
    case SplitterClass::lossless: {
      const std::size_t modes[] = {mode_1.index, mode_2.index};
      return apply_mode_transform(state, modes, spec.matrix());
    }
    case SplitterClass::lossy: break;
  }
  const StateVector widened = state.with_environment_modes(2);
  const std::size_t env = state.modes();
  const std::size_t modes[] = {mode_1.index, mode_2.index, env, env + 1};
  return apply_mode_transform(widened, modes, dilate(spec, gauge));
}

StateVector apply_phase(const StateVector& state, ModeIndex mode, double phase) {
  check_mode(state, mode);
  StateVector::AmplitudeMap out;
  for (const auto& [ket, amp] : state.amplitudes()) {
    out.emplace_hint(out.end(), ket, amp * std::polar(1.0, ket[mode.index] * phase));
  }
  return StateVector::from_amplitudes(state.signal_modes(), state.environment_modes(), state.max_photons(),
                                      std::move(out));
}

StateVector apply_propagation(const StateVector& state, ModeIndex mode, const PropagationSpec& spec) {
  check_mode(state, mode);
  spec.validate();
  Eigen::MatrixXcd t(1, 1);
  t(0, 0) = spec.transmission();
  const StateVector widened = state.with_environment_modes(1);
  const std::size_t modes[] = {mode.index, state.modes()};
  return apply_mode_transform(widened, modes, dilate_contraction(t));
}

SignalDistribution marginal_signal_distribution(const StateVector& state) {
  SignalDistribution dist;
  const auto width = static_cast<std::ptrdiff_t>(state.signal_modes());
  for (const auto& [ket, amp] : state.amplitudes()) {
    OccupationVector signal(std::vector<int>(ket.counts.begin(), ket.counts.begin() + width));
    dist[std::move(signal)] += std::norm(amp);
  }
  return dist;
}

}  // namespace noonsim
