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

// Fringe analysis: spectrum of a coincidence scan, band-stop removal of the
// single-particle line, and least-squares sinusoid fits for period and
// visibility.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "noonsim/detection.hpp"
#include "noonsim/fock.hpp"

namespace noonsim {

/// A real-valued series sampled on a uniform delay grid.
struct Fringe {
  std::vector<double> delta_nm;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  /// Grid spacing; throws ValidationError if the grid is not uniform.
  double spacing_nm() const;
  double mean() const;
};

Fringe coincidence_fringe(const CoincidenceTrace& trace);

enum class Window { none, hann };

struct Spectrum {
  double spacing_nm = 0.0;
  double mean = 0.0;
  /// All N DFT coefficients of the mean-subtracted (and windowed) series.
  std::vector<Complex> coefficients;

  std::size_t size() const { return coefficients.size(); }
  std::size_t one_sided_bins() const { return coefficients.size() / 2 + 1; }
  /// Wavenumber of bin j in 1/nm.
  double wavenumber(std::size_t bin) const;
  /// Same axis scaled by the wavelength (units of 1/lambda).
  std::vector<double> wavenumbers_per_lambda(double wavelength_nm) const;
  std::vector<double> wavenumbers_per_nm() const;
  /// Amplitude spectrum: a sinusoid of amplitude A centered on a bin shows up
  /// with magnitude A.
  std::vector<double> magnitudes() const;
  double magnitude(std::size_t bin) const;
  /// Bin closest to `wavenumber_per_nm`.
  std::size_t bin_of(double wavenumber_per_nm) const;
};

inline constexpr std::size_t kMinSpectrumPoints = 16;

/// DFT of the mean-subtracted series. Needs a uniform grid with at least 16
/// points. No window unless requested.
Spectrum fft_spectrum(const Fringe& fringe, Window window = Window::none);
Spectrum fft_spectrum(const CoincidenceTrace& trace, Window window = Window::none);

/// Inverse of the coefficients plus the stored mean. Real part only.
std::vector<double> inverse_spectrum(const Spectrum& spectrum);

/// One-sided bins that are local maxima with magnitude >= relative_threshold
/// times the largest one-sided magnitude (DC excluded).
std::vector<std::size_t> find_peaks(const Spectrum& spectrum, double relative_threshold);

inline constexpr double kDefaultBandLowPerLambda = 0.65;
inline constexpr double kDefaultBandHighPerLambda = 1.3;

/// Zeroes every coefficient whose |wavenumber| lies in [low, high) (both
/// halves of the spectrum) and transforms back. The mean is always kept.
Fringe band_stop(const Fringe& fringe, double low_per_nm, double high_per_nm);

struct FitResult {
  double period_nm = 0.0;
  double period_uncertainty_nm = 0.0;
  double amplitude = 0.0;
  double amplitude_uncertainty = 0.0;
  double phase = 0.0;
  double offset = 0.0;
  double offset_uncertainty = 0.0;
  double visibility = 0.0;
  int iterations = 0;
};

struct FitOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;
};

/// offset + amplitude * cos(2 pi delta / period + phase) by Levenberg-Marquardt
/// started from a linear fit at `initial_period_nm`. Uncertainties are 1 sigma
/// from the covariance scaled by the residual variance.
/// Throws FitError (degenerate_amplitude, not_converged, insufficient_sampling).
FitResult fit_sinusoid(const Fringe& fringe, double initial_period_nm, const FitOptions& options = {});

/// Joint linear fit with periods fixed at lambda and lambda/2. Returns
/// {lambda component, lambda/2 component}; both share the offset.
std::pair<FitResult, FitResult> fit_two_sinusoids(const Fringe& fringe, double wavelength_nm);

struct VisibilityResult {
  double value = 0.0;
  bool out_of_range = false;
};

/// amplitude / offset clamped to [0, 1]. Throws ValidationError if the offset
/// is not positive.
VisibilityResult visibility(const FitResult& fit);

/// Period of the largest one-sided peak.
double dominant_period_nm(const Spectrum& spectrum);

struct AnalysisOptions {
  double band_low_per_lambda = kDefaultBandLowPerLambda;
  double band_high_per_lambda = kDefaultBandHighPerLambda;
  bool filter = true;
  FitOptions fit{};
};

struct AnalysisReport {
  Spectrum spectrum;  // of the raw series
  Fringe filtered;    // equals the input when filtering is off
  std::optional<FitResult> fit;
  std::optional<std::pair<FitResult, FitResult>> two_component_fit;
  std::string status = "ok";
};

/// spectrum -> band-stop -> sinusoid fit seeded from the dominant peak of the
/// filtered series. Fit failures are reported in `status`, not thrown.
AnalysisReport analyze_fringe(const Fringe& fringe, double wavelength_nm, const AnalysisOptions& options = {});

/// Visibility the pipeline reports on the noiseless P(1_3, 1_4) trace.
/// Throws FitError if the fit fails.
double exact_visibility(const ScanResult& scan, double wavelength_nm, const AnalysisOptions& options = {});

/// Bisects bunching_fidelity in [0, 1] until exact_visibility hits `target`.
/// Throws ValidationError if the target lies outside the reachable range.
double tune_bunching_fidelity(const InterferometerSpec& spec, SourceModel source, double target_visibility,
                              const AnalysisOptions& options = {});

}  // namespace noonsim
