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

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "noonsim/analysis.hpp"
#include "noonsim/error.hpp"
#include "oracles.hpp"

namespace noonsim {
namespace {

constexpr double kLambda = 806.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 64 points spanning exactly two wavelengths: both lines sit on bins 2 and 4.
Fringe tiled(double a1, double a2, double offset = 100.0, double p1 = 0.3, double p2 = -1.1) {
  Fringe f;
  const double step = kLambda / 32.0;
  for (int i = 0; i < 64; ++i) {
    const double d = i * step;
    f.delta_nm.push_back(d);
    f.values.push_back(offset + a1 * std::cos(kTwoPi * d / kLambda + p1) + a2 * std::cos(2.0 * kTwoPi * d / kLambda + p2));
  }
  return f;
}

Fringe scan_grid(const std::function<double(double)>& f) {
  Fringe out;
  for (double d : uniform_scan(0.0, 4030.0, 25.0)) {
    out.delta_nm.push_back(d);
    out.values.push_back(f(d));
  }
  return out;
}

Fringe poisson_fringe(std::uint64_t seed, double period, double mean, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  const double phase = u(rng);
  return scan_grid([&](double d) {
    return static_cast<double>(
        std::poisson_distribution<long>(mean + amplitude * std::cos(kTwoPi * d / period + phase))(rng));
  });
}

TEST(SpectrumTest, MatchesDirectDft) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (std::size_t n : {16u, 17u, 64u, 162u, 255u}) {
    Fringe f;
    for (std::size_t i = 0; i < n; ++i) {
      f.delta_nm.push_back(10.0 * i);
      f.values.push_back(50.0 + g(rng));
    }
    const Spectrum s = fft_spectrum(f);
    std::vector<double> centered = f.values;
    for (double& v : centered) v -= f.mean();
    const auto expected = oracle::direct_dft(centered);
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(std::abs(s.coefficients[k] - expected[k]), 0.0, 1e-9);
  }
}

TEST(SpectrumTest, HalfWavelengthSinusoidPeaksAtTwo) {
  const Spectrum s = fft_spectrum(tiled(0.0, 7.0));
  const auto k = s.wavenumbers_per_lambda(kLambda);
  const auto peaks = find_peaks(s, 0.1);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_NEAR(k[peaks[0]], 2.0, 1e-12);
  EXPECT_NEAR(s.magnitude(peaks[0]), 7.0, 1e-10);
}

TEST(SpectrumTest, ConstantTraceHasZeroSpectrum) {
  const Spectrum s = fft_spectrum(tiled(0.0, 0.0, 42.0));
  for (double m : s.magnitudes()) EXPECT_NEAR(m, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(s.mean, 42.0);
}

TEST(SpectrumTest, TwoComponentAmplitudeRatio) {
  const Spectrum s = fft_spectrum(tiled(3.0, 12.0));
  const auto peaks = find_peaks(s, 0.1);
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_NEAR(s.magnitude(peaks[0]) / s.magnitude(peaks[1]), 0.25, 1e-12);
}

TEST(SpectrumTest, Linearity) {
  const Fringe x = tiled(3.0, 1.0, 10.0), y = tiled(-2.0, 5.0, 7.0, 1.3, 0.2);
  Fringe z = x;
  for (std::size_t i = 0; i < z.size(); ++i) z.values[i] = 2.5 * x.values[i] - 0.5 * y.values[i];
  const Spectrum sx = fft_spectrum(x), sy = fft_spectrum(y), sz = fft_spectrum(z);
  for (std::size_t k = 0; k < sz.size(); ++k) {
    EXPECT_NEAR(std::abs(sz.coefficients[k] - (2.5 * sx.coefficients[k] - 0.5 * sy.coefficients[k])), 0.0, 1e-10);
  }
}

TEST(SpectrumTest, Parseval) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  const Fringe f = scan_grid([&](double) { return 5.0 + g(rng); });
  double time_power = 0.0, freq_power = 0.0;
  for (double v : f.values) time_power += (v - f.mean()) * (v - f.mean());
  for (const Complex& c : fft_spectrum(f).coefficients) freq_power += std::norm(c);
  EXPECT_NEAR(freq_power / static_cast<double>(f.size()), time_power, 1e-9 * time_power);
}

TEST(SpectrumTest, InverseRoundTrip) {
  const Fringe f = tiled(3.0, 4.0);
  const auto back = inverse_spectrum(fft_spectrum(f));
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(back[i], f.values[i], 1e-10);
}

TEST(SpectrumTest, InputChecks) {
  Fringe short_fringe;
  for (int i = 0; i < 15; ++i) {
    short_fringe.delta_nm.push_back(i);
    short_fringe.values.push_back(1.0);
  }
  EXPECT_THROW(fft_spectrum(short_fringe), ValidationError);
  Fringe uneven = tiled(1.0, 1.0);
  uneven.delta_nm[10] += 1.0;
  EXPECT_THROW(fft_spectrum(uneven), ValidationError);
}

TEST(SpectrumTest, HannWindowReducesLeakage) {
  const Fringe f = scan_grid([](double d) { return 10.0 + std::cos(kTwoPi * d / 403.0); });
  const Spectrum plain = fft_spectrum(f), hann = fft_spectrum(f, Window::hann);
  const std::size_t far = plain.bin_of(5.0 / kLambda);
  EXPECT_LT(hann.magnitude(far), plain.magnitude(far));
}

TEST(BandStopTest, SuppressesSingleParticleLine) {
  const Fringe f = tiled(3.0, 12.0);
  const Fringe g = band_stop(f, kDefaultBandLowPerLambda / kLambda, kDefaultBandHighPerLambda / kLambda);
  const Spectrum before = fft_spectrum(f), after = fft_spectrum(g);
  const std::size_t b1 = before.bin_of(1.0 / kLambda), b2 = before.bin_of(2.0 / kLambda);
  const double suppression_db = 20.0 * std::log10(before.magnitude(b1) / std::max(after.magnitude(b1), 1e-300));
  EXPECT_GE(suppression_db, 40.0);
  EXPECT_LT(std::abs(after.magnitude(b2) / before.magnitude(b2) - 1.0), 0.01);
  EXPECT_NEAR(g.mean(), f.mean(), 1e-9);
}

TEST(BandStopTest, BandWithoutContentIsIdentity) {
  const Fringe f = tiled(3.0, 12.0);
  const Fringe g = band_stop(f, 5.0 / kLambda, 6.0 / kLambda);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(g.values[i], f.values[i], 1e-9);
  // Band beyond the Nyquist wavenumber selects no bins at all.
  const Fringe h = band_stop(f, 100.0 / kLambda, 200.0 / kLambda);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(h.values[i], f.values[i], 1e-9);
}

TEST(BandStopTest, FullBandLeavesTheMean) {
  const Fringe f = tiled(3.0, 12.0, 55.0);
  const Fringe g = band_stop(f, 0.0, 1.0);
  for (double v : g.values) EXPECT_NEAR(v, 55.0, 1e-9);
}

TEST(BandStopTest, InvalidBand) {
  EXPECT_THROW(band_stop(tiled(1.0, 1.0), 0.002, 0.001), ValidationError);
  EXPECT_THROW(band_stop(tiled(1.0, 1.0), -0.1, 0.001), ValidationError);
}

TEST(FitTest, NoiselessRecovery) {
  const Fringe f = scan_grid([](double d) { return 1000.0 + 200.0 * std::cos(kTwoPi * d / 403.0 + 0.7); });
  const FitResult r = fit_sinusoid(f, 400.0);
  EXPECT_NEAR(r.period_nm, 403.0, 1e-8);
  EXPECT_NEAR(r.amplitude, 200.0, 1e-7);
  EXPECT_NEAR(r.offset, 1000.0, 1e-7);
  EXPECT_NEAR(std::remainder(r.phase - 0.7, kTwoPi), 0.0, 1e-8);
  EXPECT_NEAR(r.visibility, 0.2, 1e-10);
  EXPECT_LT(r.period_uncertainty_nm, 1e-6);
}

TEST(FitTest, PoissonNoiseWithinTenNanometres) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FitResult r = fit_sinusoid(poisson_fringe(seed, 403.0, 1300.0, 260.0), 400.0);
    EXPECT_NEAR(r.period_nm, 403.0, 10.0);
  }
}

TEST(FitTest, UncertaintyCoversTruth) {
  int covered = 0;
  for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
    const Fringe f = poisson_fringe(seed, 403.0, 1300.0, 260.0);
    const FitResult r = fit_sinusoid(f, dominant_period_nm(fft_spectrum(f)));
    covered += std::abs(r.period_nm - 403.0) <= 2.0 * r.period_uncertainty_nm;
  }
  EXPECT_GE(covered, 95);
}

TEST(FitTest, Deterministic) {
  const Fringe f = poisson_fringe(3, 403.0, 1300.0, 260.0);
  const FitResult a = fit_sinusoid(f, 400.0), b = fit_sinusoid(f, 400.0);
  EXPECT_EQ(a.period_nm, b.period_nm);
  EXPECT_EQ(a.period_uncertainty_nm, b.period_uncertainty_nm);
}

TEST(FitTest, FailureReasons) {
  const Fringe flat = scan_grid([](double) { return 7.0; });
  try {
    fit_sinusoid(flat, 403.0);
    FAIL() << "flat fringe fitted";
  } catch (const FitError& e) {
    EXPECT_EQ(e.reason(), FitError::Reason::degenerate_amplitude);
  }
  const Fringe f = scan_grid([](double d) { return 10.0 + std::cos(kTwoPi * d / 403.0); });
  try {
    fit_sinusoid(f, 80.0);
    FAIL() << "undersampled period accepted";
  } catch (const FitError& e) {
    EXPECT_EQ(e.reason(), FitError::Reason::insufficient_sampling);
  }
  try {
    fit_sinusoid(f, 385.0, {1, 1e-12});
    FAIL() << "converged in one iteration";
  } catch (const FitError& e) {
    EXPECT_EQ(e.reason(), FitError::Reason::not_converged);
  }
}

TEST(TwoSinusoidTest, RecoversBothAmplitudes) {
  const Fringe f = scan_grid([](double d) {
    return 1300.0 + 70.0 * std::cos(kTwoPi * d / kLambda + 0.4) + 260.0 * std::cos(kTwoPi * d / (kLambda / 2.0) - 1.0);
  });
  const auto [one, two] = fit_two_sinusoids(f, kLambda);
  EXPECT_NEAR(one.amplitude, 70.0, 0.05 * 70.0);
  EXPECT_NEAR(two.amplitude, 260.0, 0.05 * 260.0);
  EXPECT_NEAR(one.offset, 1300.0, 1e-6);
  EXPECT_DOUBLE_EQ(one.period_nm, kLambda);
  EXPECT_DOUBLE_EQ(two.period_nm, kLambda / 2.0);
}

TEST(TwoSinusoidTest, SingleComponentLeavesSecondNearZero) {
  const Fringe f = poisson_fringe(9, kLambda / 2.0, 1300.0, 260.0);
  const auto [one, two] = fit_two_sinusoids(f, kLambda);
  EXPECT_LT(one.amplitude, 3.0 * one.amplitude_uncertainty);
  EXPECT_NEAR(two.amplitude, 260.0, 5.0 * two.amplitude_uncertainty);
}

TEST(VisibilityTest, Examples) {
  FitResult f;
  f.amplitude = 20.0;
  f.offset = 100.0;
  EXPECT_DOUBLE_EQ(visibility(f).value, 0.2);
  EXPECT_FALSE(visibility(f).out_of_range);
  f.amplitude = 0.0;
  EXPECT_DOUBLE_EQ(visibility(f).value, 0.0);
  f.amplitude = 150.0;
  EXPECT_DOUBLE_EQ(visibility(f).value, 1.0);
  EXPECT_TRUE(visibility(f).out_of_range);
  f.offset = 0.0;
  EXPECT_THROW(visibility(f), ValidationError);
}

TEST(VisibilityTest, IdealSimulationHasUnitContrast) {
  InterferometerSpec spec;
  spec.spbs = BeamsplitterSpec::balanced_lossless();
  spec.scan_nm = uniform_scan(0.0, 4030.0, 25.0);
  const ScanResult scan = run_scan_exact(spec, SourceModel{});
  const Fringe fringe{scan.delta_nm, scan.coincidence_trace()};
  AnalysisOptions unfiltered;
  unfiltered.filter = false;
  const AnalysisReport raw = analyze_fringe(fringe, kLambda, unfiltered);
  ASSERT_TRUE(raw.fit);
  EXPECT_NEAR(raw.fit->visibility, 1.0, 1e-6);
  EXPECT_NEAR(raw.fit->period_nm, kLambda / 2.0, 1e-6);
  // Leakage of the 2/lambda line into the stop band shifts the filtered fit slightly.
  const AnalysisReport filtered = analyze_fringe(fringe, kLambda);
  ASSERT_TRUE(filtered.fit);
  EXPECT_NEAR(filtered.fit->period_nm, kLambda / 2.0, 1.0);
}

TEST(AnalyzeTest, FlatTraceReportsStatus) {
  const AnalysisReport report = analyze_fringe(scan_grid([](double) { return 3.0; }), kLambda);
  EXPECT_FALSE(report.fit);
  EXPECT_NE(report.status.find("fit failed"), std::string::npos);
}

TEST(AnalyzeTest, UnfilteredKeepsInput) {
  const Fringe f = tiled(3.0, 12.0);
  AnalysisOptions options;
  options.filter = false;
  const AnalysisReport report = analyze_fringe(f, kLambda, options);
  EXPECT_EQ(report.filtered.values, f.values);
}

TEST(TuneTest, BisectionHitsTarget) {
  InterferometerSpec spec;
  spec.spbs = {0.5, 0.5};
  spec.hom_splitter = {std::sqrt(0.45), std::sqrt(0.45) * std::polar(1.0, 86.0 * std::numbers::pi / 180.0)};
  spec.scan_nm = uniform_scan(0.0, 4030.0, 25.0);
  SourceModel src;
  src.overlap = 0.95;
  const double beta = tune_bunching_fidelity(spec, src, 0.3);
  src.bunching_fidelity = beta;
  EXPECT_NEAR(exact_visibility(run_scan_exact(spec, src), kLambda), 0.3, 1e-9);
  EXPECT_THROW(tune_bunching_fidelity(spec, src, 1.5), ValidationError);
}

}  // namespace
}  // namespace noonsim
