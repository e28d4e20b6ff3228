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

#include "noonsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>
#include <fftw3.h>

#include "noonsim/error.hpp"

namespace noonsim {

namespace {

constexpr double kGridTolerance = 1e-6;  // relative, on the spacing

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<Complex> dft(const std::vector<Complex>& in, int sign) {
  const int n = static_cast<int>(in.size());
  std::vector<Complex> out(in.size());
  // std::complex<double> is layout-compatible with fftw_complex.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, src, dst, sign, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

double signed_wavenumber(std::size_t bin, std::size_t n, double spacing) {
  const auto j = static_cast<double>(bin);
  const auto size = static_cast<double>(n);
  return (bin <= n / 2 ? j : j - size) / (size * spacing);
}

}  // namespace

double Fringe::spacing_nm() const {
  if (delta_nm.size() != values.size()) throw ValidationError("fringe delta and value lengths differ");
  if (delta_nm.size() < 2) throw ValidationError("fringe needs at least two points");
  const double step = (delta_nm.back() - delta_nm.front()) / static_cast<double>(delta_nm.size() - 1);
  if (!(step > 0.0)) throw ValidationError("fringe deltas must increase");
  for (std::size_t i = 1; i < delta_nm.size(); ++i) {
    if (std::abs((delta_nm[i] - delta_nm[i - 1]) - step) > kGridTolerance * step) {
      throw ValidationError("fringe grid is not uniform at index " + std::to_string(i));
    }
  }
  return step;
}

double Fringe::mean() const {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

Fringe coincidence_fringe(const CoincidenceTrace& trace) { return {trace.delta_nm(), trace.coincidences()}; }

double Spectrum::wavenumber(std::size_t bin) const {
  return static_cast<double>(bin) / (static_cast<double>(size()) * spacing_nm);
}

std::vector<double> Spectrum::wavenumbers_per_nm() const {
  std::vector<double> k(one_sided_bins());
  for (std::size_t j = 0; j < k.size(); ++j) k[j] = wavenumber(j);
  return k;
}

std::vector<double> Spectrum::wavenumbers_per_lambda(double wavelength_nm) const {
  std::vector<double> k = wavenumbers_per_nm();
  for (double& v : k) v *= wavelength_nm;
  return k;
}

double Spectrum::magnitude(std::size_t bin) const {
  const std::size_t n = size();
  const double scale = (bin == 0 || (n % 2 == 0 && bin == n / 2)) ? 1.0 : 2.0;
  return scale * std::abs(coefficients.at(bin)) / static_cast<double>(n);
}

std::vector<double> Spectrum::magnitudes() const {
  std::vector<double> m(one_sided_bins());
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = magnitude(j);
  return m;
}

std::size_t Spectrum::bin_of(double wavenumber_per_nm) const {
  const double j = wavenumber_per_nm * static_cast<double>(size()) * spacing_nm;
  return std::min(static_cast<std::size_t>(std::max(0.0, std::round(j))), one_sided_bins() - 1);
}

Spectrum fft_spectrum(const Fringe& fringe, Window window) {
  if (fringe.size() < kMinSpectrumPoints) {
    throw ValidationError("spectrum needs at least " + std::to_string(kMinSpectrumPoints) + " points");
  }
  Spectrum s;
  s.spacing_nm = fringe.spacing_nm();
  s.mean = fringe.mean();
  const std::size_t n = fringe.size();
  std::vector<Complex> centered(n);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (window == Window::hann) {
      w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    }
    centered[i] = w * (fringe.values[i] - s.mean);
  }
  s.coefficients = dft(centered, FFTW_FORWARD);
  return s;
}

Spectrum fft_spectrum(const CoincidenceTrace& trace, Window window) {
  return fft_spectrum(coincidence_fringe(trace), window);
}

std::vector<double> inverse_spectrum(const Spectrum& spectrum) {
  const std::vector<Complex> back = dft(spectrum.coefficients, FFTW_BACKWARD);
  std::vector<double> out(back.size());
  const auto n = static_cast<double>(back.size());
  for (std::size_t i = 0; i < back.size(); ++i) out[i] = back[i].real() / n + spectrum.mean;
  return out;
}

std::vector<std::size_t> find_peaks(const Spectrum& spectrum, double relative_threshold) {
  const std::vector<double> mag = spectrum.magnitudes();
  if (mag.size() < 3) return {};
  const double top = *std::max_element(mag.begin() + 1, mag.end());
  std::vector<std::size_t> peaks;
  if (top <= 0.0) return peaks;
  for (std::size_t j = 1; j < mag.size(); ++j) {
    const double left = mag[j - 1];
    const double right = j + 1 < mag.size() ? mag[j + 1] : 0.0;
    if (mag[j] > left && mag[j] >= right && mag[j] >= relative_threshold * top) peaks.push_back(j);
  }
  return peaks;
}

Fringe band_stop(const Fringe& fringe, double low_per_nm, double high_per_nm) {
  if (!(low_per_nm >= 0.0) || !(high_per_nm > low_per_nm)) {
    throw ValidationError("band-stop needs 0 <= low < high");
  }
  Spectrum s = fft_spectrum(fringe);
  const std::size_t n = s.size();
  for (std::size_t j = 1; j < n; ++j) {
    const double k = std::abs(signed_wavenumber(j, n, s.spacing_nm));
    if (k >= low_per_nm && k < high_per_nm) s.coefficients[j] = 0.0;
  }
  return {fringe.delta_nm, inverse_spectrum(s)};
}

FitResult fit_sinusoid(const Fringe& fringe, double initial_period_nm, const FitOptions& options) {
  const double spacing = fringe.spacing_nm();
  const auto n = static_cast<Eigen::Index>(fringe.size());
  if (!(initial_period_nm > 0.0) || initial_period_nm / spacing < 4.0) {
    throw FitError(FitError::Reason::insufficient_sampling, "fewer than 4 points per candidate period");
  }
  if (n < 5) throw FitError(FitError::Reason::insufficient_sampling, "sinusoid fit needs at least 5 points");

  // Centering the abscissa decorrelates period and phase.
  const double center = 0.5 * (fringe.delta_nm.front() + fringe.delta_nm.back());
  Eigen::VectorXd x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = fringe.delta_nm[static_cast<std::size_t>(i)] - center;
    y(i) = fringe.values[static_cast<std::size_t>(i)];
  }
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());

  // Parameters (c, a, b, P): c + a cos(2 pi x / P) + b sin(2 pi x / P).
  auto residuals = [&](const Eigen::Vector4d& p) {
    const Eigen::ArrayXd w = (2.0 * std::numbers::pi / p(3)) * x.array();
    return Eigen::VectorXd(y.array() - (p(0) + p(1) * w.cos() + p(2) * w.sin()));
  };
  auto jacobian = [&](const Eigen::Vector4d& p) {
    Eigen::MatrixXd j(n, 4);
    const Eigen::ArrayXd w = (2.0 * std::numbers::pi / p(3)) * x.array();
    j.col(0).setOnes();
    j.col(1) = w.cos().matrix();
    j.col(2) = w.sin().matrix();
    j.col(3) = ((p(1) * w.sin() - p(2) * w.cos()) * w / p(3)).matrix();
    return j;
  };

  Eigen::Vector4d p;
  {
    const Eigen::ArrayXd w = (2.0 * std::numbers::pi / initial_period_nm) * x.array();
    Eigen::MatrixXd basis(n, 3);
    basis.col(0).setOnes();
    basis.col(1) = w.cos().matrix();
    basis.col(2) = w.sin().matrix();
    const Eigen::Vector3d lin = basis.colPivHouseholderQr().solve(y);
    p << lin(0), lin(1), lin(2), initial_period_nm;
  }
  if (std::hypot(p(1), p(2)) <= 1e-9 * scale) {
    throw FitError(FitError::Reason::degenerate_amplitude, "fringe amplitude is zero; period is unconstrained");
  }

  double cost = residuals(p).squaredNorm();
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const Eigen::MatrixXd j = jacobian(p);
    const Eigen::Matrix4d jtj = j.transpose() * j;
    const Eigen::Vector4d grad = j.transpose() * residuals(p);
    // J is d(model)/dp, residual = y - model, so the Gauss-Newton step is +.
    Eigen::Matrix4d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
    const Eigen::Vector4d step = damped.ldlt().solve(grad);
    const Eigen::Vector4d trial = p + step;
    const double trial_cost = trial(3) > 0.0 ? residuals(trial).squaredNorm() : INFINITY;
    if (trial_cost <= cost) {
      const double improvement = cost - trial_cost;
      p = trial;
      cost = trial_cost;
      lambda = std::max(lambda * 0.3, 1e-12);
      const bool small_step = (step.array().abs() <= options.tolerance * (p.array().abs() + options.tolerance)).all();
      if (small_step || improvement <= options.tolerance * options.tolerance * (cost + scale * scale * 1e-30)) {
        converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e16) {
        // No downhill direction left: we are at the minimum to machine precision.
        converged = true;
        break;
      }
    }
  }
  if (!converged) {
    throw FitError(FitError::Reason::not_converged,
                   "sinusoid fit did not converge in " + std::to_string(options.max_iterations) + " iterations");
  }

  const Eigen::MatrixXd j = jacobian(p);
  const Eigen::Matrix4d jtj = j.transpose() * j;
  Eigen::FullPivLU<Eigen::Matrix4d> lu(jtj);
  const double amplitude = std::hypot(p(1), p(2));
  if (lu.rank() < 4 || amplitude <= 1e-9 * scale) {
    throw FitError(FitError::Reason::degenerate_amplitude, "fringe amplitude is zero; period is unconstrained");
  }
  const double dof = static_cast<double>(n - 4);
  const Eigen::Matrix4d cov = (cost / dof) * lu.inverse();

  FitResult fit;
  fit.period_nm = p(3);
  fit.period_uncertainty_nm = std::sqrt(std::max(0.0, cov(3, 3)));
  fit.offset = p(0);
  fit.offset_uncertainty = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.amplitude = amplitude;
  const Eigen::Vector2d g(p(1) / amplitude, p(2) / amplitude);
  fit.amplitude_uncertainty = std::sqrt(std::max(0.0, g.dot(cov.block<2, 2>(1, 1) * g)));
  // a cos + b sin = A cos(w x + phi) with phi = atan2(-b, a); undo the centering.
  const double phase = std::atan2(-p(2), p(1)) - 2.0 * std::numbers::pi * center / p(3);
  fit.phase = std::remainder(phase, 2.0 * std::numbers::pi);
  fit.visibility = fit.offset > 0.0 ? fit.amplitude / fit.offset : 0.0;
  fit.iterations = iter + 1;
  return fit;
}

std::pair<FitResult, FitResult> fit_two_sinusoids(const Fringe& fringe, double wavelength_nm) {
  if (!(wavelength_nm > 0.0)) throw ValidationError("wavelength must be positive");
  const double spacing = fringe.spacing_nm();
  if (wavelength_nm / 2.0 / spacing < 4.0) {
    throw FitError(FitError::Reason::insufficient_sampling, "fewer than 4 points per lambda/2 period");
  }
  const auto n = static_cast<Eigen::Index>(fringe.size());
  if (n < 6) throw FitError(FitError::Reason::insufficient_sampling, "two-component fit needs at least 6 points");

  Eigen::MatrixXd basis(n, 5);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = 2.0 * std::numbers::pi * fringe.delta_nm[static_cast<std::size_t>(i)] / wavelength_nm;
    basis.row(i) << 1.0, std::cos(w), std::sin(w), std::cos(2.0 * w), std::sin(2.0 * w);
    y(i) = fringe.values[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd xtx = basis.transpose() * basis;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
  if (lu.rank() < 5) throw FitError(FitError::Reason::degenerate_amplitude, "two-component design is singular");
  const Eigen::VectorXd coef = lu.solve(basis.transpose() * y);
  const double rss = (y - basis * coef).squaredNorm();
  const Eigen::MatrixXd cov = (rss / static_cast<double>(n - 5)) * lu.inverse();

  auto component = [&](Eigen::Index k, double period) {
    FitResult f;
    const double a = coef(k), b = coef(k + 1);
    f.period_nm = period;
    f.offset = coef(0);
    f.offset_uncertainty = std::sqrt(std::max(0.0, cov(0, 0)));
    f.amplitude = std::hypot(a, b);
    if (f.amplitude > 0.0) {
      const double ga = a / f.amplitude, gb = b / f.amplitude;
      f.amplitude_uncertainty =
          std::sqrt(std::max(0.0, ga * ga * cov(k, k) + gb * gb * cov(k + 1, k + 1) + 2.0 * ga * gb * cov(k, k + 1)));
    } else {
      f.amplitude_uncertainty = std::sqrt(std::max(0.0, 0.5 * (cov(k, k) + cov(k + 1, k + 1))));
    }
    f.phase = std::atan2(-b, a);
    f.visibility = f.offset > 0.0 ? f.amplitude / f.offset : 0.0;
    return f;
  };
  return {component(1, wavelength_nm), component(3, wavelength_nm / 2.0)};
}

VisibilityResult visibility(const FitResult& fit) {
  if (!(fit.offset > 0.0)) throw ValidationError("visibility needs a positive offset");
  const double v = fit.amplitude / fit.offset;
  return {std::clamp(v, 0.0, 1.0), v < 0.0 || v > 1.0};
}

double dominant_period_nm(const Spectrum& spectrum) {
  const std::vector<double> mag = spectrum.magnitudes();
  if (mag.size() < 2) throw ValidationError("spectrum too short");
  const auto peak = static_cast<std::size_t>(std::max_element(mag.begin() + 1, mag.end()) - mag.begin());
  return 1.0 / spectrum.wavenumber(peak);
}

AnalysisReport analyze_fringe(const Fringe& fringe, double wavelength_nm, const AnalysisOptions& options) {
  if (!(wavelength_nm > 0.0)) throw ValidationError("wavelength must be positive");
  AnalysisReport report;
  report.spectrum = fft_spectrum(fringe);
  report.filtered = options.filter ? band_stop(fringe, options.band_low_per_lambda / wavelength_nm,
                                               options.band_high_per_lambda / wavelength_nm)
                                   : fringe;
  try {
    const double seed_period = dominant_period_nm(fft_spectrum(report.filtered));
    report.fit = fit_sinusoid(report.filtered, seed_period, options.fit);
  } catch (const FitError& e) {
    report.status = std::string("fit failed: ") + e.what();
  }
  try {
    report.two_component_fit = fit_two_sinusoids(fringe, wavelength_nm);
  } catch (const FitError& e) {
    if (report.status == "ok") report.status = std::string("two-component fit failed: ") + e.what();
  }
  return report;
}

double exact_visibility(const ScanResult& scan, double wavelength_nm, const AnalysisOptions& options) {
  const AnalysisReport report = analyze_fringe({scan.delta_nm, scan.coincidence_trace()}, wavelength_nm, options);
  if (!report.fit) throw FitError(FitError::Reason::not_converged, report.status);
  return report.fit->visibility;
}

double tune_bunching_fidelity(const InterferometerSpec& spec, SourceModel source, double target_visibility,
                              const AnalysisOptions& options) {
  auto at = [&](double beta) {
    source.bunching_fidelity = beta;
    const ScanResult scan = run_scan_exact(spec, source);
    const AnalysisReport report = analyze_fringe({scan.delta_nm, scan.coincidence_trace()}, spec.wavelength_nm, options);
    // A flat trace has no fringe to fit.
    return (report.fit ? report.fit->visibility : 0.0) - target_visibility;
  };
  double lo = 1e-6, hi = 1.0;
  double f_lo = at(lo), f_hi = at(hi);
  if (f_lo * f_hi > 0.0) {
    throw ValidationError("target visibility " + std::to_string(target_visibility) +
                          " is outside the range reachable by bunching_fidelity");
  }
  for (int i = 0; i < 60 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = at(mid);
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace noonsim
