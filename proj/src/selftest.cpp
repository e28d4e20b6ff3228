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

#include "noonsim/selftest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "noonsim/analysis.hpp"
#include "noonsim/config.hpp"
#include "noonsim/detection.hpp"
#include "noonsim/experiment.hpp"

namespace noonsim {

namespace {

constexpr double kCorruption = 1e-3;

SelftestCheck finish(std::string name, double metric, double tolerance, std::string detail = {}) {
  return {std::move(name), metric < tolerance, metric, tolerance, std::move(detail)};
}

Eigen::Matrix4cd checked_dilation(const BeamsplitterSpec& spec, const SelftestOptions& options) {
  Eigen::Matrix4cd u = dilate(spec);
  if (options.corrupt_dilation) u(0, 0) += kCorruption;
  return u;
}

double unitarity_error(const Eigen::MatrixXcd& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

// Norm defect plus any weight on kets whose photon number differs from `n`.
double conservation_error(const StateVector& s, int n) {
  double wrong = 0.0;
  for (const auto& [ket, amp] : s.amplitudes()) {
    if (ket.total() != n) wrong += std::norm(amp);
  }
  return std::abs(s.squared_norm() - 1.0) + wrong;
}

}  // namespace

bool SelftestReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const SelftestCheck& c) { return c.passed; });
}

BeamsplitterSpec random_passive_splitter(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;
  if (unit(rng) < 1.0 / 3.0) {
    const double theta = 0.5 * std::numbers::pi * unit(rng);
    const Complex global = std::polar(1.0, two_pi * unit(rng));
    const double sign = unit(rng) < 0.5 ? 1.0 : -1.0;
    return {global * std::cos(theta), global * Complex(0.0, sign * std::sin(theta))};
  }
  BeamsplitterSpec spec{std::polar(unit(rng), two_pi * unit(rng)), std::polar(unit(rng), two_pi * unit(rng))};
  const double largest = std::max(std::abs(spec.t + spec.r), std::abs(spec.t - spec.r));
  if (largest > 1.0) {
    const double scale = (0.2 + 0.8 * unit(rng)) / largest;
    spec.t *= scale;
    spec.r *= scale;
  }
  return spec;
}

SelftestCheck check_oracle_equivalence(const SelftestOptions& options, int specs) {
  std::mt19937_64 rng(options.seed);
  InterferometerSpec spec;
  spec.scan_nm = uniform_scan(0.0, spec.wavelength_nm, spec.wavelength_nm / 20.0);
  const SourceModel source;
  double worst = 0.0;
  for (int i = 0; i < specs; ++i) {
    spec.spbs = random_passive_splitter(rng);
    const ScanResult scan = run_scan_exact(spec, source);
    for (std::size_t k = 0; k < scan.delta_nm.size(); ++k) {
      const double phase = phase_of({scan.delta_nm[k], spec.wavelength_nm});
      const double expected = coincidence_probability_analytic(spec.spbs.t, spec.spbs.r, phase);
      worst = std::max(worst, std::abs(scan.outcomes[k].coincidence() - expected));
    }
  }
  return finish("oracle_equivalence", worst, 1e-10, std::to_string(specs) + " random passive splitters");
}

SelftestCheck check_unitarity(const SelftestOptions& options, int specs) {
  std::mt19937_64 rng(options.seed + 1);
  double worst = 0.0;
  for (int i = 0; i < specs; ++i) worst = std::max(worst, unitarity_error(checked_dilation(random_passive_splitter(rng), options)));
  return finish("unitarity", worst, 1e-12, "max |U^dagger U - I| over " + std::to_string(specs) + " dilations");
}

SelftestCheck check_photon_conservation(const SelftestOptions& options, int applications) {
  std::mt19937_64 rng(options.seed + 2);
  std::uniform_int_distribution<int> photons(0, 2);
  std::uniform_int_distribution<int> element(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < applications; ++i) {
    const int n0 = photons(rng), n1 = photons(rng);
    StateVector s = make_fock({{n0, n1}});
    switch (element(rng)) {
      case 0: {
        const BeamsplitterSpec bs = random_passive_splitter(rng);
        if (options.corrupt_dilation) {
          const std::array<std::size_t, 4> modes{0, 1, 2, 3};
          s = apply_mode_transform(s.with_environment_modes(2), modes, checked_dilation(bs, options));
        } else {
          s = apply_beamsplitter(s, signal_mode(0), signal_mode(1), bs);
        }
        break;
      }
      case 1:
        s = apply_propagation(s, signal_mode(i % 2), {unit(rng) * 0.02, unit(rng) * 1e-4, unit(rng) * 2e4});
        break;
      default:
        s = apply_phase(s, signal_mode(i % 2), 2.0 * std::numbers::pi * unit(rng));
        break;
    }
    worst = std::max(worst, conservation_error(s, n0 + n1));
  }
  return finish("photon_conservation", worst, 1e-12,
                std::to_string(applications) + " random element applications (signal + environment)");
}

SelftestCheck check_n_scaling() {
  const PropagationSpec segment{0.0, 1.25e-5, 3.0e4};
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const StateVector out = apply_propagation(make_fock({{n}}), signal_mode(0), segment);
    double survival = 0.0;
    for (const auto& [ket, p] : marginal_signal_distribution(out)) {
      if (ket.counts[0] == n) survival += p;
    }
    const double expected = std::exp(-2.0 * n * segment.k_imag_per_nm * segment.distance_nm);
    worst = std::max(worst, std::abs(survival - expected));
    worst = std::max(worst, std::abs(decay_length(n, segment.k_imag_per_nm) -
                                     decay_length(1, segment.k_imag_per_nm) / n) /
                                decay_length(1, segment.k_imag_per_nm));
  }
  return finish("n_scaling", worst, 1e-12, "survival of |N> vs exp(-2 N k'' d), N = 1..4");
}

SelftestCheck check_nonlinear_absorption() {
  const BeamsplitterSpec spbs = BeamsplitterSpec::with_relation(0.25, 0.25, BeamsplitterSpec::Relation::plus);
  auto photon_number_distribution = [&](double phase) {
    const StateVector in = make_noon(2, phase, signal_mode(0), signal_mode(1));
    std::array<double, 3> p{};
    for (const auto& [ket, prob] : marginal_signal_distribution(apply_beamsplitter(in, signal_mode(0), signal_mode(1), spbs))) {
      p[static_cast<std::size_t>(ket.total())] += prob;
    }
    return p;
  };
  // e^{2 i phi} = -1 leaves no two-photon term; e^{2 i phi} = +1 no one-photon term.
  const double two_at_minus = photon_number_distribution(std::numbers::pi / 2.0)[2];
  const double one_at_plus = photon_number_distribution(0.0)[1];
  return finish("nonlinear_absorption", std::max(two_at_minus, one_at_plus), 1e-12,
                "P(2 signal) at e^{2i phi}=-1, P(1 signal) at e^{2i phi}=+1");
}

SelftestCheck check_pipeline_closure(std::uint64_t seed) {
  const RunConfig config = default_config();
  const CoincidenceTrace trace = generate_trace(config.interferometer(), config.source_model(), config.detectors,
                                                config.duration_per_point_s, seed);
  const AnalysisReport report = analyze_fringe(coincidence_fringe(trace), config.wavelength_nm, config.analysis);
  if (!report.fit) return {"pipeline_closure", false, 0.0, 10.0, report.status};
  const double period_error = std::abs(report.fit->period_nm - config.wavelength_nm / 2.0);
  const double visibility_error = std::abs(report.fit->visibility - 0.20);
  std::ostringstream detail;
  detail << "period " << report.fit->period_nm << " nm (target 403 +- 10), visibility " << report.fit->visibility
         << " (target 0.20 +- 0.02)";
  SelftestCheck check{"pipeline_closure", period_error <= 10.0 && visibility_error <= 0.02, period_error, 10.0,
                      detail.str()};
  return check;
}

SelftestReport run_selftest(const SelftestOptions& options) {
  SelftestReport report;
  report.checks.push_back(check_oracle_equivalence(options));
  report.checks.push_back(check_unitarity(options));
  report.checks.push_back(check_photon_conservation(options));
  report.checks.push_back(check_n_scaling());
  report.checks.push_back(check_nonlinear_absorption());
  report.checks.push_back(check_pipeline_closure(options.seed));
  return report;
}

}  // namespace noonsim
