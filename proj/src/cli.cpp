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

#include "noonsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "noonsim/config.hpp"
#include "noonsim/io.hpp"

namespace noonsim::cli {

namespace {

namespace fs = std::filesystem;

template <typename Writer>
fs::path emit(const fs::path& path, Writer&& writer, std::ostream& log) {
  std::ostringstream out;
  writer(out);
  write_file(path, out.str());
  log << "wrote " << path.string() << '\n';
  return path;
}

std::vector<double> sinusoid(const std::vector<double>& delta_nm, const FitResult& f, double offset) {
  std::vector<double> y(delta_nm.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = offset + f.amplitude * std::cos(2.0 * std::numbers::pi * delta_nm[i] / f.period_nm + f.phase);
  }
  return y;
}

std::size_t argmax_in_first_period(const std::vector<double>& delta_nm, const std::vector<double>& values,
                                   double period_nm) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < values.size() && delta_nm[i] - delta_nm.front() < period_nm; ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::vector<double> exact_singles(const ScanResult& scan, bool detector_a) {
  std::vector<double> out;
  out.reserve(scan.outcomes.size());
  for (const auto& o : scan.outcomes) out.push_back(detector_a ? o.mean_count_3() : o.mean_count_4());
  return out;
}

}  // namespace

fs::path output_directory(const fs::path& fallback) {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? fs::path(env) : fallback;
}

RunOutputs cmd_run(const fs::path& config_path, std::ostream& log) {
  const RunConfig config = load_config(config_path);
  const std::string digest = config_digest(config);
  const fs::path dir = output_directory(config.output.directory);

  const InterferometerSpec spec = config.interferometer();
  const ScanResult scan = run_scan_exact(spec, config.source_model());
  CoincidenceTrace trace =
      sample_trace(scan, config.source.pair_rate_per_s, config.duration_per_point_s, config.detectors, config.seed);
  trace.config_digest = digest;
  trace.wavelength_nm = config.wavelength_nm;

  RunOutputs outputs;
  outputs.trace = emit(dir / config.output.trace_file, [&](std::ostream& o) { write_trace_csv(o, trace); }, log);
  outputs.exact = emit(dir / config.output.exact_file,
                       [&](std::ostream& o) { write_exact_csv(o, scan, {digest, config.seed}); }, log);
  return outputs;
}

AnalyzeOutputs cmd_analyze(const fs::path& trace_path, const AnalyzeOptions& options, std::ostream& log) {
  const CoincidenceTrace trace = read_trace_csv(trace_path);
  const double wavelength = trace.wavelength_nm > 0.0 ? trace.wavelength_nm : options.wavelength_nm;
  AnalysisOptions analysis;
  if (options.band_low_per_lambda) analysis.band_low_per_lambda = *options.band_low_per_lambda;
  if (options.band_high_per_lambda) analysis.band_high_per_lambda = *options.band_high_per_lambda;
  analysis.filter = options.filter;
  if (!(analysis.band_low_per_lambda >= 0.0 && analysis.band_high_per_lambda > analysis.band_low_per_lambda)) {
    throw ValidationError("band edges need 0 <= band-lo < band-hi");
  }

  AnalyzeOutputs out;
  out.analysis = analyze_fringe(coincidence_fringe(trace), wavelength, analysis);
  const Provenance provenance{trace.config_digest, trace.seed};
  const fs::path dir = output_directory(trace_path.has_parent_path() ? trace_path.parent_path() : fs::path("."));
  const std::string stem = trace_path.stem().string();

  out.spectrum = emit(dir / (stem + "_spectrum.csv"),
                      [&](std::ostream& o) { write_spectrum_csv(o, out.analysis.spectrum, wavelength, provenance); }, log);
  out.filtered = emit(dir / (stem + "_filtered.csv"), [&](std::ostream& o) {
    write_columns_csv(o, {"delta_nm", "coincidences_filtered"},
                      {out.analysis.filtered.delta_nm, out.analysis.filtered.values}, provenance);
  }, log);
  out.report = emit(dir / (stem + "_fit.json"),
                    [&](std::ostream& o) { o << fit_report_json(out.analysis, wavelength, provenance); }, log);
  if (out.analysis.fit) {
    log << "period " << out.analysis.fit->period_nm << " +- " << out.analysis.fit->period_uncertainty_nm
        << " nm, visibility " << out.analysis.fit->visibility << '\n';
  } else {
    log << out.analysis.status << '\n';
  }
  return out;
}

std::vector<fs::path> cmd_reproduce(const std::string& figure_id, std::optional<std::uint64_t> seed,
                                    std::ostream& log) {
  if (std::find(kFigureIds.begin(), kFigureIds.end(), figure_id) == kFigureIds.end()) {
    throw ValidationError("unknown figure id '" + figure_id + "' (expected fig2, fig3, fig4 or fig5)");
  }
  RunConfig config = default_config();
  if (seed) config.seed = *seed;
  const double lambda = config.wavelength_nm;
  const fs::path dir = output_directory("out") / figure_id;
  std::vector<fs::path> written;

  if (figure_id == "fig5") {
    nlohmann::json summary;
    for (const auto& [name, relation] : {std::pair{"plus", BeamsplitterSpec::Relation::plus},
                                         std::pair{"minus", BeamsplitterSpec::Relation::minus}}) {
      RunConfig variant = config;
      variant.spbs = BeamsplitterSpec::with_relation(0.25, 0.25, relation);
      const Provenance provenance{config_digest(variant), variant.seed};
      const ScanResult scan = run_scan_exact(variant.interferometer(), variant.source_model());
      const CoincidenceTrace trace = sample_trace(scan, variant.source.pair_rate_per_s,
                                                  variant.duration_per_point_s, variant.detectors, variant.seed);
      const auto n3 = exact_singles(scan, true);
      const auto n4 = exact_singles(scan, false);
      written.push_back(emit(dir / (std::string("singles_r_") + name + "_t.csv"), [&](std::ostream& o) {
        write_columns_csv(o, {"delta_nm", "counts_a", "counts_b", "exact_mean_n3", "exact_mean_n4"},
                          {trace.delta_nm(), trace.counts_a(), trace.counts_b(), n3, n4}, provenance);
      }, log));
      const std::size_t a = argmax_in_first_period(scan.delta_nm, n3, lambda);
      const std::size_t b = argmax_in_first_period(scan.delta_nm, n4, lambda);
      const auto fit_a = fit_two_sinusoids({trace.delta_nm(), trace.counts_a()}, lambda).first;
      const auto fit_b = fit_two_sinusoids({trace.delta_nm(), trace.counts_b()}, lambda).first;
      summary[std::string("r_") + name + "_t"] = {{"config_digest", provenance.config_digest},
                                                 {"exact_argmax_delta_nm_a", scan.delta_nm[a]},
                                                 {"exact_argmax_delta_nm_b", scan.delta_nm[b]},
                                                 {"argmax_aligned", a == b},
                                                 {"sampled_phase_a", fit_a.phase},
                                                 {"sampled_phase_b", fit_b.phase}};
    }
    summary["seed"] = config.seed;
    written.push_back(emit(dir / "summary.json", [&](std::ostream& o) { o << summary.dump(2) << '\n'; }, log));
    return written;
  }

  const Provenance provenance{config_digest(config), config.seed};
  const ScanResult scan = run_scan_exact(config.interferometer(), config.source_model());
  CoincidenceTrace trace =
      sample_trace(scan, config.source.pair_rate_per_s, config.duration_per_point_s, config.detectors, config.seed);
  trace.config_digest = provenance.config_digest;
  trace.wavelength_nm = lambda;
  const Fringe raw = coincidence_fringe(trace);
  const AnalysisReport report = analyze_fringe(raw, lambda, config.analysis);

  if (figure_id == "fig2") {
    if (!report.two_component_fit) throw std::runtime_error(report.status);
    const auto& [one, two] = *report.two_component_fit;
    const auto single = sinusoid(raw.delta_nm, one, 0.0);
    const auto noon = sinusoid(raw.delta_nm, two, 0.0);
    std::vector<double> total(raw.size());
    for (std::size_t i = 0; i < total.size(); ++i) total[i] = one.offset + single[i] + noon[i];
    written.push_back(emit(dir / "trace.csv", [&](std::ostream& o) { write_trace_csv(o, trace); }, log));
    written.push_back(emit(dir / "fig2.csv", [&](std::ostream& o) {
      write_columns_csv(o, {"delta_nm", "coincidences", "fit_total", "fit_lambda", "fit_lambda_half"},
                        {raw.delta_nm, raw.values, total, single, noon}, provenance);
    }, log));
  } else if (figure_id == "fig3") {
    written.push_back(emit(dir / "spectrum.csv",
                           [&](std::ostream& o) { write_spectrum_csv(o, report.spectrum, lambda, provenance); }, log));
    const auto k = report.spectrum.wavenumbers_per_lambda(lambda);
    written.push_back(emit(dir / "peaks.csv", [&](std::ostream& o) {
      o << "# config_digest=" << provenance.config_digest << "\n# seed=" << provenance.seed << '\n'
        << "label,wavenumber_per_lambda,magnitude\n";
      for (std::size_t bin : find_peaks(report.spectrum, 0.1)) {
        const char* label = std::abs(k[bin] - 1.0) < std::abs(k[bin] - 2.0) ? "single_particle" : "noon";
        o << label << ',' << format_double(k[bin]) << ',' << format_double(report.spectrum.magnitude(bin)) << '\n';
      }
    }, log));
  } else {
    if (!report.fit) throw std::runtime_error(report.status);
    const Spectrum filtered = fft_spectrum(report.filtered);
    const double residual = filtered.magnitude(filtered.bin_of(1.0 / lambda)) /
                            report.spectrum.magnitude(report.spectrum.bin_of(2.0 / lambda));
    written.push_back(emit(dir / "fig4.csv", [&](std::ostream& o) {
      write_columns_csv(o, {"delta_nm", "coincidences", "filtered", "fit_lambda_half"},
                        {raw.delta_nm, raw.values, report.filtered.values,
                         sinusoid(raw.delta_nm, *report.fit, report.fit->offset)},
                        provenance);
    }, log));
    written.push_back(emit(dir / "filtered_spectrum.csv",
                           [&](std::ostream& o) { write_spectrum_csv(o, filtered, lambda, provenance); }, log));
    written.push_back(emit(dir / "fit.json", [&](std::ostream& o) {
      auto j = nlohmann::json::parse(fit_report_json(report, lambda, provenance));
      j["residual_single_particle_ratio"] = residual;
      o << j.dump(2) << '\n';
    }, log));
  }
  return written;
}

SelftestReport cmd_selftest(const SelftestOptions& options, std::ostream& log) {
  const SelftestReport report = run_selftest(options);
  for (const auto& c : report.checks) {
    log << (c.passed ? "PASS " : "FAIL ") << c.name << ": metric " << c.metric << " (tolerance " << c.tolerance
        << ")";
    if (!c.detail.empty()) log << " - " << c.detail;
    log << '\n';
  }
  log << (report.passed() ? "selftest passed" : "selftest FAILED") << '\n';
  return report;
}

}  // namespace noonsim::cli
