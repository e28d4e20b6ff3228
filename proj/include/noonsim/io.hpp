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

// Plot-ready text artifacts. Every file carries the config digest and seed:
// CSV files in leading '#' comment lines, JSON reports as fields.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "noonsim/analysis.hpp"
#include "noonsim/detection.hpp"
#include "noonsim/experiment.hpp"

namespace noonsim {

inline constexpr std::string_view kTraceHeader = "delta_nm,counts_a,counts_b,coincidences,duration_s";
inline constexpr std::string_view kSpectrumHeader = "wavenumber_per_lambda,magnitude";
inline constexpr std::string_view kExactHeader = "delta_nm,p_coincidence,mean_n3,mean_n4";

/// Shortest decimal that reads back to the same double.
std::string format_double(double value);

struct Provenance {
  std::string config_digest;
  std::uint64_t seed = 0;
};

void write_trace_csv(std::ostream& out, const CoincidenceTrace& trace);
/// Throws ValidationError naming the offending line.
CoincidenceTrace read_trace_csv(std::istream& in);
CoincidenceTrace read_trace_csv(const std::filesystem::path& path);

void write_exact_csv(std::ostream& out, const ScanResult& scan, const Provenance& provenance);
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum, double wavelength_nm,
                        const Provenance& provenance);

/// Generic columnar CSV; all columns must have the same length.
void write_columns_csv(std::ostream& out, const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns, const Provenance& provenance);

/// JSON fit report (status, period, uncertainties, visibility, two-component fit).
std::string fit_report_json(const AnalysisReport& report, double wavelength_nm, const Provenance& provenance);

/// Writes `content` to `path`, creating parent directories. Throws
/// std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace noonsim
