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

// Command implementations behind the noonsim executable.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "noonsim/analysis.hpp"
#include "noonsim/selftest.hpp"

namespace noonsim::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kRuntimeError = 2, kSelftestFailure = 3 };

inline constexpr const char* kOutputDirEnv = "NOONSIM_OUTPUT_DIR";

/// The override from NOONSIM_OUTPUT_DIR if set and non-empty, else `fallback`.
std::filesystem::path output_directory(const std::filesystem::path& fallback);

struct RunOutputs {
  std::filesystem::path trace;
  std::filesystem::path exact;
};

/// Simulates the configured scan and writes the sampled trace and the exact
/// per-point probabilities.
RunOutputs cmd_run(const std::filesystem::path& config_path, std::ostream& log);

struct AnalyzeOptions {
  std::optional<double> band_low_per_lambda;
  std::optional<double> band_high_per_lambda;
  bool filter = true;
  /// Used when the trace carries no wavelength comment.
  double wavelength_nm = 806.0;
};

struct AnalyzeOutputs {
  std::filesystem::path spectrum;
  std::filesystem::path filtered;
  std::filesystem::path report;
  AnalysisReport analysis;
};

/// Writes <stem>_spectrum.csv, <stem>_filtered.csv and <stem>_fit.json next to
/// the trace (or into the override directory).
AnalyzeOutputs cmd_analyze(const std::filesystem::path& trace_path, const AnalyzeOptions& options,
                           std::ostream& log);

inline const std::vector<std::string> kFigureIds{"fig2", "fig3", "fig4", "fig5"};

/// Writes plot-ready data for one figure under <out>/<figure_id>/ and returns
/// the files written.
std::vector<std::filesystem::path> cmd_reproduce(const std::string& figure_id, std::optional<std::uint64_t> seed,
                                                 std::ostream& log);

/// Prints one line per check and returns the report.
SelftestReport cmd_selftest(const SelftestOptions& options, std::ostream& log);

}  // namespace noonsim::cli
