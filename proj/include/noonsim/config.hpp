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

// Declarative run configuration. JSON with units in every key name; unknown
// keys are rejected and every error carries the line it refers to.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "noonsim/analysis.hpp"
#include "noonsim/detection.hpp"
#include "noonsim/elements.hpp"
#include "noonsim/error.hpp"
#include "noonsim/experiment.hpp"

namespace noonsim {

/// A ValidationError tied to a line of the configuration text (0 if unknown).
class ConfigError : public ValidationError {
 public:
  ConfigError(int line, const std::string& message);

  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct ScanGrid {
  double start_nm = 0.0;
  double stop_nm = 4030.0;
  double step_nm = 25.0;
};

struct OutputPaths {
  std::string directory = "out";
  std::string trace_file = "trace.csv";
  std::string exact_file = "exact.csv";
};

struct RunConfig {
  double wavelength_nm = 806.0;
  ScanGrid scan;
  SourceModel source;
  /// When both are set, the overlap is derived from the HOM delay instead of
  /// being given directly.
  std::optional<double> hom_delay_nm;
  std::optional<double> coherence_length_nm;
  BeamsplitterSpec hom_splitter = BeamsplitterSpec::balanced_lossless();
  BeamsplitterSpec spbs = BeamsplitterSpec::with_relation(0.25, 0.25, BeamsplitterSpec::Relation::plus);
  std::array<PropagationSpec, 2> arm_propagation{};
  DetectorSpec detectors;
  double duration_per_point_s = 10.0;
  std::uint64_t seed = 0;
  AnalysisOptions analysis;
  OutputPaths output;

  /// Source with the overlap resolved.
  SourceModel source_model() const;
  InterferometerSpec interferometer() const;
  /// Throws ValidationError for the first violated invariant.
  void validate() const;
};

/// Parses and validates. Throws ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Sorted-key, fixed-indent JSON. parse_config(canonical_form(c)) reproduces c.
std::string canonical_form(const RunConfig& config);

/// 16 hex digits of FNV-1a over the canonical form without the output section.
std::string config_digest(const RunConfig& config);

/// bunching_fidelity at which the default exact trace has visibility 0.20.
inline constexpr double kDefaultBunchingFidelity = 0.24580267616425444;

/// The shipped default experiment (also configs/default.json).
RunConfig default_config();

}  // namespace noonsim
