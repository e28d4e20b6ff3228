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

// Invariant self-test suite run by `noonsim selftest`.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "noonsim/elements.hpp"

namespace noonsim {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  /// Worst observed deviation (or the measured quantity for range checks).
  double metric = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;

  bool passed() const;
};

struct SelftestOptions {
  std::uint64_t seed = 7;
  /// Negative control: perturbs every dilation before it is checked and used.
  bool corrupt_dilation = false;
};

/// Random passive splitter: a third of draws are lossless, the rest lossy
/// contractions with random phases.
BeamsplitterSpec random_passive_splitter(std::mt19937_64& rng);

SelftestCheck check_oracle_equivalence(const SelftestOptions& options, int specs = 200);
SelftestCheck check_unitarity(const SelftestOptions& options, int specs = 200);
SelftestCheck check_photon_conservation(const SelftestOptions& options, int applications = 1000);
SelftestCheck check_n_scaling();
SelftestCheck check_nonlinear_absorption();
SelftestCheck check_pipeline_closure(std::uint64_t seed);

SelftestReport run_selftest(const SelftestOptions& options = {});

}  // namespace noonsim
