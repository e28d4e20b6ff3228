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

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "noonsim/cli.hpp"
#include "noonsim/error.hpp"

namespace cli = noonsim::cli;

int main(int argc, char** argv) {
  CLI::App app{"Two-plasmon NOON-state interference simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Simulate a scan and write the trace and exact probabilities");
  run->add_option("config", config_path, "Run configuration (JSON)")->required();

  std::string trace_path;
  cli::AnalyzeOptions analyze_options;
  bool no_filter = false;
  auto* analyze = app.add_subcommand("analyze", "Spectrum, band-stop filter and sinusoid fit of a trace");
  analyze->add_option("trace", trace_path, "Trace CSV")->required();
  analyze->add_option("--band-lo", analyze_options.band_low_per_lambda, "Lower band-stop edge in units of 1/lambda");
  analyze->add_option("--band-hi", analyze_options.band_high_per_lambda, "Upper band-stop edge in units of 1/lambda");
  analyze->add_flag("--no-filter", no_filter, "Fit the raw trace");

  std::string figure;
  std::optional<std::uint64_t> seed;
  auto* reproduce = app.add_subcommand("reproduce", "Write plot-ready data for one figure");
  reproduce->add_option("figure", figure, "fig2, fig3, fig4 or fig5")->required();
  reproduce->add_option("--seed", seed, "Master seed (default: the default config seed)");

  noonsim::SelftestOptions selftest_options;
  auto* selftest = app.add_subcommand("selftest", "Run the invariant self-test suite");
  selftest->add_flag("--corrupt-dilation", selftest_options.corrupt_dilation,
                     "Perturb every dilation (negative control)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kSuccess : cli::kValidationError;
  }

  try {
    if (*run) {
      cli::cmd_run(config_path, std::cout);
    } else if (*analyze) {
      analyze_options.filter = !no_filter;
      cli::cmd_analyze(trace_path, analyze_options, std::cout);
    } else if (*reproduce) {
      cli::cmd_reproduce(figure, seed, std::cout);
    } else if (*selftest) {
      if (!cli::cmd_selftest(selftest_options, std::cout).passed()) return cli::kSelftestFailure;
    }
  } catch (const noonsim::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kRuntimeError;
  }
  return cli::kSuccess;
}
