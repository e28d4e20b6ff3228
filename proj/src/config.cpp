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

#include "noonsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace noonsim {

using nlohmann::json;

ConfigError::ConfigError(int line, const std::string& message)
    : ValidationError(line > 0 ? "config line " + std::to_string(line) + ": " + message : "config: " + message),
      line_(line) {}

namespace {

// A key path such as {"arm_propagation", "1", "distance_nm"}. Numeric
// components are array indices.
using Path = std::vector<std::string>;

std::string dotted(const Path& path) {
  std::string out;
  for (const auto& p : path) {
    if (!p.empty() && std::isdigit(static_cast<unsigned char>(p[0]))) {
      out += "[" + p + "]";
    } else {
      out += (out.empty() ? "" : ".") + p;
    }
  }
  return out;
}

int line_at(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Locates a key path in the raw text by scanning for each quoted key in turn.
// An index component selects the n-th occurrence of the key that follows it.
int line_of(std::string_view text, const Path& path) {
  std::size_t pos = 0;
  std::size_t skip = 0;
  bool found_any = false;
  for (const auto& part : path) {
    if (!part.empty() && std::isdigit(static_cast<unsigned char>(part[0]))) {
      skip = std::stoul(part);
      continue;
    }
    const std::string quoted = "\"" + part + "\"";
    std::size_t hit = text.find(quoted, pos);
    for (std::size_t i = 0; i < skip && hit != std::string_view::npos; ++i) {
      hit = text.find(quoted, hit + quoted.size());
    }
    skip = 0;
    if (hit == std::string_view::npos) break;
    pos = hit + quoted.size();
    found_any = true;
  }
  return found_any ? line_at(text, pos) : 0;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const Path& path, const std::string& message) const {
    throw ConfigError(line_of(text_, path), (path.empty() ? "" : dotted(path) + ": ") + message);
  }

  const json& object(const json& j, const Path& path, const std::set<std::string>& allowed) const {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
      if (!allowed.count(key)) {
        Path p = path;
        p.push_back(key);
        fail(p, "unknown key '" + key + "'");
      }
    }
    return j;
  }

  double number(const json& parent, const Path& path, const std::string& key, double fallback) const {
    if (!parent.contains(key)) return fallback;
    return number_at(parent.at(key), extend(path, key));
  }

  double number_at(const json& j, const Path& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
  }

  std::optional<double> optional_number(const json& parent, const Path& path, const std::string& key) const {
    if (!parent.contains(key)) return std::nullopt;
    return number_at(parent.at(key), extend(path, key));
  }

  std::string string(const json& parent, const Path& path, const std::string& key, std::string fallback) const {
    if (!parent.contains(key)) return fallback;
    const json& j = parent.at(key);
    if (!j.is_string()) fail(extend(path, key), "expected a string");
    return j.get<std::string>();
  }

  bool boolean(const json& parent, const Path& path, const std::string& key, bool fallback) const {
    if (!parent.contains(key)) return fallback;
    const json& j = parent.at(key);
    if (!j.is_boolean()) fail(extend(path, key), "expected true or false");
    return j.get<bool>();
  }

  std::uint64_t seed(const json& parent, const Path& path, const std::string& key, std::uint64_t fallback) const {
    if (!parent.contains(key)) return fallback;
    const json& j = parent.at(key);
    if (!j.is_number_unsigned()) {
      if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
      fail(extend(path, key), "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
  }

  Complex complex(const json& parent, const Path& path, const std::string& key, Complex fallback) const {
    if (!parent.contains(key)) return fallback;
    const json& j = parent.at(key);
    const Path p = extend(path, key);
    if (!j.is_array() || j.size() != 2) fail(p, "expected [re, im]");
    return {number_at(j[0], p), number_at(j[1], p)};
  }

  static Path extend(Path path, const std::string& key) {
    path.push_back(key);
    return path;
  }

  // Runs `check` and re-throws its ValidationError against `path`.
  template <typename F>
  void check(const Path& path, F&& check) const {
    try {
      check();
    } catch (const ConfigError&) {
      throw;
    } catch (const ValidationError& e) {
      fail(path, e.what());
    }
  }

 private:
  std::string_view text_;
};

BeamsplitterSpec read_splitter(const Reader& rd, const json& root, const std::string& key, BeamsplitterSpec fallback) {
  if (!root.contains(key)) return fallback;
  const Path path{key};
  const json& j = rd.object(root.at(key), path, {"t", "r"});
  return {rd.complex(j, path, "t", fallback.t), rd.complex(j, path, "r", fallback.r)};
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const RunConfig& c, bool with_output) {
  json j;
  j["wavelength_nm"] = c.wavelength_nm;
  j["scan"] = {{"start_nm", c.scan.start_nm}, {"stop_nm", c.scan.stop_nm}, {"step_nm", c.scan.step_nm}};
  json source = {{"pair_rate_per_s", c.source.pair_rate_per_s},
                 {"overlap", c.source.overlap},
                 {"bunching_fidelity", c.source.bunching_fidelity}};
  if (c.hom_delay_nm) source["hom_delay_nm"] = *c.hom_delay_nm;
  if (c.coherence_length_nm) source["coherence_length_nm"] = *c.coherence_length_nm;
  j["source"] = source;
  j["hom_splitter"] = {{"t", complex_json(c.hom_splitter.t)}, {"r", complex_json(c.hom_splitter.r)}};
  j["spbs"] = {{"t", complex_json(c.spbs.t)}, {"r", complex_json(c.spbs.r)}};
  j["arm_propagation"] = json::array();
  for (const auto& p : c.arm_propagation) {
    j["arm_propagation"].push_back(
        {{"k_real_per_nm", p.k_real_per_nm}, {"k_imag_per_nm", p.k_imag_per_nm}, {"distance_nm", p.distance_nm}});
  }
  j["detectors"] = {{"efficiency_a", c.detectors.efficiency_a},
                    {"efficiency_b", c.detectors.efficiency_b},
                    {"dark_rate_per_s", c.detectors.dark_rate_per_s},
                    {"window_ns", c.detectors.window_ns}};
  j["duration_per_point_s"] = c.duration_per_point_s;
  j["seed"] = c.seed;
  j["analysis"] = {{"band_lo_per_lambda", c.analysis.band_low_per_lambda},
                   {"band_hi_per_lambda", c.analysis.band_high_per_lambda},
                   {"filter", c.analysis.filter},
                   {"max_iterations", c.analysis.fit.max_iterations}};
  if (with_output) {
    j["output"] = {{"directory", c.output.directory},
                   {"trace_file", c.output.trace_file},
                   {"exact_file", c.output.exact_file}};
  }
  return j;
}

}  // namespace

SourceModel RunConfig::source_model() const {
  SourceModel s = source;
  if (hom_delay_nm && coherence_length_nm) s.overlap = overlap_from_delay(*hom_delay_nm, *coherence_length_nm);
  return s;
}

InterferometerSpec RunConfig::interferometer() const {
  InterferometerSpec spec;
  spec.wavelength_nm = wavelength_nm;
  spec.hom_splitter = hom_splitter;
  spec.spbs = spbs;
  spec.arm_propagation = arm_propagation;
  spec.scan_nm = uniform_scan(scan.start_nm, scan.stop_nm, scan.step_nm);
  return spec;
}

void RunConfig::validate() const {
  if (!(wavelength_nm > 0.0)) throw ValidationError("wavelength_nm must be positive");
  if (hom_delay_nm.has_value() != coherence_length_nm.has_value()) {
    throw ValidationError("hom_delay_nm and coherence_length_nm must be given together");
  }
  source_model().validate();
  if (!(scan.step_nm < wavelength_nm / 4.0)) {
    throw ValidationError("scan step " + std::to_string(scan.step_nm) +
                          " nm violates the Nyquist rule: step must be < wavelength/4 = " +
                          std::to_string(wavelength_nm / 4.0) + " nm");
  }
  interferometer().validate();
  detectors.validate();
  if (!(duration_per_point_s > 0.0)) throw ValidationError("duration_per_point_s must be positive");
  if (!(analysis.band_low_per_lambda >= 0.0 && analysis.band_high_per_lambda > analysis.band_low_per_lambda)) {
    throw ValidationError("analysis band needs 0 <= band_lo_per_lambda < band_hi_per_lambda");
  }
  if (analysis.fit.max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (output.trace_file.empty() || output.exact_file.empty()) throw ValidationError("output file names are empty");
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(line_at(text, e.byte > 0 ? e.byte - 1 : 0), std::string("malformed JSON: ") + e.what());
  }
  const Reader rd(text);
  rd.object(root, {}, {"wavelength_nm", "scan", "source", "hom_splitter", "spbs", "arm_propagation", "detectors",
                       "duration_per_point_s", "seed", "analysis", "output"});

  RunConfig c;
  c.wavelength_nm = rd.number(root, {}, "wavelength_nm", c.wavelength_nm);

  if (root.contains("scan")) {
    const Path p{"scan"};
    const json& j = rd.object(root["scan"], p, {"start_nm", "stop_nm", "step_nm"});
    c.scan.start_nm = rd.number(j, p, "start_nm", c.scan.start_nm);
    c.scan.stop_nm = rd.number(j, p, "stop_nm", c.scan.stop_nm);
    c.scan.step_nm = rd.number(j, p, "step_nm", c.scan.step_nm);
    rd.check(Reader::extend(p, "step_nm"), [&] { uniform_scan(c.scan.start_nm, c.scan.stop_nm, c.scan.step_nm); });
    rd.check(Reader::extend(p, "step_nm"), [&] {
      if (!(c.scan.step_nm < c.wavelength_nm / 4.0)) {
        throw ValidationError("step " + std::to_string(c.scan.step_nm) +
                              " nm violates the Nyquist rule: step must be < wavelength/4 = " +
                              std::to_string(c.wavelength_nm / 4.0) + " nm");
      }
    });
  }

  if (root.contains("source")) {
    const Path p{"source"};
    const json& j = rd.object(root["source"], p,
                              {"pair_rate_per_s", "overlap", "bunching_fidelity", "hom_delay_nm", "coherence_length_nm"});
    c.source.pair_rate_per_s = rd.number(j, p, "pair_rate_per_s", c.source.pair_rate_per_s);
    c.source.overlap = rd.number(j, p, "overlap", c.source.overlap);
    c.source.bunching_fidelity = rd.number(j, p, "bunching_fidelity", c.source.bunching_fidelity);
    c.hom_delay_nm = rd.optional_number(j, p, "hom_delay_nm");
    c.coherence_length_nm = rd.optional_number(j, p, "coherence_length_nm");
    const auto check_unit = [&](const char* key, double v) {
      rd.check(Reader::extend(p, key), [&] {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(key) + " must lie in [0, 1]");
      });
    };
    check_unit("overlap", c.source.overlap);
    check_unit("bunching_fidelity", c.source.bunching_fidelity);
    rd.check(Reader::extend(p, "pair_rate_per_s"), [&] {
      if (!(c.source.pair_rate_per_s >= 0.0) || !std::isfinite(c.source.pair_rate_per_s)) {
        throw ValidationError("pair rate must be finite and >= 0");
      }
    });
    if (c.coherence_length_nm) {
      rd.check(Reader::extend(p, "coherence_length_nm"), [&] {
        if (!(*c.coherence_length_nm > 0.0)) throw ValidationError("coherence length must be positive");
      });
    }
    rd.check(p, [&] {
      if (c.hom_delay_nm.has_value() != c.coherence_length_nm.has_value()) {
        throw ValidationError("hom_delay_nm and coherence_length_nm must be given together");
      }
      c.source_model().validate();
    });
  }

  c.hom_splitter = read_splitter(rd, root, "hom_splitter", c.hom_splitter);
  rd.check({"hom_splitter"}, [&] {
    if (validate(c.hom_splitter) == SplitterClass::invalid) throw ValidationError("splitter is not passive");
  });
  c.spbs = read_splitter(rd, root, "spbs", c.spbs);
  rd.check({"spbs"}, [&] {
    if (validate(c.spbs) == SplitterClass::invalid) throw ValidationError("splitter is not passive");
  });

  if (root.contains("arm_propagation")) {
    const Path p{"arm_propagation"};
    const json& arr = root["arm_propagation"];
    if (!arr.is_array() || arr.size() != 2) rd.fail(p, "expected an array of two arm segments");
    for (std::size_t i = 0; i < 2; ++i) {
      const Path pi = Reader::extend(p, std::to_string(i));
      const json& j = rd.object(arr[i], pi, {"k_real_per_nm", "k_imag_per_nm", "distance_nm"});
      PropagationSpec& arm = c.arm_propagation[i];
      arm.k_real_per_nm = rd.number(j, pi, "k_real_per_nm", arm.k_real_per_nm);
      arm.k_imag_per_nm = rd.number(j, pi, "k_imag_per_nm", arm.k_imag_per_nm);
      arm.distance_nm = rd.number(j, pi, "distance_nm", arm.distance_nm);
      rd.check(pi, [&] { arm.validate(); });
    }
  }

  if (root.contains("detectors")) {
    const Path p{"detectors"};
    const json& j = rd.object(root["detectors"], p, {"efficiency_a", "efficiency_b", "dark_rate_per_s", "window_ns"});
    c.detectors.efficiency_a = rd.number(j, p, "efficiency_a", c.detectors.efficiency_a);
    c.detectors.efficiency_b = rd.number(j, p, "efficiency_b", c.detectors.efficiency_b);
    c.detectors.dark_rate_per_s = rd.number(j, p, "dark_rate_per_s", c.detectors.dark_rate_per_s);
    c.detectors.window_ns = rd.number(j, p, "window_ns", c.detectors.window_ns);
    rd.check(p, [&] { c.detectors.validate(); });
  }

  c.duration_per_point_s = rd.number(root, {}, "duration_per_point_s", c.duration_per_point_s);
  c.seed = rd.seed(root, {}, "seed", c.seed);

  if (root.contains("analysis")) {
    const Path p{"analysis"};
    const json& j = rd.object(root["analysis"], p, {"band_lo_per_lambda", "band_hi_per_lambda", "filter", "max_iterations"});
    c.analysis.band_low_per_lambda = rd.number(j, p, "band_lo_per_lambda", c.analysis.band_low_per_lambda);
    c.analysis.band_high_per_lambda = rd.number(j, p, "band_hi_per_lambda", c.analysis.band_high_per_lambda);
    c.analysis.filter = rd.boolean(j, p, "filter", c.analysis.filter);
    const double iterations = rd.number(j, p, "max_iterations", c.analysis.fit.max_iterations);
    if (iterations != std::floor(iterations) || iterations < 1 || iterations > 1e6) {
      rd.fail(Reader::extend(p, "max_iterations"), "expected an integer in [1, 1000000]");
    }
    c.analysis.fit.max_iterations = static_cast<int>(iterations);
  }

  if (root.contains("output")) {
    const Path p{"output"};
    const json& j = rd.object(root["output"], p, {"directory", "trace_file", "exact_file"});
    c.output.directory = rd.string(j, p, "directory", c.output.directory);
    c.output.trace_file = rd.string(j, p, "trace_file", c.output.trace_file);
    c.output.exact_file = rd.string(j, p, "exact_file", c.output.exact_file);
  }

  // Whole-config invariants not tied to a single key.
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(0, e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string canonical_form(const RunConfig& config) { return to_json(config, true).dump(2) + "\n"; }

std::string config_digest(const RunConfig& config) {
  const std::string text = to_json(config, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig default_config() {
  RunConfig c;
  const double hom_angle = 86.0 * std::numbers::pi / 180.0;
  c.hom_splitter = {Complex(std::sqrt(0.45), 0.0), std::sqrt(0.45) * std::polar(1.0, hom_angle)};
  c.source.overlap = 0.95;
  c.source.bunching_fidelity = kDefaultBunchingFidelity;
  for (auto& arm : c.arm_propagation) arm = {0.00795, 1.25e-5, 10000.0};
  c.seed = 20260101;
  return c;
}

}  // namespace noonsim
