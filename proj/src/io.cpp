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

#include "noonsim/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "noonsim/error.hpp"

namespace noonsim {

namespace {

void write_provenance(std::ostream& out, const Provenance& p) {
  out << "# config_digest=" << p.config_digest << '\n' << "# seed=" << p.seed << '\n';
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream ss(line);
  while (std::getline(ss, part, sep)) parts.push_back(part);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

template <typename T>
T parse_field(const std::string& text, int line, const char* what) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("trace line " + std::to_string(line) + ": bad " + what + " '" + text + "'");
  }
  return value;
}

nlohmann::json fit_json(const FitResult& f) {
  return {{"period_nm", f.period_nm},
          {"period_uncertainty_nm", f.period_uncertainty_nm},
          {"amplitude", f.amplitude},
          {"amplitude_uncertainty", f.amplitude_uncertainty},
          {"offset", f.offset},
          {"offset_uncertainty", f.offset_uncertainty},
          {"phase", f.phase},
          {"visibility", f.visibility},
          {"iterations", f.iterations}};
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return {buf, ptr};
}

void write_trace_csv(std::ostream& out, const CoincidenceTrace& trace) {
  write_provenance(out, {trace.config_digest, trace.seed});
  out << "# wavelength_nm=" << format_double(trace.wavelength_nm) << '\n' << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << format_double(r.delta_nm) << ',' << r.counts_a << ',' << r.counts_b << ',' << r.coincidences << ','
        << format_double(r.duration_s) << '\n';
  }
}

CoincidenceTrace read_trace_csv(std::istream& in) {
  CoincidenceTrace trace;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string value = line.substr(eq + 1);
      if (key == "config_digest") trace.config_digest = value;
      if (key == "seed") trace.seed = parse_field<std::uint64_t>(value, line_no, "seed");
      if (key == "wavelength_nm") trace.wavelength_nm = parse_field<double>(value, line_no, "wavelength");
      continue;
    }
    if (!header_seen) {
      if (line != kTraceHeader) {
        throw ValidationError("trace line " + std::to_string(line_no) + ": expected header '" +
                              std::string(kTraceHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 5) {
      throw ValidationError("trace line " + std::to_string(line_no) + ": expected 5 fields, got " +
                            std::to_string(fields.size()));
    }
    CountRecord r;
    r.delta_nm = parse_field<double>(fields[0], line_no, "delta_nm");
    r.counts_a = parse_field<std::int64_t>(fields[1], line_no, "counts_a");
    r.counts_b = parse_field<std::int64_t>(fields[2], line_no, "counts_b");
    r.coincidences = parse_field<std::int64_t>(fields[3], line_no, "coincidences");
    r.duration_s = parse_field<double>(fields[4], line_no, "duration_s");
    trace.records.push_back(r);
  }
  if (!header_seen) throw ValidationError("trace has no header line");
  if (trace.records.empty()) throw ValidationError("trace has no records");
  trace.validate();
  return trace;
}

CoincidenceTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read trace file " + path.string());
  return read_trace_csv(in);
}

void write_exact_csv(std::ostream& out, const ScanResult& scan, const Provenance& provenance) {
  write_provenance(out, provenance);
  out << kExactHeader << '\n';
  for (std::size_t i = 0; i < scan.delta_nm.size(); ++i) {
    const auto& o = scan.outcomes[i];
    out << format_double(scan.delta_nm[i]) << ',' << format_double(o.coincidence()) << ','
        << format_double(o.mean_count_3()) << ',' << format_double(o.mean_count_4()) << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum, double wavelength_nm,
                        const Provenance& provenance) {
  write_provenance(out, provenance);
  out << kSpectrumHeader << '\n';
  const auto k = spectrum.wavenumbers_per_lambda(wavelength_nm);
  const auto m = spectrum.magnitudes();
  for (std::size_t j = 0; j < k.size(); ++j) out << format_double(k[j]) << ',' << format_double(m[j]) << '\n';
}

void write_columns_csv(std::ostream& out, const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns, const Provenance& provenance) {
  if (names.size() != columns.size() || columns.empty()) throw ValidationError("column names mismatch");
  for (const auto& c : columns) {
    if (c.size() != columns[0].size()) throw ValidationError("columns differ in length");
  }
  write_provenance(out, provenance);
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (std::size_t row = 0; row < columns[0].size(); ++row) {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << format_double(columns[i][row]);
    out << '\n';
  }
}

std::string fit_report_json(const AnalysisReport& report, double wavelength_nm, const Provenance& provenance) {
  nlohmann::json j;
  j["config_digest"] = provenance.config_digest;
  j["seed"] = provenance.seed;
  j["wavelength_nm"] = wavelength_nm;
  j["status"] = report.status;
  j["fit"] = report.fit ? fit_json(*report.fit) : nlohmann::json(nullptr);
  if (report.two_component_fit) {
    j["two_component_fit"] = {{"lambda", fit_json(report.two_component_fit->first)},
                              {"lambda_half", fit_json(report.two_component_fit->second)}};
  } else {
    j["two_component_fit"] = nullptr;
  }
  return j.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace noonsim
