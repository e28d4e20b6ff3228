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

#include "noonsim/experiment.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "noonsim/error.hpp"

namespace noonsim {

namespace {

void require_passive(Complex t, Complex r) {
  if (validate(BeamsplitterSpec{t, r}) == SplitterClass::invalid) {
    throw ValidationError("beamsplitter is not passive (largest singular value > 1)");
  }
}

StateVector labeled_pair() {
  return make_fock({1, 0, 0, 1});  // photon a in arm 1, photon b in arm 2
}

StateVector through_splitter(const StateVector& state, const BeamsplitterSpec& splitter) {
  using namespace layout;
  StateVector out = apply_beamsplitter(state, signal_mode(kArm1A), signal_mode(kArm2A), splitter);
  return apply_beamsplitter(out, signal_mode(kArm1B), signal_mode(kArm2B), splitter);
}

}  // namespace

void SourceModel::validate() const {
  if (!(pair_rate_per_s >= 0.0) || !std::isfinite(pair_rate_per_s)) {
    throw ValidationError("pair rate must be finite and >= 0");
  }
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw ValidationError("overlap must lie in [0, 1]");
  if (!(bunching_fidelity >= 0.0 && bunching_fidelity <= 1.0)) {
    throw ValidationError("bunching fidelity must lie in [0, 1]");
  }
}

double overlap_from_delay(double hom_delay_nm, double coherence_length_nm) {
  if (!(coherence_length_nm > 0.0)) throw ValidationError("coherence length must be positive");
  const double x = hom_delay_nm / coherence_length_nm;
  return std::exp(-0.5 * x * x);
}

const char* to_string(BranchKind kind) {
  switch (kind) {
    case BranchKind::coalesced: return "coalesced";
    case BranchKind::distinguishable: return "distinguishable";
    case BranchKind::unbunched: return "unbunched";
  }
  return "?";
}

Mixture hom_stage(const SourceModel& source, const BeamsplitterSpec& splitter) {
  source.validate();
  if (validate(splitter) == SplitterClass::invalid) {
    throw ValidationError("HOM splitter is not passive (largest singular value > 1)");
  }
  const double beta = source.bunching_fidelity;
  const double eta2 = source.overlap * source.overlap;

  Mixture mixture;
  if (beta * eta2 > 0.0) {
    mixture.push_back({BranchKind::coalesced, beta * eta2, through_splitter(make_fock({1, 1, 0, 0}), splitter)});
  }
  if (beta * (1.0 - eta2) > 0.0) {
    mixture.push_back({BranchKind::distinguishable, beta * (1.0 - eta2), through_splitter(labeled_pair(), splitter)});
  }
  if (1.0 - beta > 0.0) {
    mixture.push_back({BranchKind::unbunched, 1.0 - beta, labeled_pair()});
  }
  return mixture;
}

double arm_coincidence_probability(const Mixture& mixture) {
  double p = 0.0;
  for (const auto& branch : mixture) {
    for (const auto& [ket, prob] : marginal_signal_distribution(branch.state)) {
      int arm1 = 0, arm2 = 0;
      for (std::size_t m = 0; m < ket.size(); ++m) (m % 2 == 0 ? arm1 : arm2) += ket[m];
      if (arm1 > 0 && arm2 > 0) p += branch.weight * prob;
    }
  }
  return p;
}

void InterferometerSpec::validate() const {
  if (!(wavelength_nm > 0.0)) throw ValidationError("wavelength_nm must be positive");
  if (noonsim::validate(hom_splitter) == SplitterClass::invalid) {
    throw ValidationError("hom_splitter is not passive (largest singular value > 1)");
  }
  if (noonsim::validate(spbs) == SplitterClass::invalid) {
    throw ValidationError("spbs is not passive (largest singular value > 1)");
  }
  for (const auto& p : arm_propagation) p.validate();
  if (scan_nm.empty()) throw ValidationError("scan is empty");
  for (std::size_t i = 1; i < scan_nm.size(); ++i) {
    const double step = scan_nm[i] - scan_nm[i - 1];
    if (!(step > 0.0)) throw ValidationError("scan must be strictly increasing");
    if (!(step < wavelength_nm / 4.0)) {
      throw ValidationError("scan step " + std::to_string(step) +
                            " nm violates the Nyquist rule: step must be < wavelength/4 = " +
                            std::to_string(wavelength_nm / 4.0) + " nm to resolve the 2/lambda fringe");
    }
  }
}

std::vector<double> uniform_scan(double start_nm, double stop_nm, double step_nm) {
  if (!(step_nm > 0.0)) throw ValidationError("scan step must be positive");
  if (!(stop_nm >= start_nm)) throw ValidationError("scan stop must be >= start");
  const auto count = static_cast<std::size_t>(std::floor((stop_nm - start_nm) / step_nm + 1e-9)) + 1;
  std::vector<double> scan(count);
  for (std::size_t i = 0; i < count; ++i) scan[i] = start_nm + static_cast<double>(i) * step_nm;
  return scan;
}

double OutcomeDistribution::probability(int n3, int n4) const {
  auto it = probabilities.find({n3, n4});
  return it == probabilities.end() ? 0.0 : it->second;
}

double OutcomeDistribution::total_count_probability(int n) const {
  double p = 0.0;
  for (const auto& [counts, prob] : probabilities) {
    if (counts.first + counts.second == n) p += prob;
  }
  return p;
}

double OutcomeDistribution::mean_count_3() const {
  double m = 0.0;
  for (const auto& [counts, prob] : probabilities) m += counts.first * prob;
  return m;
}

double OutcomeDistribution::mean_count_4() const {
  double m = 0.0;
  for (const auto& [counts, prob] : probabilities) m += counts.second * prob;
  return m;
}

double OutcomeDistribution::total_probability() const {
  double p = 0.0;
  for (const auto& [counts, prob] : probabilities) p += prob;
  return p;
}

OutcomeDistribution outcome_distribution(const StateVector& output_state) {
  OutcomeDistribution out;
  for (const auto& [ket, prob] : marginal_signal_distribution(output_state)) {
    int n3 = 0, n4 = 0;
    // Even signal modes are arm 1 (output 3), odd ones arm 2 (output 4).
    for (std::size_t m = 0; m < ket.size(); ++m) (m % 2 == 0 ? n3 : n4) += ket[m];
    out.probabilities[{n3, n4}] += prob;
  }
  return out;
}

Mixture propagate_arms(const Mixture& mixture, const InterferometerSpec& spec) {
  using namespace layout;
  Mixture out;
  out.reserve(mixture.size());
  for (const auto& branch : mixture) {
    if (branch.state.signal_modes() != kSignalModes) {
      throw ValidationError("branch states must use the 4-mode interferometer layout");
    }
    StateVector s = branch.state;
    s = apply_propagation(s, signal_mode(kArm1A), spec.arm_propagation[0]);
    s = apply_propagation(s, signal_mode(kArm1B), spec.arm_propagation[0]);
    s = apply_propagation(s, signal_mode(kArm2A), spec.arm_propagation[1]);
    s = apply_propagation(s, signal_mode(kArm2B), spec.arm_propagation[1]);
    out.push_back({branch.kind, branch.weight, std::move(s)});
  }
  return out;
}

OutcomeDistribution recombine(const Mixture& propagated, const BeamsplitterSpec& spbs, double phase) {
  using namespace layout;
  OutcomeDistribution total;
  for (const auto& branch : propagated) {
    StateVector s = apply_phase(branch.state, signal_mode(kArm2A), phase);
    s = apply_phase(s, signal_mode(kArm2B), phase);
    s = through_splitter(s, spbs);
    for (const auto& [counts, prob] : outcome_distribution(s).probabilities) {
      total.probabilities[counts] += branch.weight * prob;
    }
  }
  return total;
}

std::vector<double> ScanResult::coincidence_trace() const {
  std::vector<double> trace(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) trace[i] = outcomes[i].coincidence();
  return trace;
}

ScanResult run_scan_exact(const InterferometerSpec& spec, const SourceModel& source) {
  spec.validate();
  const Mixture arms = propagate_arms(hom_stage(source, spec.hom_splitter), spec);

  ScanResult result;
  result.delta_nm = spec.scan_nm;
  result.outcomes.resize(spec.scan_nm.size());
  const auto n = static_cast<std::ptrdiff_t>(spec.scan_nm.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const double phase = phase_of({spec.scan_nm[i], spec.wavelength_nm});
      result.outcomes[i] = recombine(arms, spec.spbs, phase);
    } catch (...) {
#pragma omp critical(noonsim_scan_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

ScanResult run_scan_exact_serial(const InterferometerSpec& spec, const SourceModel& source) {
  spec.validate();
  const Mixture arms = propagate_arms(hom_stage(source, spec.hom_splitter), spec);

  ScanResult result;
  result.delta_nm = spec.scan_nm;
  result.outcomes.reserve(spec.scan_nm.size());
  for (double delta : spec.scan_nm) {
    result.outcomes.push_back(recombine(arms, spec.spbs, phase_of({delta, spec.wavelength_nm})));
  }
  return result;
}

double coincidence_probability_analytic(Complex t, Complex r, double phase) {
  require_passive(t, r);
  return 2.0 * std::norm(t) * std::norm(r) * (1.0 + std::cos(2.0 * phase));
}

SinglesProbability singles_probability_analytic(Complex t, Complex r, double phase) {
  require_passive(t, r);
  const Complex shift = std::polar(1.0, phase);
  return {0.5 * std::norm(t + r * shift), 0.5 * std::norm(r + t * shift)};
}

double decay_length(int n, double k_imag_per_nm) {
  if (n < 1) throw ValidationError("decay length needs n >= 1");
  if (!(k_imag_per_nm > 0.0)) throw ValidationError("decay length needs k_imag > 0");
  return 1.0 / (2.0 * k_imag_per_nm) / n;
}

}  // namespace noonsim
