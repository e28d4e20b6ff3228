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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "noonsim/error.hpp"
#include "noonsim/experiment.hpp"
#include "oracles.hpp"

namespace noonsim {
namespace {

constexpr double kLambda = 806.0;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

InterferometerSpec ideal_spec(BeamsplitterSpec spbs, std::vector<double> scan) {
  InterferometerSpec spec;
  spec.spbs = spbs;
  spec.scan_nm = std::move(scan);
  return spec;
}

SourceModel source(double eta, double beta) {
  SourceModel s;
  s.overlap = eta;
  s.bunching_fidelity = beta;
  return s;
}

// Full-mixture oracle built from 2x2 composite transfer matrices only.
double mixture_coincidence_oracle(const InterferometerSpec& spec, const SourceModel& src, double delta) {
  const Complex tau1 = spec.arm_propagation[0].transmission();
  const Complex tau2 = spec.arm_propagation[1].transmission() * std::polar(1.0, 2.0 * std::numbers::pi * delta / spec.wavelength_nm);
  const Eigen::Matrix2cd h = spec.hom_splitter.matrix();
  const Eigen::Matrix2cd s = spec.spbs.matrix();
  Eigen::Matrix2cd p = Eigen::Matrix2cd::Zero();
  p(0, 0) = tau1;
  p(1, 1) = tau2;
  const Eigen::Matrix2cd a = s * p * h;  // HOM inputs -> outputs 3, 4

  const auto coalesced = oracle::marginal(oracle::expand({1, 1}, oracle::isometry_columns(a)), 2);
  const double p_coal = coalesced.count({1, 1}) ? coalesced.at({1, 1}) : 0.0;
  // Labeled photons: A enters HOM input 1, B input 2.
  const double p_dist = std::norm(a(0, 0)) * std::norm(a(1, 1)) + std::norm(a(1, 0)) * std::norm(a(0, 1));
  // Unbunched: A in arm 1, B in arm 2, bypassing the HOM splitter.
  const Eigen::Matrix2cd b = s * p;
  const double p_unb = std::norm(b(0, 0)) * std::norm(b(1, 1)) + std::norm(b(1, 0)) * std::norm(b(0, 1));

  const double eta2 = src.overlap * src.overlap, beta = src.bunching_fidelity;
  return beta * eta2 * p_coal + beta * (1.0 - eta2) * p_dist + (1.0 - beta) * p_unb;
}

BeamsplitterSpec random_spec(std::mt19937_64& rng) {
  const auto [t, r] = oracle::random_passive(rng);
  return {t, r};
}

TEST(AnalyticTest, CoincidenceExamples) {
  EXPECT_NEAR(coincidence_probability_analytic(0.5, 0.5, 0.0), 0.25, 1e-15);
  EXPECT_NEAR(coincidence_probability_analytic(0.3, Complex(0.1, 0.4), std::numbers::pi / 2.0), 0.0, 1e-15);
  EXPECT_NEAR(coincidence_probability_analytic(kInvSqrt2, Complex(0.0, kInvSqrt2), 0.0), 1.0, 1e-15);
  EXPECT_THROW(coincidence_probability_analytic(1.0, 1.0, 0.0), ValidationError);
}

TEST(AnalyticTest, SinglesExamples) {
  for (double phi : {0.0, 0.7, 2.1, 4.0}) {
    const auto s = singles_probability_analytic(0.5, 0.5, phi);
    EXPECT_NEAR(s.p3, s.p4, 1e-15);
    EXPECT_NEAR(s.p3, 0.25 * (1.0 + std::cos(phi)), 1e-15);
  }
  EXPECT_NEAR(singles_probability_analytic(0.5, 0.5, 0.0).p3, 0.5, 1e-15);
  // Lossless r = it: the outputs swap between phi = pi/2 and -pi/2.
  const Complex t = kInvSqrt2, r = Complex(0.0, kInvSqrt2);
  const auto up = singles_probability_analytic(t, r, std::numbers::pi / 2.0);
  const auto down = singles_probability_analytic(t, r, -std::numbers::pi / 2.0);
  EXPECT_NEAR(up.p3, down.p4, 1e-15);
  EXPECT_NEAR(up.p4, down.p3, 1e-15);
  EXPECT_NEAR(up.p3 + up.p4, 1.0, 1e-15);
  for (double phi : {0.0, 1.0, 3.0}) {
    EXPECT_NEAR(singles_probability_analytic(0.0, 0.6, phi).p3, 0.18, 1e-15);
  }
}

TEST(HomStageTest, IndistinguishableCoalesce) {
  const Mixture m = hom_stage(source(1.0, 1.0), BeamsplitterSpec::balanced_lossless());
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].kind, BranchKind::coalesced);
  EXPECT_LT(arm_coincidence_probability(m), 1e-12);
  const StateVector noon = make_noon(2, 0.0, signal_mode(layout::kArm1A), signal_mode(layout::kArm2A), 4);
  EXPECT_GT(std::norm(inner_product(noon, m[0].state)), 1.0 - 1e-12);
}

TEST(HomStageTest, DistinguishableGiveClassicalStatistics) {
  const Mixture m = hom_stage(source(0.0, 1.0), BeamsplitterSpec::balanced_lossless());
  EXPECT_NEAR(arm_coincidence_probability(m), 0.5, 1e-12);
}

TEST(HomStageTest, NoMixingKeepsPhotonsApart) {
  const Mixture m = hom_stage(source(1.0, 1.0), {1.0, 0.0});
  EXPECT_NEAR(arm_coincidence_probability(m), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(m[0].state.amplitude({1, 1, 0, 0})), 1.0, 1e-12);
}

TEST(HomStageTest, ArmCoincidenceMatchesLabeledOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double theta = u(rng) * std::numbers::pi / 2.0;
    const BeamsplitterSpec bs{std::cos(theta), Complex(0.0, std::sin(theta))};
    const double eta = u(rng), beta = u(rng);
    const double eta2 = eta * eta;
    // Lossless coalesced pair: |T^2 + R^2|^2 for one photon per arm.
    const double coal = std::norm(bs.t * bs.t + bs.r * bs.r);
    const double expected =
        beta * eta2 * coal + beta * (1.0 - eta2) * oracle::labeled_coincidence(bs.t, bs.r) + (1.0 - beta);
    EXPECT_NEAR(arm_coincidence_probability(hom_stage(source(eta, beta), bs)), expected, 1e-12);
  }
}

TEST(HomStageTest, WeightsSumToOne) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    double total = 0.0;
    for (const auto& b : hom_stage(source(u(rng), u(rng)), {0.5, 0.5})) total += b.weight;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  EXPECT_EQ(hom_stage(source(1.0, 0.0), {0.5, 0.5}).size(), 1u);
}

TEST(HomStageTest, Validation) {
  EXPECT_THROW(hom_stage(source(1.2, 1.0), BeamsplitterSpec::balanced_lossless()), ValidationError);
  EXPECT_THROW(hom_stage(source(1.0, -0.1), BeamsplitterSpec::balanced_lossless()), ValidationError);
  EXPECT_THROW(hom_stage(source(1.0, 1.0), {1.0, 1.0}), ValidationError);
}

TEST(ScanTest, LosslessBalancedSpbs) {
  const auto spec = ideal_spec(BeamsplitterSpec::balanced_lossless(), uniform_scan(0.0, 2000.0, 20.0));
  const ScanResult scan = run_scan_exact(spec, source(1.0, 1.0));
  for (std::size_t i = 0; i < scan.delta_nm.size(); ++i) {
    const double expected = 0.5 * (1.0 + std::cos(4.0 * std::numbers::pi * scan.delta_nm[i] / kLambda));
    EXPECT_NEAR(scan.outcomes[i].coincidence(), expected, 1e-10);
  }
}

TEST(ScanTest, CoincidenceFormulaForRandomSplitters) {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const BeamsplitterSpec spbs = random_spec(rng);
    const auto spec = ideal_spec(spbs, uniform_scan(0.0, 806.0, 31.0));
    const ScanResult scan = run_scan_exact(spec, source(1.0, 1.0));
    for (std::size_t k = 0; k < scan.delta_nm.size(); ++k) {
      const double phi = 2.0 * std::numbers::pi * scan.delta_nm[k] / kLambda;
      const double expected = 2.0 * std::norm(spbs.t) * std::norm(spbs.r) * (1.0 + std::cos(2.0 * phi));
      worst = std::max(worst, std::abs(scan.outcomes[k].coincidence() - expected));
    }
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(ScanTest, SuperResolutionPeriod) {
  std::mt19937_64 rng(11);
  const auto spec = ideal_spec(random_spec(rng), uniform_scan(0.0, 1612.0, 13.0));
  const ScanResult scan = run_scan_exact(spec, source(1.0, 1.0));
  const std::size_t shift = 31;  // 31 * 13 nm = lambda / 2
  for (std::size_t i = 0; i + shift < scan.delta_nm.size(); ++i) {
    EXPECT_NEAR(scan.outcomes[i].coincidence(), scan.outcomes[i + shift].coincidence(), 1e-12);
  }
}

TEST(ScanTest, CoincidencesIgnorePhaseRelation) {
  using R = BeamsplitterSpec::Relation;
  const auto scan_nm = uniform_scan(0.0, 1000.0, 10.0);
  const auto reference = run_scan_exact(ideal_spec(BeamsplitterSpec::with_relation(0.3, 0.2, R::plus), scan_nm),
                                        source(1.0, 1.0))
                             .coincidence_trace();
  for (R rel : {R::minus, R::plus_i, R::minus_i}) {
    const auto trace =
        run_scan_exact(ideal_spec(BeamsplitterSpec::with_relation(0.3, 0.2, rel), scan_nm), source(1.0, 1.0))
            .coincidence_trace();
    for (std::size_t i = 0; i < trace.size(); ++i) EXPECT_NEAR(trace[i], reference[i], 1e-12);
  }
}

TEST(ScanTest, SinglesInPhaseForPlusAndMinus) {
  using R = BeamsplitterSpec::Relation;
  for (R rel : {R::plus, R::minus}) {
    InterferometerSpec spec = ideal_spec(BeamsplitterSpec::with_relation(0.25, 0.25, rel), uniform_scan(0.0, 1612.0, 13.0));
    spec.hom_splitter = {std::sqrt(0.45), std::sqrt(0.45) * std::polar(1.0, 86.0 * std::numbers::pi / 180.0)};
    const ScanResult scan = run_scan_exact(spec, source(0.95, 0.3));
    std::vector<double> n3, n4;
    for (const auto& o : scan.outcomes) {
      n3.push_back(o.mean_count_3());
      n4.push_back(o.mean_count_4());
    }
    EXPECT_EQ(std::max_element(n3.begin(), n3.end()) - n3.begin(), std::max_element(n4.begin(), n4.end()) - n4.begin());
    for (std::size_t i = 0; i < n3.size(); ++i) EXPECT_NEAR(n3[i], n4[i], 1e-12);
  }
}

TEST(ScanTest, NonlinearAbsorptionInTheScan) {
  const auto spec = ideal_spec({0.5, 0.5}, {0.0, 100.0, kLambda / 4.0});
  const ScanResult scan = run_scan_exact(spec, source(1.0, 1.0));
  EXPECT_LT(scan.outcomes[0].total_count_probability(1), 1e-12);
  EXPECT_NEAR(scan.outcomes[0].total_count_probability(2), 0.5, 1e-12);
  EXPECT_LT(scan.outcomes[2].total_count_probability(2), 1e-12);
  EXPECT_NEAR(scan.outcomes[2].total_count_probability(1), 1.0, 1e-12);
}

TEST(ScanTest, MatchesCompositeMatrixOracle) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    InterferometerSpec spec = ideal_spec(random_spec(rng), uniform_scan(0.0, 806.0, 62.0));
    spec.hom_splitter = random_spec(rng);
    spec.arm_propagation[0] = {0.01 * u(rng), 3e-5 * u(rng), 1e4 * u(rng)};
    spec.arm_propagation[1] = {0.01 * u(rng), 3e-5 * u(rng), 1e4 * u(rng)};
    const SourceModel src = source(u(rng), u(rng));
    const ScanResult scan = run_scan_exact(spec, src);
    for (std::size_t k = 0; k < scan.delta_nm.size(); ++k) {
      EXPECT_NEAR(scan.outcomes[k].coincidence(), mixture_coincidence_oracle(spec, src, scan.delta_nm[k]), 1e-12);
      EXPECT_NEAR(scan.outcomes[k].total_probability(), 1.0, 1e-12);
    }
  }
}

TEST(ScanTest, UnbunchedPairsGiveFlatCoincidences) {
  const auto spec = ideal_spec({0.5, 0.5}, uniform_scan(0.0, 806.0, 26.0));
  const auto trace = run_scan_exact(spec, source(1.0, 0.0)).coincidence_trace();
  for (double p : trace) EXPECT_NEAR(p, 0.0625 + 0.0625, 1e-12);
}

TEST(ScanTest, DefaultMixtureHasBothFringeComponents) {
  InterferometerSpec spec = ideal_spec({0.5, 0.5}, uniform_scan(0.0, 806.0 * 4.0, 806.0 / 32.0));
  spec.hom_splitter = {std::sqrt(0.45), std::sqrt(0.45) * std::polar(1.0, 86.0 * std::numbers::pi / 180.0)};
  const auto trace = run_scan_exact(spec, source(0.95, 0.3)).coincidence_trace();
  // Project onto the lambda and lambda/2 harmonics over four whole periods.
  Complex one = 0.0, two = 0.0;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / 32.0;
    one += trace[i] * std::polar(1.0, -phi);
    two += trace[i] * std::polar(1.0, -2.0 * phi);
  }
  EXPECT_GT(std::abs(one), 1e-3 * std::abs(two));
  EXPECT_GT(std::abs(two), std::abs(one));
}

TEST(ScanTest, ParallelMatchesSerialBitForBit) {
  InterferometerSpec spec = ideal_spec({0.5, 0.5}, uniform_scan(0.0, 4030.0, 25.0));
  spec.hom_splitter = {std::sqrt(0.45), std::sqrt(0.45) * std::polar(1.0, 86.0 * std::numbers::pi / 180.0)};
  spec.arm_propagation[0] = spec.arm_propagation[1] = {0.00795, 1.25e-5, 1e4};
  const ScanResult a = run_scan_exact(spec, source(0.95, 0.25));
  const ScanResult b = run_scan_exact_serial(spec, source(0.95, 0.25));
  ASSERT_EQ(a.outcomes.size(), b.outcomes.size());
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) EXPECT_EQ(a.outcomes[i].probabilities, b.outcomes[i].probabilities);
}

TEST(ScanTest, Validation) {
  InterferometerSpec spec = ideal_spec({0.5, 0.5}, uniform_scan(0.0, 1000.0, 250.0));
  try {
    spec.validate();
    FAIL() << "coarse scan accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("Nyquist"), std::string::npos);
  }
  spec.scan_nm = {0.0, 10.0, 5.0};
  EXPECT_THROW(spec.validate(), ValidationError);
  spec.scan_nm = {};
  EXPECT_THROW(spec.validate(), ValidationError);
  spec.scan_nm = {0.0};
  spec.spbs = {1.0, 1.0};
  EXPECT_THROW(run_scan_exact(spec, source(1.0, 1.0)), ValidationError);
}

TEST(DecayTest, LengthExamples) {
  EXPECT_DOUBLE_EQ(decay_length(1, 0.005), 100.0);
  EXPECT_DOUBLE_EQ(decay_length(2, 0.005), 50.0);
  EXPECT_THROW(decay_length(0, 0.005), ValidationError);
  EXPECT_THROW(decay_length(1, 0.0), ValidationError);
}

TEST(DecayTest, SurvivalMatchesDecayLength) {
  const double k = 2e-5, d = 2.0e4;
  const double delta1 = decay_length(1, k);
  for (int n = 1; n <= 4; ++n) {
    double survival = 0.0;
    for (const auto& [ket, p] : marginal_signal_distribution(apply_propagation(make_fock({n}), signal_mode(0), {0.0, k, d}))) {
      if (ket[0] == n) survival += p;
    }
    EXPECT_NEAR(survival, std::exp(-n * d / delta1), 1e-12);
  }
}

TEST(SourceTest, OverlapFromDelay) {
  EXPECT_DOUBLE_EQ(overlap_from_delay(0.0, 100.0), 1.0);
  EXPECT_NEAR(overlap_from_delay(100.0, 100.0), std::exp(-0.5), 1e-15);
  EXPECT_THROW(overlap_from_delay(1.0, 0.0), ValidationError);
}

}  // namespace
}  // namespace noonsim
