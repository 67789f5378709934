// Copyright 2026 The qitsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <gtest/gtest.h>

#include "qitsim/benchmarks.hpp"
#include "qitsim/stats.hpp"

namespace qitsim::stats {
namespace {

HybridState st(Dims dims, std::vector<Complex> amps) { return make_state(std::move(dims), std::span<const Complex>(amps)); }

DensityMatrix random_mixed(Dims dims, Rng& rng, int rank = 3) {
  const auto n = static_cast<Eigen::Index>(total_dim(dims));
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < rank; ++k) {
    const auto psi = haar_random_state(dims, rng);
    m += psi.amplitudes() * psi.amplitudes().adjoint();
  }
  return DensityMatrix(dims, m / static_cast<double>(rank));
}

SettingProbabilities setting(std::string name, std::vector<double> p) {
  std::vector<std::string> outcomes;
  for (std::size_t k = 0; k < p.size(); ++k) outcomes.push_back(std::to_string(k));
  return {std::move(name), outcomes, std::move(p), true};
}

double mean(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

double sd(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double percentile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  return x[static_cast<std::size_t>(p * static_cast<double>(x.size() - 1))];
}

TEST(Config, ExpectedEvents) {
  ExperimentConfig c;
  EXPECT_NEAR(c.expected_events(), 132.0, 1e-9);
  c.duration = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.duration = 1;
  c.fourfold_rate = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(SampleCounts, ZeroProbabilityAndDeterminism) {
  const std::vector<SettingProbabilities> p{setting("A", {0.0, 0.7, 0.3}), setting("B", {0.5, 0.5})};
  ExperimentConfig c;
  c.seed = 17;
  const auto t1 = sample_counts(p, c);
  const auto t2 = sample_counts(p, c);
  EXPECT_EQ(t1.counts, t2.counts);
  EXPECT_EQ(t1.counts[0][0], 0);
  EXPECT_NEAR(t1.expected[0][1], 0.7 * 132, 1e-9);
  EXPECT_EQ(t1.settings, (std::vector<std::string>{"A", "B"}));
  c.seed = 18;
  EXPECT_NE(sample_counts(p, c).counts, t1.counts);
}

TEST(SampleCounts, SettingRestriction) {
  const std::vector<SettingProbabilities> p{setting("A", {1.0}), setting("B", {1.0})};
  ExperimentConfig c;
  c.settings = {"B"};
  EXPECT_EQ(sample_counts(p, c).settings, (std::vector<std::string>{"B"}));
  c.settings = {"C"};
  EXPECT_THROW(sample_counts(p, c), std::invalid_argument);
}

TEST(SampleCounts, RejectsInvalidProbabilities) {
  ExperimentConfig c;
  EXPECT_THROW(sample_counts({setting("A", {0.5, 0.6})}, c), std::invalid_argument);
  EXPECT_THROW(sample_counts({setting("A", {1.2, -0.2})}, c), std::invalid_argument);
  EXPECT_THROW(sample_counts({setting("A", {0.5, 0.4})}, c), std::invalid_argument);
  auto partial = setting("A", {0.4});
  partial.complete = false;
  EXPECT_NO_THROW(sample_counts({partial}, c));
}

TEST(SampleCounts, ReplicateMeanWithinThreeSigma) {
  const std::vector<SettingProbabilities> p{setting("A", {0.3, 0.7})};
  ExperimentConfig c;
  const int n = 10000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    c.seed = static_cast<std::uint64_t>(k);
    sum += static_cast<double>(sample_counts(p, c).counts[0][0]);
  }
  const double mu = 0.3 * 132.0;
  EXPECT_LT(std::abs(sum / n - mu), 3.0 * std::sqrt(mu / n));
}

TEST(Plan, MinimalSettings) {
  // |0>|+>: ZI, IX, ZX all covered by the single setting ZX.
  const auto zero_plus = make_fidelity_plan(st({2, 2}, {1, 1, 0, 0}));
  EXPECT_EQ(zero_plus.settings, (std::vector<std::string>{"ZX"}));
  EXPECT_EQ(zero_plus.terms.size(), 3u);
  const auto bell = make_fidelity_plan(st({2, 2}, {1, 0, 0, 1}));
  EXPECT_EQ(bell.settings.size(), 3u);
  const auto single = make_fidelity_plan(st({4}, {1, 0, 1, 0}));
  EXPECT_EQ(single.num_qubits, 2);
  EXPECT_THROW(make_fidelity_plan(st({2, 2}, {1, 0, 0, 1}), {"ZZ"}), std::invalid_argument);
  EXPECT_THROW(make_fidelity_plan(st({3}, {1, 0, 0})), std::invalid_argument);
}

TEST(Plan, InfiniteStatisticsEqualsFidelity) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const Dims dims = t % 3 == 0 ? Dims{2} : t % 3 == 1 ? Dims{2, 2} : Dims{4};
    const auto target = haar_random_state(dims, rng);
    const auto rho = random_mixed(dims, rng);
    const auto plan = make_fidelity_plan(target);
    const auto est = fidelity_from_probabilities(plan_probabilities(plan, rho), plan);
    EXPECT_NEAR(est.value, fidelity(rho, target), kNumericTol);
    EXPECT_EQ(est.std_dev, 0.0);
  }
  const auto target = st({2, 2}, {1, 1, 1, -1});
  const auto plan = make_fidelity_plan(target);
  EXPECT_NEAR(fidelity_from_probabilities(plan_probabilities(plan, DensityMatrix::pure(target)), plan).value, 1.0,
              kNumericTol);
}

TEST(Estimator, PureTargetWithinThreeSigma) {
  const auto& phi1 = benchmarks::inputs_4to2().front();
  const auto run = photonics::run_optical_4to2(phi1.b);
  const auto plan = make_fidelity_plan(run.target);
  ExperimentConfig c;
  c.seed = 3;
  const auto est = fidelity_from_counts(sample_counts(plan_probabilities(plan, run.state), c), plan);
  EXPECT_LE(std::abs(est.value - 1.0), 3.0 * est.std_dev + kNumericTol);
  EXPECT_EQ(est.method, FidelityMethod::BasisDecomposition);
}

TEST(Estimator, ClampedField) {
  const auto e = FidelityEstimate::make(1.02, 0.01, FidelityMethod::BasisDecomposition);
  EXPECT_EQ(e.value, 1.02);
  EXPECT_EQ(e.clamped, 1.0);
  EXPECT_THROW(FidelityEstimate::make(0.5, -1.0, FidelityMethod::BasisDecomposition), std::invalid_argument);
}

TEST(Estimator, ErrorBarsScaleLikePoisson) {
  Rng rng(9);
  const auto target = st({2, 2}, {1, 0, 0, 1});
  const DensityMatrix rho(
      {2, 2}, 0.8 * DensityMatrix::pure(target).matrix() + 0.2 * DensityMatrix::maximally_mixed({2, 2}).matrix());
  const auto plan = make_fidelity_plan(target);
  const auto probs = plan_probabilities(plan, rho);
  std::vector<double> sds;
  for (double duration : {600.0, 6000.0}) {
    std::vector<double> values, propagated;
    for (int k = 0; k < 400; ++k) {
      ExperimentConfig c;
      c.duration = duration;
      c.seed = static_cast<std::uint64_t>(1000 + k);
      const auto e = fidelity_from_counts(sample_counts(probs, c), plan);
      values.push_back(e.value);
      propagated.push_back(e.std_dev);
    }
    EXPECT_LT(std::abs(mean(values) - fidelity(rho, target)), 0.01);
    EXPECT_NEAR(mean(propagated) / sd(values), 1.0, 0.2);
    sds.push_back(sd(values));
  }
  EXPECT_NEAR(sds[0] / sds[1] / std::sqrt(10.0), 1.0, 0.2);
}

TEST(Tomography, SettingsAreInformationallyComplete) {
  const auto settings = tomography_settings();
  const auto names = tomography_setting_names();
  ASSERT_EQ(settings.size(), 36u);
  EXPECT_EQ(names.front(), "H,0");
  EXPECT_EQ(std::count(names.begin(), names.end(), "R,+i"), 1);
  const std::vector<photonics::AnalyzerSetting> few(settings.begin(), settings.begin() + 10);
  EXPECT_THROW(tomography_ququart(std::vector<double>(10, 0.1), few), std::invalid_argument);
}

TEST(Tomography, ExactProbabilitiesRecoverState) {
  Rng rng(11);
  const auto settings = tomography_settings();
  for (int t = 0; t < 5; ++t) {
    const auto psi = haar_random_state({4}, rng);
    const auto rho = t % 2 ? DensityMatrix::pure(psi) : random_mixed({4}, rng, 2);
    std::vector<double> p;
    for (const auto& s : tomography_probabilities(settings, rho)) p.push_back(s.probabilities[0]);
    const auto est = tomography_ququart(p, settings);
    EXPECT_LT((est.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), kNumericTol);
  }
  std::vector<double> p;
  for (const auto& s : tomography_probabilities(settings, DensityMatrix::maximally_mixed({4}))) p.push_back(s.probabilities[0]);
  EXPECT_LT((tomography_ququart(p, settings).matrix() - Eigen::MatrixXcd::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff(),
            kNumericTol);
}

TEST(Tomography, FiniteCountsArePhysical) {
  const auto settings = tomography_settings();
  const auto& phi5 = benchmarks::inputs_4to2().back();
  const auto psi = make_state({4}, std::span<const Complex>(phi5.b));
  const auto probs = tomography_probabilities(settings, DensityMatrix::pure(psi));
  auto replicate = [&](double duration, int n) {
    std::vector<double> f;
    for (int k = 0; k < n; ++k) {
      ExperimentConfig c;
      c.duration = duration;
      c.seed = static_cast<std::uint64_t>(k);
      const auto rho = tomography_ququart(sample_counts(probs, c), settings);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
      EXPECT_GE(es.eigenvalues().minCoeff(), -kNumericTol);
      EXPECT_NEAR(rho.trace(), 1.0, kNumericTol);
      EXPECT_LT((rho.matrix() - rho.matrix().adjoint()).cwiseAbs().maxCoeff(), kNumericTol);
      f.push_back(fidelity(rho, psi));
    }
    return f;
  };
  // 132 expected events per setting leaves the linear-inversion 5th
  // percentile near 0.93; a tenfold longer run clears 0.95.
  const auto f132 = replicate(600.0, 500);
  EXPECT_GT(percentile(f132, 0.5), 0.95);
  EXPECT_GT(percentile(f132, 0.05), 0.90);
  const auto f1320 = replicate(6000.0, 200);
  EXPECT_GT(percentile(f1320, 0.05), 0.95);
}

TEST(Bound, PublishedAverages) {
  std::vector<FidelityEstimate> four, two;
  for (const auto& s : benchmarks::inputs_4to2())
    four.push_back(FidelityEstimate::make(s.measured.fidelity, s.measured.std_dev, FidelityMethod::BasisDecomposition));
  for (const auto& s : benchmarks::inputs_2to4())
    two.push_back(FidelityEstimate::make(s.measured.fidelity, s.measured.std_dev, FidelityMethod::BasisDecomposition));
  const auto r4 = classical_bound_check(four);
  const auto r2 = classical_bound_check(two);
  EXPECT_NEAR(r4.mean, benchmarks::kMeasuredAverage4to2.fidelity, 5e-5);
  EXPECT_NEAR(r4.mean_std_dev, benchmarks::kMeasuredAverage4to2.std_dev, 5e-5);
  EXPECT_NEAR(r2.mean, benchmarks::kMeasuredAverage2to4.fidelity, 5e-5);
  EXPECT_NEAR(r2.mean_std_dev, benchmarks::kMeasuredAverage2to4.std_dev, 5e-5);
  EXPECT_TRUE(r4.all_above);
  EXPECT_TRUE(r2.all_above);
}

TEST(Bound, MarginsAndErrors) {
  const auto r = classical_bound_check({FidelityEstimate::make(2.0 / 3.0, 0.01, FidelityMethod::Tomography),
                                        FidelityEstimate::make(0.7, 0.01, FidelityMethod::Tomography)});
  EXPECT_NEAR(r.margins[0], 0.0, kIdentityTol);
  EXPECT_NEAR(r.margins[1], (0.7 - 2.0 / 3.0) / 0.01, 1e-9);
  EXPECT_FALSE(r.all_above);
  EXPECT_THROW(classical_bound_check({}), std::invalid_argument);
}

}  // namespace
}  // namespace qitsim::stats
