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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qitsim/hilbert.hpp"
#include "qitsim/photonics.hpp"

/// Counting statistics: Poisson count tables, fidelity estimation on
/// product Pauli bases, ququart tomography and the classical 2/3 bound.
namespace qitsim::stats {

/// Best single-copy measure-and-prepare fidelity for a qubit.
inline constexpr double kClassicalBound = 2.0 / 3.0;

/// Ideal outcome probabilities of one measurement setting. Complete
/// settings sum to 1; an incomplete setting records only some outcomes
/// (e.g. one analyzer projector) and sums to at most 1.
struct SettingProbabilities {
  std::string setting;
  std::vector<std::string> outcomes;
  std::vector<double> probabilities;
  bool complete = true;
};

struct ExperimentConfig {
  double fourfold_rate = 0.22;  // events / s
  double duration = 600.0;      // s
  std::uint64_t seed = 0;
  std::vector<std::string> settings;  // optional restriction; empty = all

  double expected_events() const { return fourfold_rate * duration; }
  void validate() const;
};

struct CountTable {
  std::vector<std::string> settings;
  std::vector<std::vector<std::string>> outcomes;
  std::vector<std::vector<std::int64_t>> counts;
  std::vector<std::vector<double>> expected;
};

/// Independent Poisson draws with mean rate * duration * p, in setting then
/// outcome order from one mt19937_64 seeded with config.seed.
CountTable sample_counts(const std::vector<SettingProbabilities>& probabilities, const ExperimentConfig& config);

enum class FidelityMethod { BasisDecomposition, Tomography };

struct FidelityEstimate {
  double value = 0.0;    // unclamped
  double clamped = 0.0;  // value clipped to [0, 1]
  double std_dev = 0.0;
  FidelityMethod method = FidelityMethod::BasisDecomposition;

  static FidelityEstimate make(double value, double std_dev, FidelityMethod method);
};

/// One Pauli term of the target projector, |psi><psi| = 2^-n sum_P c_P P.
struct PauliTerm {
  std::string pauli;          // e.g. "ZI", "XY"
  double coefficient = 0.0;   // <psi|P|psi>
  std::vector<int> settings;  // plan settings that measure it
};

/// Product-basis measurement plan for a target on n qubits. Settings are
/// strings over {Z, X, Y}; outcome bit k = 1 means eigenvalue -1 on qubit k.
/// A single ququart target is read as (pol, path) qubits.
struct FidelityPlan {
  HybridState target;
  int num_qubits = 0;
  std::vector<std::string> settings;
  std::vector<PauliTerm> terms;  // non-identity terms with c_P != 0
};

/// Smallest setting set (ties broken by enumeration order) covering every
/// Pauli term of the target. `allowed` restricts the candidate settings;
/// throws if they cannot cover the target.
FidelityPlan make_fidelity_plan(const HybridState& target, const std::vector<std::string>& allowed = {});

/// Born probabilities of each plan setting for `rho`.
std::vector<SettingProbabilities> plan_probabilities(const FidelityPlan& plan, const DensityMatrix& rho);

/// Ratio estimator per setting, averaged over the settings covering a term;
/// SD by first-order propagation of Poisson variances.
FidelityEstimate fidelity_from_counts(const CountTable& counts, const FidelityPlan& plan);
/// Infinite-statistics limit: exact expectation values, zero SD.
FidelityEstimate fidelity_from_probabilities(const std::vector<SettingProbabilities>& probabilities,
                                             const FidelityPlan& plan);

// --- tomography -----------------------------------------------------------

/// The 36 analyzer projectors pol {H, V, D, A, R, L} x path {0, 1, +, -, +i, -i}
/// with R = (H + iV)/sqrt2 and +i = (0 + i1)/sqrt2.
std::vector<photonics::AnalyzerSetting> tomography_settings();
std::vector<std::string> tomography_setting_names();
/// One incomplete single-outcome setting per analyzer, probabilities from
/// the element sequences.
std::vector<SettingProbabilities> tomography_probabilities(const std::vector<photonics::AnalyzerSetting>& settings,
                                                           const DensityMatrix& rho);

/// Least-squares linear inversion of the counts against the projectors,
/// then unit trace and projection onto the nearest (Frobenius) density
/// matrix: eigenvalues shifted by a common offset and clipped at zero.
/// Throws if the projectors span fewer than 16 dimensions.
DensityMatrix tomography_ququart(const CountTable& counts, const std::vector<photonics::AnalyzerSetting>& settings);
/// Same inversion on exact probabilities.
DensityMatrix tomography_ququart(const std::vector<double>& probabilities,
                                 const std::vector<photonics::AnalyzerSetting>& settings);

// --- classical bound ------------------------------------------------------

struct BoundReport {
  std::vector<double> margins;  // (value - 2/3) / std_dev
  double mean = 0.0;
  double mean_std_dev = 0.0;    // sqrt(sum sd^2) / n
  bool all_above = false;
};

BoundReport classical_bound_check(const std::vector<FidelityEstimate>& estimates);

}  // namespace qitsim::stats
