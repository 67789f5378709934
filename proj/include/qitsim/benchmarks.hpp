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

#include <array>
#include <string>
#include <vector>

#include "qitsim/hilbert.hpp"

/// Input states of the photonic transfer experiments and the fidelities
/// measured for them (reference only; the hardware noise behind those
/// numbers is not modeled).
namespace qitsim::benchmarks {

struct Measured {
  double fidelity;
  double std_dev;
};

/// Ququart inputs phi1..phi5 for the 4-to-2 transfer, as (eta, kappa,
/// lambda, mu) over |H0>, |H1>, |V0>, |V1>.
struct Ququart4to2 {
  std::string name;
  std::array<Complex, 4> b;
  Measured measured;
};

/// Joint inputs psi1..psi9 for the 2-to-4 transfer: qubit (eps, zeta) on
/// system A, qubit (eta, kappa) on the paths of photon b.
struct Joint2to4 {
  std::string name;
  std::array<Complex, 2> a;
  std::array<Complex, 2> b;
  Measured measured;
};

const std::vector<Ququart4to2>& inputs_4to2();
const std::vector<Joint2to4>& inputs_2to4();

/// Reported averages over the lists above.
inline constexpr Measured kMeasuredAverage4to2{0.7897, 0.0109};
inline constexpr Measured kMeasuredAverage2to4{0.8151, 0.0074};

/// Reported HOM figures: ideal visibility, measured visibility.
inline constexpr double kHomVisibilityIdeal = 0.80;
inline constexpr double kHomVisibilityMeasured = 0.661;
inline constexpr double kHomOverlap = 0.826;

}  // namespace qitsim::benchmarks
