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

#include "qitsim/benchmarks.hpp"

#include <numbers>

namespace qitsim::benchmarks {

namespace {
constexpr double h = std::numbers::sqrt2 / 2;
constexpr Complex i{0.0, 1.0};
}  // namespace

const std::vector<Ququart4to2>& inputs_4to2() {
  static const std::vector<Ququart4to2> v{
      {"phi1", {h, h, 0, 0}, {0.8860, 0.0298}},
      {"phi2", {h, 0, h, 0}, {0.7686, 0.0271}},
      {"phi3", {0.5, 0.5, 0.5, 0.5}, {0.7342, 0.0255}},
      {"phi4", {0, h, h, 0}, {0.7375, 0.0203}},
      {"phi5", {0.5, -0.5, -0.5, -0.5}, {0.8220, 0.0164}},
  };
  return v;
}

const std::vector<Joint2to4>& inputs_2to4() {
  static const std::vector<Joint2to4> v{
      {"psi1", {h, i * h}, {1, 0}, {0.8018, 0.0271}},
      {"psi2", {h, i * h}, {h, -h}, {0.7220, 0.0289}},
      {"psi3", {h, i * h}, {h, i * h}, {0.6997, 0.0241}},
      {"psi4", {h, h}, {1, 0}, {0.8772, 0.0217}},
      {"psi5", {h, h}, {h, h}, {0.7897, 0.0257}},
      {"psi6", {h, h}, {h, -i * h}, {0.8080, 0.0249}},
      {"psi7", {0, 1}, {1, 0}, {0.8770, 0.0130}},
      {"psi8", {0, 1}, {h, h}, {0.8431, 0.0134}},
      {"psi9", {0, 1}, {h, -i * h}, {0.9171, 0.0138}},
  };
  return v;
}

}  // namespace qitsim::benchmarks
