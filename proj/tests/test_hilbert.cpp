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

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "qitsim/hilbert.hpp"

namespace qitsim {
namespace {

const double kS = 1.0 / std::sqrt(2.0);

HybridState st(Dims dims, std::vector<Complex> amps) { return make_state(std::move(dims), std::span<const Complex>(amps)); }

HybridState basis(Dims dims, std::vector<int> digits) { return basis_state(std::move(dims), digits); }

void expect_amps(const HybridState& s, const std::vector<Complex>& want, double tol = kIdentityTol) {
  ASSERT_EQ(s.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_LT(std::abs(s[i] - want[i]), tol) << "index " << i;
}

// Oracle: plain nested loops over a hand-written matrix.
Eigen::MatrixXcd swap_blocks(int d) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  for (int k = 0; k < d; ++k) m(k + d, k) = m(k, k + d) = 1.0;
  return m;
}

TEST(MakeState, NormalizesInput) {
  expect_amps(st({4}, {1, 1, 1, 1}), {0.5, 0.5, 0.5, 0.5});
  expect_amps(st({4}, {1, 0, 0, 0}), {1, 0, 0, 0});
  EXPECT_TRUE(st({2, 4}, {0.5, 0.5, 0, 0, 0.5, 0.5, 0, 0}).normalized());
}

TEST(MakeState, RejectsBadInput) {
  EXPECT_THROW(st({4}, {1, 0, 0}), std::invalid_argument);
  EXPECT_THROW(st({4}, {0, 0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(st({1}, {1}), std::invalid_argument);
}

TEST(Tensor, ProductExpansion) {
  expect_amps(tensor(st({2}, {1, 1}), basis({4}, {0})), {kS, 0, 0, 0, kS, 0, 0, 0});
  expect_amps(tensor(basis({2}, {0}), basis({2}, {0})), {1, 0, 0, 0});
  const Complex eps(0.6), zeta(0, 0.8);
  const std::vector<Complex> b{0.5, Complex(0, 0.5), -0.5, 0.5};
  const auto ab = tensor(st({2}, {eps, zeta}), st({4}, b));
  EXPECT_EQ(ab.dims(), (Dims{2, 4}));
  for (int x = 0; x < 2; ++x)
    for (int i = 0; i < 4; ++i)
      EXPECT_LT(std::abs(ab[static_cast<std::size_t>(4 * x + i)] - (x ? zeta : eps) * b[static_cast<std::size_t>(i)]),
                kIdentityTol);
}

TEST(Gates, BasisActions) {
  expect_amps(apply(basis({4}, {1}), gate_x4(), {0}), {0, 0, 0, 1});
  expect_amps(apply(basis({4}, {2}), gate_z4(), {0}), {0, 0, -1, 0});
  expect_amps(apply(basis({4}, {0}), gate_x13(), {0}), {1, 0, 0, 0});
  const auto x8 = apply(basis({8}, {1}), gate_x2d(4), {0});
  EXPECT_LT(std::abs(x8[5] - 1.0), kIdentityTol);
  const auto back = apply(basis({8}, {5}), gate_x2d(4), {0});
  EXPECT_LT(std::abs(back[1] - 1.0), kIdentityTol);
}

TEST(Gates, Algebra) {
  EXPECT_EQ((gate_x13().mat * gate_x02().mat - gate_x4().mat).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((gate_x4().mat * gate_x4().mat - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((gate_z4().mat * gate_z4().mat - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.0);
  for (int d : {1, 2, 3, 4, 8}) {
    const auto x = gate_x2d(d).mat;
    const auto z = gate_z2d(d).mat;
    EXPECT_EQ((x - swap_blocks(d)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((x * x - Eigen::MatrixXcd::Identity(2 * d, 2 * d)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((z * z - Eigen::MatrixXcd::Identity(2 * d, 2 * d)).cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ((gate_x2d(2).mat - gate_x4().mat).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((gate_z2d(2).mat - gate_z4().mat).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Gates, RejectNonUnitary) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
  m(0, 1) = 0.5;
  EXPECT_THROW(GateMatrix::make_unitary({2}, m), std::invalid_argument);
  EXPECT_THROW(controlled(GateMatrix::make_operator({2}, m)), std::invalid_argument);
}

TEST(Controlled, TruthTables) {
  expect_amps(apply(basis({2, 4}, {1, 0}), controlled(gate_x4()), {0, 1}), {0, 0, 0, 0, 0, 0, 1, 0});
  const auto off = basis({2, 4}, {0, 3});
  expect_amps(apply(off, controlled(gate_x4()), {0, 1}), {0, 0, 0, 1, 0, 0, 0, 0});
  expect_amps(apply(basis({2, 2}, {1, 0}), controlled(gate_x()), {0, 1}), {0, 0, 0, 1});
}

TEST(Apply, CX4OnPlusState) {
  // 0.5 |0>(a,b,c,d) + 0.5 |1>(c,d,a,b) for the ququart (a,b,c,d).
  const std::vector<Complex> q{0.1, Complex(0.3, 0.2), -0.5, 0.7};
  const auto in = tensor(st({2}, {1, 1}), st({4}, q));
  const auto out = apply(in, controlled(gate_x4()), {0, 1});
  const auto qn = st({4}, q);
  const std::vector<Complex> want{kS * qn[0], kS * qn[1], kS * qn[2], kS * qn[3],
                                  kS * qn[2], kS * qn[3], kS * qn[0], kS * qn[1]};
  expect_amps(out, want);
}

TEST(Apply, TargetsAndErrors) {
  expect_amps(apply(basis({2, 4}, {0, 0}), gate_x4(), {1}), {0, 0, 1, 0, 0, 0, 0, 0});
  const auto s = st({2, 2}, {1, 2, 3, 4});
  expect_amps(apply(s, gate_i(2), {1}), {s[0], s[1], s[2], s[3]});
  EXPECT_THROW(apply(s, gate_x4(), {0}), std::invalid_argument);
  EXPECT_THROW(apply(s, gate_x(), {2}), std::out_of_range);
  EXPECT_THROW(apply(s, controlled(gate_x()), {1, 1}), std::invalid_argument);
}

TEST(Apply, NormPreservedOnRandomGates) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 7;
    const auto psi = haar_random_state({2, d}, rng);
    const auto u = GateMatrix::make_unitary({d}, haar_random_unitary(d, rng));
    EXPECT_NEAR(apply(psi, u, {1}).norm(), 1.0, kIdentityTol);
  }
}

TEST(Apply, TwoTargetOrderMatchesKron) {
  Rng rng(3);
  const auto psi = haar_random_state({2, 3, 2}, rng);
  const auto u = GateMatrix::make_unitary({2, 2}, haar_random_unitary(4, rng));
  // Oracle: permute to (q0, q2, q1), apply u (x) I3, permute back.
  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(12, 12);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      for (int k = 0; k < 3; ++k) big(r * 3 + k, c * 3 + k) = u.mat(r, c);
  Eigen::VectorXcd v(12);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 2; ++c) v(a * 6 + c * 3 + b) = psi[static_cast<std::size_t>(a * 6 + b * 2 + c)];
  const Eigen::VectorXcd w = big * v;
  const auto out = apply(psi, u, {0, 2});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 2; ++c)
        EXPECT_LT(std::abs(out[static_cast<std::size_t>(a * 6 + b * 2 + c)] - w(a * 6 + c * 3 + b)), kIdentityTol);
}

TEST(Measure, BornRule) {
  const auto plus = st({2}, {1, 1});
  const auto r = measure_basis(plus, 0, plus_minus_basis(), 11u);
  EXPECT_EQ(r.outcome, 0);
  EXPECT_NEAR(r.probability, 1.0, kIdentityTol);
  const auto s = st({2}, {0.6, 0.8});
  const auto p = basis_probabilities(s, 0, computational_basis(2));
  EXPECT_NEAR(p[0], 0.36, kIdentityTol);
  EXPECT_NEAR(p[0] + p[1], 1.0, kNumericTol);
}

TEST(Measure, ThreePhotonDiagonalOutcome) {
  // a1, a2 in eps|HH> + zeta|VV>, b a ququart: measuring a2 in D/A gives 1/2 each.
  Rng rng(5);
  const auto b = haar_random_state({4}, rng);
  const Complex eps(0.6), zeta(0, 0.8);
  const auto a = st({2, 2}, {eps, 0, 0, zeta});
  const auto s = tensor(a, b);
  const auto p = basis_probabilities(s, 1, plus_minus_basis());
  EXPECT_NEAR(p[0], 0.5, kNumericTol);
  EXPECT_NEAR(p[1], 0.5, kNumericTol);
}

TEST(Measure, Subspace) {
  Rng rng(9);
  const auto q = haar_random_state({4}, rng);
  const auto loaded = apply(tensor(st({2}, {1, 1}), q), controlled(gate_x4()), {0, 1});
  const std::vector<std::vector<int>> halves{{0, 1}, {2, 3}};
  const auto p = subspace_probabilities(loaded, 1, halves);
  EXPECT_NEAR(p[0], 0.5, kNumericTol);
  EXPECT_NEAR(p[1], 0.5, kNumericTol);

  const auto low = st({4}, {0.6, 0.8, 0, 0});
  const auto r = measure_subspace(low, 0, halves, 1u);
  EXPECT_EQ(r.outcome, 0);
  EXPECT_NEAR(r.probability, 1.0, kIdentityTol);
  EXPECT_TRUE(equal_up_to_phase(r.post_state, low));
  EXPECT_EQ(measure_subspace(basis({4}, {2}), 0, halves, 2u).outcome, 1);
  EXPECT_THROW(subspace_probabilities(low, 0, {{0, 1}, {1, 2, 3}}), std::invalid_argument);
  EXPECT_THROW(subspace_probabilities(low, 0, {{0, 1}, {2}}), std::invalid_argument);
}

TEST(Measure, RejectsNonOrthonormalBasis) {
  std::vector<Eigen::VectorXcd> bad{Eigen::Vector2cd(1, 0), Eigen::Vector2cd(kS, kS)};
  EXPECT_THROW(basis_probabilities(st({2}, {1, 0}), 0, bad), std::invalid_argument);
}

TEST(Measure, SeededDeterminism) {
  Rng a(42), b(42);
  const auto s = st({4}, {1, 1, 1, 1});
  for (int k = 0; k < 20; ++k)
    EXPECT_EQ(measure_basis(s, 0, computational_basis(4), a).outcome,
              measure_basis(s, 0, computational_basis(4), b).outcome);
}

TEST(Fidelity, Examples) {
  Rng rng(1);
  const auto psi = haar_random_state({4}, rng);
  EXPECT_NEAR(fidelity(DensityMatrix::pure(psi), psi), 1.0, kIdentityTol);
  EXPECT_NEAR(fidelity(DensityMatrix::maximally_mixed({4}), psi), 0.25, kIdentityTol);
  Eigen::MatrixXcd half = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
  EXPECT_NEAR(fidelity(DensityMatrix({2}, half), st({2}, {1, 1})), 0.5, kIdentityTol);
  const auto phi = haar_random_state({4}, rng);
  Complex ip = 0.0;
  for (std::size_t i = 0; i < 4; ++i) ip += std::conj(psi[i]) * phi[i];
  EXPECT_NEAR(fidelity(DensityMatrix::pure(phi), psi), std::norm(ip), kIdentityTol);
  EXPECT_THROW(fidelity(DensityMatrix::maximally_mixed({2}), psi), std::invalid_argument);
}

TEST(PartialTrace, Examples) {
  Rng rng(2);
  const auto a = haar_random_state({2}, rng);
  const auto b = haar_random_state({4}, rng);
  const auto rb = partial_trace(DensityMatrix::pure(tensor(a, b)), {1});
  EXPECT_LT((rb.matrix() - DensityMatrix::pure(b).matrix()).cwiseAbs().maxCoeff(), kIdentityTol);
  const auto ra = partial_trace(DensityMatrix::pure(tensor(a, b)), {0});
  EXPECT_LT((ra.matrix() - DensityMatrix::pure(a).matrix()).cwiseAbs().maxCoeff(), kIdentityTol);

  const auto bell = st({2, 2}, {1, 0, 0, 1});
  EXPECT_LT((partial_trace(DensityMatrix::pure(bell), {1}).matrix() - Eigen::MatrixXcd::Identity(2, 2) * 0.5)
                .cwiseAbs()
                .maxCoeff(),
            kIdentityTol);

  // |0>_A(a|0>+b|1>) + |1>_A(c|0>+d|1>) with (1,0,0,1)/sqrt2: B is I/2 on its lower block.
  const auto joint = st({2, 4}, {1, 0, 0, 0, 0, 1, 0, 0});
  const auto rb4 = partial_trace(DensityMatrix::pure(joint), {1});
  EXPECT_NEAR(rb4.matrix()(0, 0).real(), 0.5, kIdentityTol);
  EXPECT_NEAR(rb4.matrix()(1, 1).real(), 0.5, kIdentityTol);
  EXPECT_NEAR(std::abs(rb4.matrix()(0, 1)), 0.0, kIdentityTol);
  EXPECT_NEAR(rb4.trace(), 1.0, kNumericTol);
  EXPECT_THROW(partial_trace(DensityMatrix::pure(joint), {2}), std::out_of_range);
}

TEST(Isomorphism, MapsAndRoundTrips) {
  expect_amps(canonical_isomorphism(basis({2, 4}, {1, 0}), 0, 1), {0, 0, 0, 0, 1, 0, 0, 0});
  expect_amps(canonical_isomorphism(basis({2, 4}, {0, 3}), 0, 1), {0, 0, 0, 1, 0, 0, 0, 0});
  // The two-qubit-over-ququart form maps onto the plain ququart form.
  const std::vector<Complex> c{0.1, Complex(0, 0.2), 0.3, 0.4};
  const auto eq2 = st({2, 4}, {c[0], c[1], 0, 0, c[2], c[3], 0, 0});
  const auto merged = canonical_isomorphism(restrict_subsystem(eq2, 1, std::vector<int>{0, 1}), 0, 1);
  EXPECT_TRUE(equal_up_to_phase(merged, st({4}, c)));

  Rng rng(4);
  const auto psi = haar_random_state({3, 2, 4}, rng);
  const auto there = canonical_isomorphism(psi, 1, 2);
  EXPECT_EQ(there.dims(), (Dims{3, 8}));
  const auto back = inverse_isomorphism(there, 1);
  EXPECT_EQ(back.dims(), psi.dims());
  EXPECT_EQ((back.amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(canonical_isomorphism(psi, 0, 2), std::invalid_argument);
}

TEST(Comparison, GlobalPhase) {
  const auto a = st({2}, {0.6, 0.8});
  const auto b = st({2}, {Complex(0, 0.6), Complex(0, 0.8)});
  EXPECT_TRUE(equal_up_to_phase(a, b));
  EXPECT_FALSE(equal_up_to_phase(a, st({2}, {0.8, 0.6})));
}

}  // namespace
}  // namespace qitsim
