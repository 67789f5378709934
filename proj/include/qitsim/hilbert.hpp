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

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

/// Mixed-dimension register algebra: pure states, density matrices, gates,
/// projective measurements and fidelities over an ordered list of
/// subsystems of arbitrary (>= 2) dimension.
///
/// Basis indices are big-endian over the dimension list: the first listed
/// subsystem is the most significant digit. With this order the pairing
/// |x>|i> (qubit x, d-level i) is the contiguous block index x*d + i.
namespace qitsim {

using Complex = std::complex<double>;
using Dims = std::vector<int>;
using Rng = std::mt19937_64;

/// Tolerance for exact algebraic identities (unitarity, norms).
inline constexpr double kIdentityTol = 1e-12;
/// Tolerance for accumulated numerics (Born sums, traces, hermiticity).
inline constexpr double kNumericTol = 1e-10;

/// Product of the subsystem dimensions.
std::size_t total_dim(const Dims& dims);

/// Pure state over an ordered register of subsystems. Normalized states
/// have unit norm; unnormalized ones (post-selection intermediates) keep
/// whatever Born weight survived, 0 < norm <= 1.
class HybridState {
 public:
  HybridState(Dims dims, Eigen::VectorXcd amps, bool normalized);

  const Dims& dims() const { return dims_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }
  std::size_t size() const { return static_cast<std::size_t>(amps_.size()); }
  int num_subsystems() const { return static_cast<int>(dims_.size()); }
  bool normalized() const { return normalized_; }
  double norm() const { return amps_.norm(); }

  /// Rescales to unit norm (explicit; nothing renormalizes implicitly).
  HybridState renormalized() const;

 private:
  Dims dims_;
  Eigen::VectorXcd amps_;
  bool normalized_;
};

/// Mixed state. Unnormalized instances carry post-selected weight in the
/// trace (0 < tr <= 1).
class DensityMatrix {
 public:
  DensityMatrix(Dims dims, Eigen::MatrixXcd mat, bool normalized = true);

  static DensityMatrix pure(const HybridState& psi);
  static DensityMatrix maximally_mixed(Dims dims);

  const Dims& dims() const { return dims_; }
  const Eigen::MatrixXcd& matrix() const { return mat_; }
  bool normalized() const { return normalized_; }
  double trace() const { return mat_.trace().real(); }
  DensityMatrix renormalized() const;

 private:
  Dims dims_;
  Eigen::MatrixXcd mat_;
  bool normalized_;
};

/// Operator acting on an ordered tuple of subsystems. Post-selection maps
/// (contractions) are represented with unitary == false.
struct GateMatrix {
  Dims dims;
  Eigen::MatrixXcd mat;
  bool unitary = true;
  std::string name;

  /// Validates U^dagger U = I within kIdentityTol.
  static GateMatrix make_unitary(Dims dims, Eigen::MatrixXcd mat, std::string name = {});
  static GateMatrix make_operator(Dims dims, Eigen::MatrixXcd mat, std::string name = {});
};

struct MeasurementRecord {
  int outcome = 0;
  double probability = 0.0;
  HybridState post_state;
};

// --- construction ---------------------------------------------------------

HybridState make_state(Dims dims, std::span<const Complex> amps);
HybridState make_state(Dims dims, const Eigen::VectorXcd& amps);
HybridState make_unnormalized(Dims dims, const Eigen::VectorXcd& amps);
HybridState basis_state(Dims dims, std::span<const int> digits);
HybridState tensor(const HybridState& a, const HybridState& b);

/// Haar-distributed pure state (normalized complex Gaussian vector).
HybridState haar_random_state(Dims dims, Rng& rng);
/// Haar-distributed n x n unitary (QR of a Ginibre matrix, phases fixed).
Eigen::MatrixXcd haar_random_unitary(int n, Rng& rng);

// --- gate library ---------------------------------------------------------

GateMatrix gate_i(int d);
GateMatrix gate_x();
GateMatrix gate_z();
GateMatrix gate_h();
/// Swaps |0> <-> |2> and |1> <-> |3>.
GateMatrix gate_x4();
/// diag(1, 1, -1, -1).
GateMatrix gate_z4();
/// Swaps |0> <-> |2>, leaves |1>, |3> alone.
GateMatrix gate_x02();
/// Swaps |1> <-> |3>, leaves |0>, |2> alone.
GateMatrix gate_x13();
/// Dimension 2d block swap |k> <-> |k+d>, k < d. gate_x2d(2) == gate_x4().
GateMatrix gate_x2d(int d);
/// Dimension 2d sign flip on the upper block. gate_z2d(2) == gate_z4().
GateMatrix gate_z2d(int d);

/// diag(I, U) on [2, dims(U)...]; the control qubit is the first subsystem.
GateMatrix controlled(const GateMatrix& u);

// --- dynamics -------------------------------------------------------------

/// Applies `g` to the listed subsystems (g's first dimension pairs with
/// targets[0]). Unitary gates keep the normalization flag; operators mark
/// the result unnormalized.
HybridState apply(const HybridState& state, const GateMatrix& g, std::span<const int> targets);
HybridState apply(const HybridState& state, const GateMatrix& g, std::initializer_list<int> targets);

/// Reorders subsystems: result subsystem k is input subsystem order[k].
HybridState permute_subsystems(const HybridState& state, std::span<const int> order);

/// Contracts subsystem `subsystem` with <v|, removing it from the register.
/// The result is unnormalized and carries the branch weight. Throws if the
/// branch has zero weight.
HybridState contract(const HybridState& state, int subsystem, const Eigen::VectorXcd& v);

/// Restricts a subsystem to the basis indices in `keep` (in order), giving
/// it dimension keep.size(). Components outside `keep` are dropped.
HybridState restrict_subsystem(const HybridState& state, int subsystem, std::span<const int> keep);

/// Embeds subsystem of dimension d into dimension new_dim (indices < d).
HybridState embed_subsystem(const HybridState& state, int subsystem, int new_dim);

// --- measurement ----------------------------------------------------------

/// Born probabilities for a projective measurement in `basis`.
std::vector<double> basis_probabilities(const HybridState& state, int subsystem,
                                        std::span<const Eigen::VectorXcd> basis);
/// Born probabilities of the blocks of `partition`.
std::vector<double> subspace_probabilities(const HybridState& state, int subsystem,
                                           const std::vector<std::vector<int>>& partition);

/// Collapses onto basis vector `outcome`; the post state is renormalized.
MeasurementRecord collapse_basis(const HybridState& state, int subsystem,
                                 std::span<const Eigen::VectorXcd> basis, int outcome);
MeasurementRecord collapse_subspace(const HybridState& state, int subsystem,
                                    const std::vector<std::vector<int>>& partition, int outcome);

MeasurementRecord measure_basis(const HybridState& state, int subsystem,
                                std::span<const Eigen::VectorXcd> basis, Rng& rng);
MeasurementRecord measure_basis(const HybridState& state, int subsystem,
                                std::span<const Eigen::VectorXcd> basis, std::uint64_t seed);
MeasurementRecord measure_subspace(const HybridState& state, int subsystem,
                                   const std::vector<std::vector<int>>& partition, Rng& rng);
MeasurementRecord measure_subspace(const HybridState& state, int subsystem,
                                   const std::vector<std::vector<int>>& partition,
                                   std::uint64_t seed);

/// Samples an index from a discrete distribution. Deterministic in `rng`.
int sample_index(std::span<const double> probabilities, Rng& rng);

/// {|0>, |1>} and {|+>, |->} as column vectors.
std::vector<Eigen::VectorXcd> computational_basis(int d);
std::vector<Eigen::VectorXcd> plus_minus_basis();

// --- comparison -----------------------------------------------------------

Complex inner(const HybridState& a, const HybridState& b);
/// |<a|b>|^2 for normalized states, phase insensitive.
double state_fidelity(const HybridState& a, const HybridState& b);
bool equal_up_to_phase(const HybridState& a, const HybridState& b, double tol = kNumericTol);

/// Tr(rho |psi><psi|).
double fidelity(const DensityMatrix& rho, const HybridState& psi);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep);

/// Merges the (qubit, qudit) pair into one 2d-level subsystem via
/// |x>|i> -> |i + x*d>. The merged subsystem takes the slot the qudit
/// occupies once the qubit is removed. Only permutes amplitudes.
HybridState canonical_isomorphism(const HybridState& state, int qubit, int qudit);
/// Inverse direction: splits an even-dimension subsystem into (2, d) at
/// positions (index, index + 1).
HybridState inverse_isomorphism(const HybridState& state, int index);

/// Unchecked vector kernels behind the validated API. They accept any
/// vector (including zero) of length total_dim(dims).
namespace kernels {

Eigen::VectorXcd apply_operator(const Dims& dims, const Eigen::VectorXcd& amps, const Eigen::MatrixXcd& op,
                                std::span<const int> targets);
/// <bra| on `subsystem`; the subsystem is removed from the layout.
Eigen::VectorXcd contract(const Dims& dims, const Eigen::VectorXcd& amps, int subsystem,
                          const Eigen::VectorXcd& bra);

}  // namespace kernels

}  // namespace qitsim
