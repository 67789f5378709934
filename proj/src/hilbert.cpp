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

#include "qitsim/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qitsim {

namespace {

void check_dims(const Dims& dims) {
  if (dims.empty()) throw std::invalid_argument("register must have at least one subsystem");
  for (int d : dims) {
    if (d < 2) throw std::invalid_argument("subsystem dimension must be >= 2, got " + std::to_string(d));
  }
}

std::vector<std::size_t> strides_of(const Dims& dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * static_cast<std::size_t>(dims[k]);
  return strides;
}

void check_subsystem(const HybridState& state, int subsystem) {
  if (subsystem < 0 || subsystem >= state.num_subsystems())
    throw std::out_of_range("subsystem index " + std::to_string(subsystem) + " out of range");
}

// Flat offsets of every configuration of `subsystems` (big-endian over the
// listed order) inside a register with the given strides.
std::vector<std::size_t> offsets_of(const Dims& dims, const std::vector<std::size_t>& strides,
                                    std::span<const int> subsystems) {
  std::vector<std::size_t> offsets{0};
  for (int s : subsystems) {
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * static_cast<std::size_t>(dims[s]));
    for (std::size_t base : offsets) {
      for (int digit = 0; digit < dims[s]; ++digit) next.push_back(base + static_cast<std::size_t>(digit) * strides[s]);
    }
    offsets = std::move(next);
  }
  return offsets;
}

std::vector<int> complement(int n, std::span<const int> chosen) {
  std::vector<int> rest;
  for (int k = 0; k < n; ++k) {
    if (std::find(chosen.begin(), chosen.end(), k) == chosen.end()) rest.push_back(k);
  }
  return rest;
}

Dims without(const Dims& dims, int subsystem) {
  Dims out = dims;
  out.erase(out.begin() + subsystem);
  return out;
}

void check_hermitian_psd(const Eigen::MatrixXcd& mat) {
  if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > kNumericTol)
    throw std::invalid_argument("density matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) throw std::invalid_argument("density matrix is not positive semidefinite");
}

}  // namespace

std::size_t total_dim(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t acc, int d) { return acc * static_cast<std::size_t>(d); });
}

// --- HybridState ----------------------------------------------------------

HybridState::HybridState(Dims dims, Eigen::VectorXcd amps, bool normalized)
    : dims_(std::move(dims)), amps_(std::move(amps)), normalized_(normalized) {
  check_dims(dims_);
  if (static_cast<std::size_t>(amps_.size()) != total_dim(dims_))
    throw std::invalid_argument("amplitude count " + std::to_string(amps_.size()) +
                                " does not match register size " + std::to_string(total_dim(dims_)));
  const double n = amps_.norm();
  if (normalized_) {
    if (std::abs(n - 1.0) > kIdentityTol) throw std::invalid_argument("state is not normalized");
  } else if (!(n > 0.0) || n > 1.0 + kNumericTol) {
    throw std::invalid_argument("unnormalized state must have 0 < norm <= 1");
  }
}

HybridState HybridState::renormalized() const { return HybridState(dims_, amps_ / amps_.norm(), true); }

// --- DensityMatrix --------------------------------------------------------

DensityMatrix::DensityMatrix(Dims dims, Eigen::MatrixXcd mat, bool normalized)
    : dims_(std::move(dims)), mat_(std::move(mat)), normalized_(normalized) {
  check_dims(dims_);
  const auto n = static_cast<Eigen::Index>(total_dim(dims_));
  if (mat_.rows() != n || mat_.cols() != n) throw std::invalid_argument("density matrix side does not match dims");
  check_hermitian_psd(mat_);
  const double tr = mat_.trace().real();
  if (normalized_) {
    if (std::abs(tr - 1.0) > kNumericTol) throw std::invalid_argument("density matrix trace is not 1");
  } else if (!(tr > 0.0) || tr > 1.0 + kNumericTol) {
    throw std::invalid_argument("unnormalized density matrix must have 0 < trace <= 1");
  }
}

DensityMatrix DensityMatrix::pure(const HybridState& psi) {
  const auto& v = psi.amplitudes();
  return DensityMatrix(psi.dims(), v * v.adjoint(), psi.normalized());
}

DensityMatrix DensityMatrix::maximally_mixed(Dims dims) {
  const auto n = static_cast<Eigen::Index>(total_dim(dims));
  return DensityMatrix(std::move(dims), Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(n));
}

DensityMatrix DensityMatrix::renormalized() const { return DensityMatrix(dims_, mat_ / trace(), true); }

// --- GateMatrix -----------------------------------------------------------

GateMatrix GateMatrix::make_unitary(Dims dims, Eigen::MatrixXcd mat, std::string name) {
  check_dims(dims);
  const auto n = static_cast<Eigen::Index>(total_dim(dims));
  if (mat.rows() != n || mat.cols() != n) throw std::invalid_argument("gate side does not match dims");
  const Eigen::MatrixXcd err = mat.adjoint() * mat - Eigen::MatrixXcd::Identity(n, n);
  if (err.cwiseAbs().maxCoeff() > kIdentityTol) throw std::invalid_argument("gate is not unitary");
  return GateMatrix{std::move(dims), std::move(mat), true, std::move(name)};
}

GateMatrix GateMatrix::make_operator(Dims dims, Eigen::MatrixXcd mat, std::string name) {
  check_dims(dims);
  const auto n = static_cast<Eigen::Index>(total_dim(dims));
  if (mat.rows() != n || mat.cols() != n) throw std::invalid_argument("operator side does not match dims");
  return GateMatrix{std::move(dims), std::move(mat), false, std::move(name)};
}

// --- construction ---------------------------------------------------------

HybridState make_state(Dims dims, std::span<const Complex> amps) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v[static_cast<Eigen::Index>(i)] = amps[i];
  return make_state(std::move(dims), v);
}

HybridState make_state(Dims dims, const Eigen::VectorXcd& amps) {
  check_dims(dims);
  if (static_cast<std::size_t>(amps.size()) != total_dim(dims))
    throw std::invalid_argument("amplitude count does not match register size");
  const double n = amps.norm();
  if (!(n > 0.0)) throw std::invalid_argument("cannot normalize the zero vector");
  return HybridState(std::move(dims), amps / n, true);
}

HybridState make_unnormalized(Dims dims, const Eigen::VectorXcd& amps) {
  return HybridState(std::move(dims), amps, false);
}

HybridState basis_state(Dims dims, std::span<const int> digits) {
  check_dims(dims);
  if (digits.size() != dims.size()) throw std::invalid_argument("one digit per subsystem required");
  const auto strides = strides_of(dims);
  std::size_t index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= dims[k]) throw std::out_of_range("basis digit out of range");
    index += static_cast<std::size_t>(digits[k]) * strides[k];
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total_dim(dims)));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return HybridState(std::move(dims), std::move(v), true);
}

HybridState tensor(const HybridState& a, const HybridState& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  const auto na = a.amplitudes().size();
  const auto nb = b.amplitudes().size();
  Eigen::VectorXcd v(na * nb);
  for (Eigen::Index i = 0; i < na; ++i) v.segment(i * nb, nb) = a.amplitudes()[i] * b.amplitudes();
  if (a.normalized() && b.normalized()) return HybridState(std::move(dims), std::move(v), true);
  return HybridState(std::move(dims), std::move(v), false);
}

HybridState haar_random_state(Dims dims, Rng& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(total_dim(dims)));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v[i] = Complex(re, im);
  }
  return make_state(std::move(dims), v);
}

Eigen::MatrixXcd haar_random_unitary(int n, Rng& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd z(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      z(r, c) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) q.col(k) *= r(k, k) / std::abs(r(k, k));
  return q;
}

// --- gate library ---------------------------------------------------------

GateMatrix gate_i(int d) {
  if (d < 2) throw std::invalid_argument("identity dimension must be >= 2");
  return GateMatrix{{d}, Eigen::MatrixXcd::Identity(d, d), true, "I" + (d == 2 ? std::string() : std::to_string(d))};
}

GateMatrix gate_x() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return GateMatrix{{2}, m, true, "X"};
}

GateMatrix gate_z() {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return GateMatrix{{2}, m, true, "Z"};
}

GateMatrix gate_h() {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 1, 1, -1;
  return GateMatrix{{2}, m / std::sqrt(2.0), true, "H"};
}

GateMatrix gate_x2d(int d) {
  if (d < 1) throw std::invalid_argument("block size d must be >= 1");
  const int n = 2 * d;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < d; ++k) {
    m(k, k + d) = 1.0;
    m(k + d, k) = 1.0;
  }
  return GateMatrix{{n}, m, true, "X" + std::to_string(n)};
}

GateMatrix gate_z2d(int d) {
  if (d < 1) throw std::invalid_argument("block size d must be >= 1");
  const int n = 2 * d;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
  for (int k = 0; k < d; ++k) m(k + d, k + d) = -1.0;
  return GateMatrix{{n}, m, true, "Z" + std::to_string(n)};
}

GateMatrix gate_x4() { return gate_x2d(2); }
GateMatrix gate_z4() { return gate_z2d(2); }

GateMatrix gate_x02() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 2) = m(2, 0) = m(1, 1) = m(3, 3) = 1.0;
  return GateMatrix{{4}, m, true, "X02"};
}

GateMatrix gate_x13() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(1, 3) = m(3, 1) = m(0, 0) = m(2, 2) = 1.0;
  return GateMatrix{{4}, m, true, "X13"};
}

GateMatrix controlled(const GateMatrix& u) {
  if (!u.unitary) throw std::invalid_argument("controlled() requires a unitary target gate");
  const auto n = u.mat.rows();
  if (u.mat.cols() != n) throw std::invalid_argument("controlled() requires a square gate");
  const Eigen::MatrixXcd err = u.mat.adjoint() * u.mat - Eigen::MatrixXcd::Identity(n, n);
  if (err.cwiseAbs().maxCoeff() > kIdentityTol) throw std::invalid_argument("controlled() target is not unitary");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n).setIdentity();
  m.bottomRightCorner(n, n) = u.mat;
  Dims dims{2};
  dims.insert(dims.end(), u.dims.begin(), u.dims.end());
  return GateMatrix{std::move(dims), std::move(m), true, "C" + u.name};
}

// --- dynamics -------------------------------------------------------------

HybridState apply(const HybridState& state, const GateMatrix& g, std::span<const int> targets) {
  const Dims& dims = state.dims();
  if (targets.size() != g.dims.size())
    throw std::invalid_argument("gate '" + g.name + "' expects " + std::to_string(g.dims.size()) + " targets");
  for (std::size_t k = 0; k < targets.size(); ++k) {
    check_subsystem(state, targets[k]);
    if (dims[targets[k]] != g.dims[k])
      throw std::invalid_argument("gate '" + g.name + "' dimension mismatch on subsystem " + std::to_string(targets[k]));
    for (std::size_t j = 0; j < k; ++j) {
      if (targets[j] == targets[k]) throw std::invalid_argument("duplicate target subsystem");
    }
  }
  Eigen::VectorXcd out = kernels::apply_operator(dims, state.amplitudes(), g.mat, targets);
  if (g.unitary) return HybridState(dims, std::move(out), state.normalized());
  if (!(out.norm() > 0.0)) throw std::domain_error("operator '" + g.name + "' annihilated the state");
  return HybridState(dims, std::move(out), false);
}

HybridState apply(const HybridState& state, const GateMatrix& g, std::initializer_list<int> targets) {
  return apply(state, g, std::span<const int>(targets.begin(), targets.size()));
}

HybridState permute_subsystems(const HybridState& state, std::span<const int> order) {
  const int n = state.num_subsystems();
  if (static_cast<int>(order.size()) != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<int> seen(order.begin(), order.end());
  std::sort(seen.begin(), seen.end());
  for (int k = 0; k < n; ++k) {
    if (seen[static_cast<std::size_t>(k)] != k) throw std::invalid_argument("not a permutation");
  }
  const Dims& dims = state.dims();
  Dims new_dims(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) new_dims[static_cast<std::size_t>(k)] = dims[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
  // Offsets of the new big-endian configurations, read from the old layout.
  const auto old_strides = strides_of(dims);
  const auto source = offsets_of(dims, old_strides, order);
  const auto& in = state.amplitudes();
  Eigen::VectorXcd out(in.size());
  for (std::size_t i = 0; i < source.size(); ++i) out[static_cast<Eigen::Index>(i)] = in[static_cast<Eigen::Index>(source[i])];
  return HybridState(std::move(new_dims), std::move(out), state.normalized());
}

HybridState contract(const HybridState& state, int subsystem, const Eigen::VectorXcd& v) {
  check_subsystem(state, subsystem);
  const Dims& dims = state.dims();
  if (v.size() != dims[static_cast<std::size_t>(subsystem)]) throw std::invalid_argument("contraction vector has wrong dimension");
  if (state.num_subsystems() < 2) throw std::invalid_argument("cannot contract the only subsystem");
  Eigen::VectorXcd out = kernels::contract(dims, state.amplitudes(), subsystem, v);
  if (!(out.norm() > 0.0)) throw std::domain_error("contraction branch has zero weight");
  return HybridState(without(dims, subsystem), std::move(out), false);
}

HybridState restrict_subsystem(const HybridState& state, int subsystem, std::span<const int> keep) {
  check_subsystem(state, subsystem);
  const Dims& dims = state.dims();
  const int d = dims[static_cast<std::size_t>(subsystem)];
  if (keep.size() < 2) throw std::invalid_argument("restricted subsystem must keep >= 2 levels");
  for (int k : keep) {
    if (k < 0 || k >= d) throw std::out_of_range("restriction index out of range");
  }
  Dims new_dims = dims;
  new_dims[static_cast<std::size_t>(subsystem)] = static_cast<int>(keep.size());
  const auto old_strides = strides_of(dims);
  const auto new_strides = strides_of(new_dims);
  const auto rest = complement(state.num_subsystems(), std::span<const int>(&subsystem, 1));
  const auto old_bases = offsets_of(dims, old_strides, rest);
  const auto new_bases = offsets_of(new_dims, new_strides, rest);
  const auto& in = state.amplitudes();
  Eigen::VectorXcd out(static_cast<Eigen::Index>(total_dim(new_dims)));
  for (std::size_t r = 0; r < old_bases.size(); ++r) {
    for (std::size_t j = 0; j < keep.size(); ++j) {
      out[static_cast<Eigen::Index>(new_bases[r] + j * new_strides[static_cast<std::size_t>(subsystem)])] =
          in[static_cast<Eigen::Index>(old_bases[r] + static_cast<std::size_t>(keep[j]) * old_strides[static_cast<std::size_t>(subsystem)])];
    }
  }
  const double n = out.norm();
  if (!(n > 0.0)) throw std::domain_error("restriction removed all weight");
  const bool lossless = state.normalized() && std::abs(n - 1.0) <= kIdentityTol;
  if (lossless) out /= n;
  return HybridState(std::move(new_dims), std::move(out), lossless);
}

HybridState embed_subsystem(const HybridState& state, int subsystem, int new_dim) {
  check_subsystem(state, subsystem);
  const Dims& dims = state.dims();
  const int d = dims[static_cast<std::size_t>(subsystem)];
  if (new_dim < d) throw std::invalid_argument("embedding dimension must not shrink the subsystem");
  Dims new_dims = dims;
  new_dims[static_cast<std::size_t>(subsystem)] = new_dim;
  const auto old_strides = strides_of(dims);
  const auto new_strides = strides_of(new_dims);
  const auto rest = complement(state.num_subsystems(), std::span<const int>(&subsystem, 1));
  const auto old_bases = offsets_of(dims, old_strides, rest);
  const auto new_bases = offsets_of(new_dims, new_strides, rest);
  const auto& in = state.amplitudes();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total_dim(new_dims)));
  for (std::size_t r = 0; r < old_bases.size(); ++r) {
    for (int i = 0; i < d; ++i) {
      out[static_cast<Eigen::Index>(new_bases[r] + static_cast<std::size_t>(i) * new_strides[static_cast<std::size_t>(subsystem)])] =
          in[static_cast<Eigen::Index>(old_bases[r] + static_cast<std::size_t>(i) * old_strides[static_cast<std::size_t>(subsystem)])];
    }
  }
  return HybridState(std::move(new_dims), std::move(out), state.normalized());
}

// --- measurement ----------------------------------------------------------

namespace {

void check_orthonormal_basis(std::span<const Eigen::VectorXcd> basis, int d) {
  if (static_cast<int>(basis.size()) != d) throw std::invalid_argument("basis must have one vector per level");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].size() != d) throw std::invalid_argument("basis vector has wrong dimension");
    for (std::size_t j = 0; j <= i; ++j) {
      const Complex ip = basis[j].dot(basis[i]);
      const double expected = (i == j) ? 1.0 : 0.0;
      if (std::abs(ip - expected) > kNumericTol) throw std::invalid_argument("measurement basis is not orthonormal");
    }
  }
}

void check_partition(const std::vector<std::vector<int>>& partition, int d) {
  if (partition.empty()) throw std::invalid_argument("empty partition");
  std::vector<int> hits(static_cast<std::size_t>(d), 0);
  for (const auto& block : partition) {
    if (block.empty()) throw std::invalid_argument("partition has an empty block");
    for (int k : block) {
      if (k < 0 || k >= d) throw std::invalid_argument("partition index out of range");
      ++hits[static_cast<std::size_t>(k)];
    }
  }
  for (int h : hits) {
    if (h != 1) throw std::invalid_argument("partition must be a disjoint cover of the levels");
  }
}

Eigen::VectorXcd project_levels(const HybridState& state, int subsystem, const std::vector<int>& block) {
  const Dims& dims = state.dims();
  const auto strides = strides_of(dims);
  const auto rest = complement(state.num_subsystems(), std::span<const int>(&subsystem, 1));
  const auto bases = offsets_of(dims, strides, rest);
  const auto& in = state.amplitudes();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (std::size_t base : bases) {
    for (int k : block) {
      const auto idx = static_cast<Eigen::Index>(base + static_cast<std::size_t>(k) * strides[static_cast<std::size_t>(subsystem)]);
      out[idx] = in[idx];
    }
  }
  return out;
}

// Rank-1 projection of `subsystem` onto v, keeping the subsystem.
Eigen::VectorXcd project_vector(const HybridState& state, int subsystem, const Eigen::VectorXcd& v) {
  const Dims& dims = state.dims();
  const auto strides = strides_of(dims);
  const auto s = strides[static_cast<std::size_t>(subsystem)];
  const auto rest = complement(state.num_subsystems(), std::span<const int>(&subsystem, 1));
  const auto bases = offsets_of(dims, strides, rest);
  const auto& in = state.amplitudes();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (std::size_t base : bases) {
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::conj(v[i]) * in[static_cast<Eigen::Index>(base + static_cast<std::size_t>(i) * s)];
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(base + static_cast<std::size_t>(i) * s)] = acc * v[i];
  }
  return out;
}

}  // namespace

std::vector<double> basis_probabilities(const HybridState& state, int subsystem,
                                        std::span<const Eigen::VectorXcd> basis) {
  check_subsystem(state, subsystem);
  check_orthonormal_basis(basis, state.dims()[static_cast<std::size_t>(subsystem)]);
  const double total = state.amplitudes().squaredNorm();
  std::vector<double> p;
  p.reserve(basis.size());
  for (const auto& v : basis) p.push_back(project_vector(state, subsystem, v).squaredNorm() / total);
  return p;
}

std::vector<double> subspace_probabilities(const HybridState& state, int subsystem,
                                           const std::vector<std::vector<int>>& partition) {
  check_subsystem(state, subsystem);
  check_partition(partition, state.dims()[static_cast<std::size_t>(subsystem)]);
  const double total = state.amplitudes().squaredNorm();
  std::vector<double> p;
  p.reserve(partition.size());
  for (const auto& block : partition) p.push_back(project_levels(state, subsystem, block).squaredNorm() / total);
  return p;
}

MeasurementRecord collapse_basis(const HybridState& state, int subsystem,
                                 std::span<const Eigen::VectorXcd> basis, int outcome) {
  const auto p = basis_probabilities(state, subsystem, basis);
  if (outcome < 0 || outcome >= static_cast<int>(p.size())) throw std::out_of_range("measurement outcome out of range");
  if (!(p[static_cast<std::size_t>(outcome)] > 0.0)) throw std::domain_error("measurement outcome has zero probability");
  Eigen::VectorXcd v = project_vector(state, subsystem, basis[static_cast<std::size_t>(outcome)]);
  v /= v.norm();
  return MeasurementRecord{outcome, p[static_cast<std::size_t>(outcome)], HybridState(state.dims(), std::move(v), true)};
}

MeasurementRecord collapse_subspace(const HybridState& state, int subsystem,
                                    const std::vector<std::vector<int>>& partition, int outcome) {
  const auto p = subspace_probabilities(state, subsystem, partition);
  if (outcome < 0 || outcome >= static_cast<int>(p.size())) throw std::out_of_range("measurement outcome out of range");
  if (!(p[static_cast<std::size_t>(outcome)] > 0.0)) throw std::domain_error("measurement outcome has zero probability");
  Eigen::VectorXcd v = project_levels(state, subsystem, partition[static_cast<std::size_t>(outcome)]);
  v /= v.norm();
  return MeasurementRecord{outcome, p[static_cast<std::size_t>(outcome)], HybridState(state.dims(), std::move(v), true)};
}

int sample_index(std::span<const double> probabilities, Rng& rng) {
  const double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("cannot sample from an all-zero distribution");
  std::uniform_real_distribution<double> uni(0.0, total);
  const double u = uni(rng);
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    acc += probabilities[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return last_positive;
  }
  return last_positive;
}

MeasurementRecord measure_basis(const HybridState& state, int subsystem,
                                std::span<const Eigen::VectorXcd> basis, Rng& rng) {
  const auto p = basis_probabilities(state, subsystem, basis);
  return collapse_basis(state, subsystem, basis, sample_index(p, rng));
}

MeasurementRecord measure_basis(const HybridState& state, int subsystem,
                                std::span<const Eigen::VectorXcd> basis, std::uint64_t seed) {
  Rng rng(seed);
  return measure_basis(state, subsystem, basis, rng);
}

MeasurementRecord measure_subspace(const HybridState& state, int subsystem,
                                   const std::vector<std::vector<int>>& partition, Rng& rng) {
  const auto p = subspace_probabilities(state, subsystem, partition);
  return collapse_subspace(state, subsystem, partition, sample_index(p, rng));
}

MeasurementRecord measure_subspace(const HybridState& state, int subsystem,
                                   const std::vector<std::vector<int>>& partition,
                                   std::uint64_t seed) {
  Rng rng(seed);
  return measure_subspace(state, subsystem, partition, rng);
}

std::vector<Eigen::VectorXcd> computational_basis(int d) {
  std::vector<Eigen::VectorXcd> basis;
  for (int k = 0; k < d; ++k) basis.push_back(Eigen::VectorXcd::Unit(d, k));
  return basis;
}

std::vector<Eigen::VectorXcd> plus_minus_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd plus(2), minus(2);
  plus << s, s;
  minus << s, -s;
  return {plus, minus};
}

// --- comparison -----------------------------------------------------------

Complex inner(const HybridState& a, const HybridState& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("inner product of states with different dims");
  return a.amplitudes().dot(b.amplitudes());
}

double state_fidelity(const HybridState& a, const HybridState& b) {
  return std::norm(inner(a, b)) / (a.amplitudes().squaredNorm() * b.amplitudes().squaredNorm());
}

bool equal_up_to_phase(const HybridState& a, const HybridState& b, double tol) {
  if (a.dims() != b.dims()) return false;
  return std::abs(1.0 - state_fidelity(a, b)) <= tol;
}

double fidelity(const DensityMatrix& rho, const HybridState& psi) {
  if (rho.dims() != psi.dims()) throw std::invalid_argument("fidelity: dimension mismatch");
  const auto& v = psi.amplitudes();
  return v.dot(rho.matrix() * v).real();
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const Dims& dims = rho.dims();
  const int n = static_cast<int>(dims.size());
  if (keep.empty()) throw std::invalid_argument("partial_trace must keep at least one subsystem");
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] < 0 || keep[k] >= n) throw std::out_of_range("partial_trace index out of range");
    for (std::size_t j = 0; j < k; ++j) {
      if (keep[j] == keep[k]) throw std::invalid_argument("partial_trace: duplicate index");
    }
  }
  const auto strides = strides_of(dims);
  const auto kept = offsets_of(dims, strides, keep);
  const auto traced = offsets_of(dims, strides, complement(n, keep));
  Dims new_dims;
  for (int k : keep) new_dims.push_back(dims[static_cast<std::size_t>(k)]);
  const auto m = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, m);
  const auto& mat = rho.matrix();
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      Complex acc = 0.0;
      for (std::size_t t : traced)
        acc += mat(static_cast<Eigen::Index>(kept[static_cast<std::size_t>(r)] + t), static_cast<Eigen::Index>(kept[static_cast<std::size_t>(c)] + t));
      out(r, c) = acc;
    }
  }
  return DensityMatrix(std::move(new_dims), std::move(out), rho.normalized());
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

HybridState canonical_isomorphism(const HybridState& state, int qubit, int qudit) {
  check_subsystem(state, qubit);
  check_subsystem(state, qudit);
  if (qubit == qudit) throw std::invalid_argument("isomorphism needs two distinct subsystems");
  const Dims& dims = state.dims();
  if (dims[static_cast<std::size_t>(qubit)] != 2) throw std::invalid_argument("isomorphism: first subsystem must be a qubit");
  const int d = dims[static_cast<std::size_t>(qudit)];
  // Move the qubit directly in front of the qudit; the pair is then one
  // contiguous block x*d + i.
  std::vector<int> order;
  for (int k = 0; k < state.num_subsystems(); ++k) {
    if (k == qubit) continue;
    if (k == qudit) order.push_back(qubit);
    order.push_back(k);
  }
  HybridState moved = permute_subsystems(state, order);
  Dims merged;
  for (int k = 0; k < state.num_subsystems(); ++k) {
    if (k == qubit) continue;
    merged.push_back(k == qudit ? 2 * d : dims[static_cast<std::size_t>(k)]);
  }
  return HybridState(std::move(merged), moved.amplitudes(), state.normalized());
}

HybridState inverse_isomorphism(const HybridState& state, int index) {
  check_subsystem(state, index);
  const Dims& dims = state.dims();
  const int dim = dims[static_cast<std::size_t>(index)];
  if (dim % 2 != 0 || dim < 4) throw std::invalid_argument("inverse isomorphism needs an even dimension >= 4");
  Dims split = dims;
  split[static_cast<std::size_t>(index)] = dim / 2;
  split.insert(split.begin() + index, 2);
  return HybridState(std::move(split), state.amplitudes(), state.normalized());
}

namespace kernels {

Eigen::VectorXcd apply_operator(const Dims& dims, const Eigen::VectorXcd& in, const Eigen::MatrixXcd& op,
                                std::span<const int> targets) {
  const auto strides = strides_of(dims);
  const auto local = offsets_of(dims, strides, targets);
  const auto rest = complement(static_cast<int>(dims.size()), targets);
  const auto bases = offsets_of(dims, strides, rest);
  const auto m = static_cast<Eigen::Index>(local.size());
  if (op.rows() != m || op.cols() != m) throw std::invalid_argument("operator size does not match targets");
  Eigen::VectorXcd out(in.size());
  Eigen::VectorXcd x(m);
  for (std::size_t base : bases) {
    for (Eigen::Index j = 0; j < m; ++j) x[j] = in[static_cast<Eigen::Index>(base + local[static_cast<std::size_t>(j)])];
    const Eigen::VectorXcd y = op * x;
    for (Eigen::Index i = 0; i < m; ++i) out[static_cast<Eigen::Index>(base + local[static_cast<std::size_t>(i)])] = y[i];
  }
  return out;
}

Eigen::VectorXcd contract(const Dims& dims, const Eigen::VectorXcd& in, int subsystem, const Eigen::VectorXcd& bra) {
  const auto strides = strides_of(dims);
  const auto s = strides[static_cast<std::size_t>(subsystem)];
  const auto rest = complement(static_cast<int>(dims.size()), std::span<const int>(&subsystem, 1));
  const auto bases = offsets_of(dims, strides, rest);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(bases.size()));
  for (std::size_t r = 0; r < bases.size(); ++r) {
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < bra.size(); ++i)
      acc += std::conj(bra[i]) * in[static_cast<Eigen::Index>(bases[r] + static_cast<std::size_t>(i) * s)];
    out[static_cast<Eigen::Index>(r)] = acc;
  }
  return out;
}

}  // namespace kernels

}  // namespace qitsim
