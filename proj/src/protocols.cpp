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

#include "qitsim/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qitsim {

CompletionMode CompletionMode::post_select(std::vector<int> kept) {
  if (kept.empty()) throw std::invalid_argument("post-selection needs at least one kept outcome");
  return CompletionMode{CompletionKind::PostSelect, std::move(kept)};
}

OutcomeSource OutcomeSource::forced(std::vector<int> outcomes) {
  OutcomeSource src;
  src.forced_ = std::move(outcomes);
  return src;
}

int OutcomeSource::choose(std::span<const double> probabilities, std::span<const int> allowed) {
  const int n = static_cast<int>(probabilities.size());
  std::vector<double> masked(probabilities.begin(), probabilities.end());
  if (!allowed.empty()) {
    for (int a : allowed) {
      if (a < 0 || a >= n) throw std::invalid_argument("kept outcome label out of range");
    }
    for (int k = 0; k < n; ++k) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) masked[static_cast<std::size_t>(k)] = 0.0;
    }
  }
  if (!rng_) {
    if (next_ >= forced_.size()) throw std::out_of_range("forced outcome sequence exhausted");
    const int k = forced_[next_++];
    if (k < 0 || k >= n || !(masked[static_cast<std::size_t>(k)] > 0.0))
      throw std::invalid_argument("forced outcome is not an allowed branch with nonzero probability");
    return k;
  }
  return sample_index(masked, *rng_);
}

namespace {

constexpr int kLower = 0;

void require_normalized(const HybridState& s, const char* what) {
  if (!s.normalized()) throw std::invalid_argument(std::string(what) + ": input must be a normalized state");
}

std::span<const int> allowed_of(const CompletionMode& mode) {
  if (mode.kind == CompletionKind::PostSelect) return mode.kept;
  return {};
}

double kept_weight(const CompletionMode& mode, const std::vector<double>& p) {
  if (mode.kind == CompletionKind::FeedForward) return 1.0;
  double w = 0.0;
  for (int k : mode.kept) w += p[static_cast<std::size_t>(k)];
  return w;
}

void append(ProtocolResult& into, ProtocolResult&& step) {
  for (auto& rec : step.outcome_log) into.outcome_log.push_back(std::move(rec));
  for (auto& c : step.corrections_applied) into.corrections_applied.push_back(std::move(c));
  into.success_probability *= step.success_probability;
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> r(static_cast<std::size_t>(hi - lo));
  std::iota(r.begin(), r.end(), lo);
  return r;
}

HybridState plus_state() {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex amps[] = {s, s};
  return make_state({2}, amps);
}

// Inserts a |+> ancilla at slot `index`.
HybridState with_ancilla(const HybridState& reg, int index) {
  HybridState joint = tensor(plus_state(), reg);
  std::vector<int> order;
  for (int k = 1; k <= reg.num_subsystems(); ++k) {
    if (k - 1 == index) order.push_back(0);
    order.push_back(k);
  }
  if (index == reg.num_subsystems()) order.push_back(0);
  return permute_subsystems(joint, order);
}

// CX_2d from the ancilla, subspace measurement on the qudit, correction
// X (x) X_2d on the upper block. When `restrict_to_block` is set the qudit
// is reduced to the d levels of the block it ends up in.
ProtocolResult split_core(const std::string& name, const HybridState& reg, int index, const CompletionMode& mode,
                          OutcomeSource& outcomes, bool restrict_to_block) {
  const int dim = reg.dims()[static_cast<std::size_t>(index)];
  if (dim % 2 != 0) throw std::invalid_argument(name + ": qudit dimension must be even, got " + std::to_string(dim));
  const int d = dim / 2;
  const int qubit = index;
  const int qudit = index + 1;

  HybridState state = apply(with_ancilla(reg, index), controlled(gate_x2d(d)), {qubit, qudit});
  const std::vector<std::vector<int>> blocks{range(0, d), range(d, 2 * d)};
  const auto p = subspace_probabilities(state, qudit, blocks);
  const int outcome = outcomes.choose(p, allowed_of(mode));
  MeasurementRecord rec = collapse_subspace(state, qudit, blocks, outcome);
  state = rec.post_state;

  ProtocolResult result{name, state, {}, {}, kept_weight(mode, p)};
  result.outcome_log.push_back(std::move(rec));
  int block = outcome;
  if (mode.kind == CompletionKind::FeedForward) {
    const GateMatrix x2d = gate_x2d(d);
    if (outcome == kLower) {
      result.corrections_applied = {{"I", qubit}, {gate_i(2 * d).name, qudit}};
    } else {
      state = apply(apply(state, gate_x(), {qubit}), x2d, {qudit});
      result.corrections_applied = {{"X", qubit}, {x2d.name, qudit}};
      block = kLower;
    }
  }
  if (restrict_to_block) {
    const auto keep = range(block * d, (block + 1) * d);
    state = restrict_subsystem(state, qudit, keep);
  }
  result.final_state = state;
  return result;
}

// CX_2d from the qubit onto the (embedded) qudit, |+/-> measurement of the
// qubit, correction Z_2d on "-". The qubit slot disappears.
ProtocolResult merge_core(const std::string& name, const HybridState& reg, int qubit, int qudit,
                          const CompletionMode& mode, OutcomeSource& outcomes) {
  const int d = reg.dims()[static_cast<std::size_t>(qudit)];
  HybridState state = embed_subsystem(reg, qudit, 2 * d);
  state = apply(state, controlled(gate_x2d(d)), {qubit, qudit});
  const auto basis = plus_minus_basis();
  const auto p = basis_probabilities(state, qubit, basis);
  const int outcome = outcomes.choose(p, allowed_of(mode));
  MeasurementRecord rec = collapse_basis(state, qubit, basis, outcome);
  state = rec.post_state;

  ProtocolResult result{name, state, {}, {}, kept_weight(mode, p)};
  result.outcome_log.push_back(std::move(rec));
  if (mode.kind == CompletionKind::FeedForward) {
    const GateMatrix z2d = gate_z2d(d);
    if (outcome == kLower) {
      result.corrections_applied = {{gate_i(2 * d).name, qudit}};
    } else {
      state = apply(state, z2d, {qudit});
      result.corrections_applied = {{z2d.name, qudit}};
    }
  }
  // The measured qubit is exactly the basis vector; contracting it out is
  // lossless.
  result.final_state = contract(state, qubit, basis[static_cast<std::size_t>(outcome)]).renormalized();
  return result;
}

}  // namespace

// --- fixed-dimension transfers --------------------------------------------

ProtocolResult qit_2to2(const HybridState& b_state, const CompletionMode& mode, OutcomeSource& outcomes) {
  if (b_state.dims() != Dims{2}) throw std::invalid_argument("qit_2to2: input must be a single qubit");
  require_normalized(b_state, "qit_2to2");
  HybridState state = apply(tensor(plus_state(), b_state), controlled(gate_x()), {0, 1});
  const auto basis = computational_basis(2);
  const auto p = basis_probabilities(state, 1, basis);
  const int outcome = outcomes.choose(p, allowed_of(mode));
  MeasurementRecord rec = collapse_basis(state, 1, basis, outcome);
  state = rec.post_state;
  ProtocolResult result{"qit_2to2", state, {}, {}, kept_weight(mode, p)};
  result.outcome_log.push_back(std::move(rec));
  if (mode.kind == CompletionKind::FeedForward) {
    if (outcome == kLower) {
      result.corrections_applied = {{"I", 0}};
    } else {
      state = apply(state, gate_x(), {0});
      result.corrections_applied = {{"X", 0}};
    }
  }
  result.final_state = contract(state, 1, basis[static_cast<std::size_t>(outcome)]).renormalized();
  return result;
}

ProtocolResult qit_2to2(const HybridState& b_state, const CompletionMode& mode, std::uint64_t seed) {
  OutcomeSource src(seed);
  return qit_2to2(b_state, mode, src);
}

ProtocolResult qit_4to2(const HybridState& b_state, const CompletionMode& mode, OutcomeSource& outcomes) {
  if (b_state.dims() != Dims{4}) throw std::invalid_argument("qit_4to2: input must be a single ququart");
  require_normalized(b_state, "qit_4to2");
  return split_core("qit_4to2", b_state, 0, mode, outcomes, false);
}

ProtocolResult qit_4to2(const HybridState& b_state, const CompletionMode& mode, std::uint64_t seed) {
  OutcomeSource src(seed);
  return qit_4to2(b_state, mode, src);
}

ProtocolResult qit_2to4(const HybridState& joint, const CompletionMode& mode, OutcomeSource& outcomes) {
  if (joint.dims() != Dims{2, 4}) throw std::invalid_argument("qit_2to4: input must have dims [2, 4]");
  require_normalized(joint, "qit_2to4");
  for (int x = 0; x < 2; ++x) {
    for (int level = 2; level < 4; ++level) {
      if (std::abs(joint[static_cast<std::size_t>(4 * x + level)]) > kIdentityTol)
        throw std::invalid_argument("qit_2to4: ququart must be supported on |0>, |1> only");
    }
  }
  const int lower[] = {0, 1};
  HybridState reduced = restrict_subsystem(joint, 1, lower);
  return merge_core("qit_2to4", reduced, 0, 1, mode, outcomes);
}

ProtocolResult qit_2to4(const HybridState& joint, const CompletionMode& mode, std::uint64_t seed) {
  OutcomeSource src(seed);
  return qit_2to4(joint, mode, src);
}

// --- merge / split ----------------------------------------------------------

ProtocolResult merge(const HybridState& joint, const CompletionMode& mode, OutcomeSource& outcomes) {
  if (joint.num_subsystems() != 2 || joint.dims()[0] != 2)
    throw std::invalid_argument("merge: input must have dims [2, d]");
  if (joint.dims()[1] < 2) throw std::invalid_argument("merge: d must be >= 2");
  require_normalized(joint, "merge");
  return merge_core("merge", joint, 0, 1, mode, outcomes);
}

ProtocolResult merge(const HybridState& joint, const CompletionMode& mode, std::uint64_t seed) {
  OutcomeSource src(seed);
  return merge(joint, mode, src);
}

ProtocolResult merge(const HybridState& a_state, const HybridState& b_state, const CompletionMode& mode,
                     std::uint64_t seed) {
  if (a_state.dims() != Dims{2}) throw std::invalid_argument("merge: first input must be a qubit");
  if (b_state.num_subsystems() != 1) throw std::invalid_argument("merge: second input must be a single qudit");
  require_normalized(a_state, "merge");
  require_normalized(b_state, "merge");
  return merge(tensor(a_state, b_state), mode, seed);
}

ProtocolResult split(const HybridState& b_state, const CompletionMode& mode, OutcomeSource& outcomes) {
  if (b_state.num_subsystems() != 1) throw std::invalid_argument("split: input must be a single qudit");
  require_normalized(b_state, "split");
  const int dim = b_state.dims()[0];
  if (dim % 2 != 0 || dim < 4) throw std::invalid_argument("split: dimension must be even and >= 4");
  return split_core("split", b_state, 0, mode, outcomes, true);
}

ProtocolResult split(const HybridState& b_state, const CompletionMode& mode, std::uint64_t seed) {
  OutcomeSource src(seed);
  return split(b_state, mode, src);
}

ProtocolResult merge_in_register(const HybridState& reg, int qubit, int qudit, const CompletionMode& mode,
                                 OutcomeSource& outcomes) {
  if (qubit < 0 || qubit >= reg.num_subsystems() || qudit < 0 || qudit >= reg.num_subsystems() || qubit == qudit)
    throw std::out_of_range("merge_in_register: bad subsystem indices");
  if (reg.dims()[static_cast<std::size_t>(qubit)] != 2) throw std::invalid_argument("merge_in_register: not a qubit");
  require_normalized(reg, "merge_in_register");
  return merge_core("merge", reg, qubit, qudit, mode, outcomes);
}

ProtocolResult split_in_register(const HybridState& reg, int index, const CompletionMode& mode,
                                 OutcomeSource& outcomes) {
  if (index < 0 || index >= reg.num_subsystems()) throw std::out_of_range("split_in_register: bad subsystem index");
  const int dim = reg.dims()[static_cast<std::size_t>(index)];
  if (dim % 2 != 0 || dim < 4) throw std::invalid_argument("split_in_register: dimension must be even and >= 4");
  require_normalized(reg, "split_in_register");
  return split_core("split", reg, index, mode, outcomes, true);
}

// --- synthesis --------------------------------------------------------------

SynthesizedGate::SynthesizedGate(GateMatrix u, int num_qubits, BitOrder order)
    : u_(std::move(u)), num_qubits_(num_qubits), order_(order) {
  if (num_qubits_ < 2 || num_qubits_ > 4) throw std::invalid_argument("synthesize_gate: n must be in [2, 4]");
  const auto side = static_cast<Eigen::Index>(1) << num_qubits_;
  if (u_.mat.rows() != side || u_.mat.cols() != side)
    throw std::invalid_argument("synthesize_gate: unitary side must be 2^n");
  const Eigen::MatrixXcd err = u_.mat.adjoint() * u_.mat - Eigen::MatrixXcd::Identity(side, side);
  if (err.cwiseAbs().maxCoeff() > kIdentityTol) throw std::invalid_argument("synthesize_gate: gate is not unitary");
  u_.dims = Dims(static_cast<std::size_t>(num_qubits_), 2);
  u_.unitary = true;

  significance_.resize(static_cast<std::size_t>(num_qubits_));
  for (int k = 0; k < num_qubits_; ++k)
    significance_[static_cast<std::size_t>(k)] = order_ == BitOrder::FirstQubitLeast ? k : num_qubits_ - 1 - k;

  auto qname = [](int slot) { return "qubit " + std::to_string(slot + 1); };
  int d = 2;
  std::string acc = qname(significance_[0]);
  for (int k = 1; k < num_qubits_; ++k) {
    steps_.push_back("Merge(2," + std::to_string(d) + "->" + std::to_string(2 * d) + ") " +
                     qname(significance_[static_cast<std::size_t>(k)]) + " into " + acc);
    acc = "qudit" + std::to_string(2 * d);
    d *= 2;
  }
  steps_.push_back("Unitary " + std::to_string(d) + "x" + std::to_string(d) + " on qudit" + std::to_string(d));
  for (int k = num_qubits_ - 1; k >= 1; --k) {
    steps_.push_back("Split(" + std::to_string(d) + "->2," + std::to_string(d / 2) + ") releasing " +
                     qname(significance_[static_cast<std::size_t>(k)]));
    d /= 2;
  }
}

std::vector<int> SynthesizedGate::direct_targets() const {
  return std::vector<int>(significance_.rbegin(), significance_.rend());
}

ProtocolResult SynthesizedGate::run(const HybridState& input, const CompletionMode& mode,
                                    OutcomeSource& outcomes) const {
  if (input.dims() != Dims(static_cast<std::size_t>(num_qubits_), 2))
    throw std::invalid_argument("synthesized gate input must be " + std::to_string(num_qubits_) + " qubits");
  require_normalized(input, "synthesized gate");

  ProtocolResult total{"synthesize", input, {}, {}, 1.0};
  // labels[slot] = register qubit held in that slot, -1 for the merged qudit.
  std::vector<int> labels(static_cast<std::size_t>(num_qubits_));
  std::iota(labels.begin(), labels.end(), 0);
  HybridState reg = input;
  auto slot_of = [&](int qubit) {
    return static_cast<int>(std::find(labels.begin(), labels.end(), qubit) - labels.begin());
  };

  int qudit = slot_of(significance_[0]);
  labels[static_cast<std::size_t>(qudit)] = -1;
  for (int k = 1; k < num_qubits_; ++k) {
    const int qubit = slot_of(significance_[static_cast<std::size_t>(k)]);
    ProtocolResult step = merge_in_register(reg, qubit, qudit, mode, outcomes);
    reg = step.final_state;
    labels.erase(labels.begin() + qubit);
    if (qubit < qudit) --qudit;
    append(total, std::move(step));
  }

  reg = apply(reg, GateMatrix{{static_cast<int>(u_.mat.rows())}, u_.mat, true, u_.name}, {0});

  for (int k = num_qubits_ - 1; k >= 1; --k) {
    ProtocolResult step = split_in_register(reg, qudit, mode, outcomes);
    reg = step.final_state;
    labels.insert(labels.begin() + qudit, significance_[static_cast<std::size_t>(k)]);
    ++qudit;
    append(total, std::move(step));
  }
  labels[static_cast<std::size_t>(qudit)] = significance_[0];

  std::vector<int> order(static_cast<std::size_t>(num_qubits_));
  for (int q = 0; q < num_qubits_; ++q) order[static_cast<std::size_t>(q)] = slot_of(q);
  total.final_state = permute_subsystems(reg, order);
  return total;
}

ProtocolResult SynthesizedGate::run(const HybridState& input, const CompletionMode& mode, std::uint64_t seed) const {
  OutcomeSource src(seed);
  return run(input, mode, src);
}

SynthesizedGate synthesize_gate(const GateMatrix& u, int n, BitOrder order) { return SynthesizedGate(u, n, order); }

}  // namespace qitsim
