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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qitsim/hilbert.hpp"

/// Information-transfer circuits between registers of different dimension.
///
/// Every protocol is entangling gate + projective measurement + completion.
/// Completion is either feed-forward (a correction chosen by the outcome,
/// success probability 1) or post-selection (keep some outcomes, apply no
/// correction, success probability = Born weight of the kept branch).
///
/// Correction assignment used throughout: the lower block / "+" outcome
/// (label 0) takes the identity, the upper block / "-" outcome (label 1)
/// takes the nontrivial correction.
namespace qitsim {

enum class CompletionKind { FeedForward, PostSelect };

struct CompletionMode {
  CompletionKind kind = CompletionKind::FeedForward;
  std::vector<int> kept;  // PostSelect only

  static CompletionMode feed_forward() { return {}; }
  static CompletionMode post_select(std::vector<int> kept);
};

struct Correction {
  std::string gate;
  int subsystem = 0;
};

struct ProtocolResult {
  std::string protocol;
  HybridState final_state;
  std::vector<MeasurementRecord> outcome_log;
  std::vector<Correction> corrections_applied;
  double success_probability = 1.0;
};

/// Source of measurement outcomes: seeded sampling, or a forced sequence
/// (used to walk every branch deterministically).
class OutcomeSource {
 public:
  explicit OutcomeSource(std::uint64_t seed) : rng_(seed) {}
  static OutcomeSource forced(std::vector<int> outcomes);

  /// Picks an outcome among `allowed` (all outcomes when empty), sampling
  /// with the Born probabilities renormalized over the allowed set.
  int choose(std::span<const double> probabilities, std::span<const int> allowed);

 private:
  OutcomeSource() = default;
  std::optional<Rng> rng_;
  std::vector<int> forced_;
  std::size_t next_ = 0;
};

// --- fixed-dimension transfers --------------------------------------------

/// Qubit B -> qubit A. A starts in |+>; final_state is A alone.
ProtocolResult qit_2to2(const HybridState& b_state, const CompletionMode& mode, std::uint64_t seed);
ProtocolResult qit_2to2(const HybridState& b_state, const CompletionMode& mode, OutcomeSource& outcomes);

/// Ququart B -> (qubit A, ququart B). final_state has dims [2, 4] with B
/// supported on {|0>, |1>}.
ProtocolResult qit_4to2(const HybridState& b_state, const CompletionMode& mode, std::uint64_t seed);
ProtocolResult qit_4to2(const HybridState& b_state, const CompletionMode& mode, OutcomeSource& outcomes);

/// (qubit A, ququart B with support on {|0>, |1>}) -> ququart B.
/// final_state has dims [4].
ProtocolResult qit_2to4(const HybridState& joint, const CompletionMode& mode, std::uint64_t seed);
ProtocolResult qit_2to4(const HybridState& joint, const CompletionMode& mode, OutcomeSource& outcomes);

// --- generalized merge / split --------------------------------------------

/// Merge(2, d -> 2d) of a product input.
ProtocolResult merge(const HybridState& a_state, const HybridState& b_state, const CompletionMode& mode,
                     std::uint64_t seed);
/// Merge of an arbitrary (possibly entangled) joint [2, d] input.
ProtocolResult merge(const HybridState& joint, const CompletionMode& mode, std::uint64_t seed);
ProtocolResult merge(const HybridState& joint, const CompletionMode& mode, OutcomeSource& outcomes);

/// Split(2d -> 2, d). final_state has dims [2, d].
ProtocolResult split(const HybridState& b_state, const CompletionMode& mode, std::uint64_t seed);
ProtocolResult split(const HybridState& b_state, const CompletionMode& mode, OutcomeSource& outcomes);

/// Merge acting inside a larger register; other subsystems are spectators.
/// The qubit slot is removed and the qudit slot grows to 2d.
ProtocolResult merge_in_register(const HybridState& reg, int qubit, int qudit, const CompletionMode& mode,
                                 OutcomeSource& outcomes);
/// Split acting inside a larger register: slot `index` (dim 2d) becomes the
/// pair (qubit, d-level) at (index, index + 1).
ProtocolResult split_in_register(const HybridState& reg, int index, const CompletionMode& mode,
                                 OutcomeSource& outcomes);

// --- multi-qubit gates through one qudit ----------------------------------

/// How register qubits map onto digits of the 2^n-level qudit.
enum class BitOrder {
  FirstQubitLeast,  // qubit 1 (register slot 0) is the least significant bit
  FirstQubitMost,   // qubit 1 is the most significant bit
};

/// merge chain -> unitary on the qudit -> split chain. With FirstQubitLeast
/// the chain merges qubit 2 into qubit 1, then qubit 3 into that qudit,
/// and so on; splits undo the merges in reverse.
class SynthesizedGate {
 public:
  SynthesizedGate(GateMatrix u, int num_qubits, BitOrder order);

  int num_qubits() const { return num_qubits_; }
  BitOrder bit_order() const { return order_; }
  const GateMatrix& unitary() const { return u_; }
  /// Human-readable pipeline, one entry per stage.
  const std::vector<std::string>& steps() const { return steps_; }
  /// Target list under which apply(state, unitary(), targets) is the
  /// direct (non-qudit) application the pipeline reproduces.
  std::vector<int> direct_targets() const;

  ProtocolResult run(const HybridState& input, const CompletionMode& mode, std::uint64_t seed) const;
  ProtocolResult run(const HybridState& input, const CompletionMode& mode, OutcomeSource& outcomes) const;

 private:
  GateMatrix u_;
  int num_qubits_;
  BitOrder order_;
  std::vector<int> significance_;  // significance_[k] = register qubit carrying bit k
  std::vector<std::string> steps_;
};

/// Requires u unitary with side 2^n, 2 <= n <= 4.
SynthesizedGate synthesize_gate(const GateMatrix& u, int n, BitOrder order = BitOrder::FirstQubitLeast);

}  // namespace qitsim
