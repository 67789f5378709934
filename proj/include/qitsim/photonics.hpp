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
#include <optional>
#include <string>
#include <vector>

#include "qitsim/hilbert.hpp"

/// Linear-optics model of the photonic implementation.
///
/// Each photon carries a polarization mode (H = 0, V = 1) and optionally a
/// path mode (upper = 0, lower = 1). A photon's polarization subsystem
/// precedes its path subsystem, so a dual-DOF photon read as one ququart
/// has index 2 * pol + path: |H0>, |H1>, |V0>, |V1> = |0>, |1>, |2>, |3>.
///
/// Only the one-photon-per-label subspace is simulated. The PPBS keeps the
/// coincidence term in which each photon leaves through its own arm; the
/// photon-exchange contribution to that term is what distinguishable
/// photons lose.
namespace qitsim::photonics {

enum class Dof { Pol, Path };

struct PhotonSpec {
  std::string label;
  bool has_path = false;
};

/// Mode-overlap mixture weight: q interfering, 1 - q distinguishable.
struct DistinguishabilityModel {
  double q = 1.0;

  static DistinguishabilityModel ideal() { return {1.0}; }
  void validate() const;
};

class PhotonRegister {
 public:
  /// `source_overlap` is the preparation-stage noise hook; it multiplies the
  /// q of every interference this register takes part in.
  PhotonRegister(std::vector<PhotonSpec> photons, Eigen::VectorXcd amps, double source_overlap = 1.0);

  const std::vector<PhotonSpec>& photons() const { return photons_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  double source_overlap() const { return source_overlap_; }
  double norm() const { return amps_.norm(); }

  Dims dims() const;
  std::vector<std::string> subsystem_labels() const;
  bool has_photon(const std::string& label) const;
  bool has_path(const std::string& label) const;
  /// Subsystem index of a photon's degree of freedom. Throws if absent.
  int slot(const std::string& label, Dof dof) const;

 private:
  std::vector<PhotonSpec> photons_;
  Eigen::VectorXcd amps_;
  double source_overlap_;
};

/// Photons of `a` followed by photons of `b`; overlaps multiply.
PhotonRegister combine(const PhotonRegister& a, const PhotonRegister& b);

// --- elements -------------------------------------------------------------

GateMatrix jones_hwp(double theta);
GateMatrix jones_qwp(double theta);
/// diag(1, e^{i phi}).
GateMatrix jones_phase(double phi);

/// PPBS amplitudes per polarization.
inline constexpr double kPpbsTransmitH = 0.81649658092772603;  // sqrt(2/3)
inline constexpr double kPpbsReflectH = 0.57735026918962576;   // sqrt(1/3)
inline constexpr double kPpbsTransmitV = 0.0;
inline constexpr double kPpbsReflectV = 1.0;
/// Loss element vertical transmission amplitude.
inline constexpr double kLossVertical = 0.57735026918962576;

enum class ElementKind { HWP, QWP, BD, PPBS, Loss, PhaseShift };

/// Beam displacer routing: to[pol][path] is the output path, -1 if the
/// component leaves the apparatus. Injective per polarization.
struct BdRouting {
  std::array<std::array<int, 2>, 2> to{{{0, 1}, {0, 1}}};
};

struct OpticalElement {
  ElementKind kind = ElementKind::HWP;
  std::string photon;          // PPBS: the control-side photon
  std::optional<int> path;     // act only on this path of `photon` (PPBS: of `partner`)
  double angle = 0.0;          // waveplate angle or phase, radians
  double v_amplitude = 1.0;    // Loss
  BdRouting routing;           // BD
  std::string partner;         // PPBS: the target-side photon
  std::string label;           // free-form name, e.g. "QWP3"
};

OpticalElement hwp(const std::string& photon, double theta, std::optional<int> path = {});
OpticalElement qwp(const std::string& photon, double theta, std::optional<int> path = {});
OpticalElement phase_shift(const std::string& photon, double phi, std::optional<int> path = {});
OpticalElement loss(const std::string& photon, double v_amplitude, std::optional<int> path = {});
/// Loss element with zero vertical amplitude: the transmitted port of a PBS.
OpticalElement pbs_transmit(const std::string& photon, std::optional<int> path = {});
OpticalElement beam_displacer(const std::string& photon, BdRouting routing);
/// Two-photon PPBS; when `target_path` is set only that path of the target
/// meets the control, the other path leaves the control alone at the PPBS.
OpticalElement ppbs(const std::string& control, const std::string& target, std::optional<int> target_path = {});

/// Projects a photon's DOF onto `keep` and removes that subsystem.
struct ComponentFilter {
  std::string photon;
  Dof dof = Dof::Pol;
  Eigen::Vector2cd keep;
};

/// Kept configurations: coincidences with one photon per output arm, then
/// the component filters in order.
struct PostSelectionRule {
  bool coincidence = true;
  std::vector<ComponentFilter> filters;
};

struct OpticalCircuit {
  std::string name;
  std::vector<OpticalElement> elements;
  PostSelectionRule post_selection;
};

OpticalCircuit concat(OpticalCircuit a, const OpticalCircuit& b);

/// Post-selected output. rho is unnormalized with trace equal to the success
/// probability (for a unit-norm input).
struct OpticalOutput {
  Dims dims;
  std::vector<std::string> labels;  // "a1.pol", "b.path", ...
  Eigen::MatrixXcd rho;
  std::optional<Eigen::VectorXcd> pure;  // set when no distinguishable weight entered
  double success_probability = 0.0;

  /// Renormalized output. Throws if nothing survived.
  DensityMatrix state() const;
};

/// Evaluates the circuit. Interfering weight is q * source_overlap; the
/// remainder runs every PPBS incoherently (direct or exchange term).
OpticalOutput run_circuit(const PhotonRegister& reg, const OpticalCircuit& circuit,
                          const DistinguishabilityModel& q = {});
/// Applies further component filters to an output.
OpticalOutput post_select(const OpticalOutput& out, const std::vector<ComponentFilter>& filters);

// --- gates ----------------------------------------------------------------

/// PPBS polarization CNOT: HWP 22.5 deg on the target, loss elements on both
/// photons, PPBS, HWP 22.5 deg, then a Z on the control and an X on the
/// target to undo the beamsplitter signs. Success probability 1/9.
OpticalCircuit ppbs_cnot_circuit(const std::string& control, const std::string& target,
                                 std::optional<int> target_path = {});
OpticalOutput ppbs_cnot(const PhotonRegister& reg, const std::string& control, const std::string& target,
                        std::optional<int> target_path, const DistinguishabilityModel& q = {});

enum class Cx4Variant { Standard, SimplifiedPreBiased };

/// Photons a1, a2 (qubit A on |HH>, |VV>) and b (ququart).
OpticalCircuit cx4_circuit(Cx4Variant variant);

/// Qubit A on (a1, a2), ququart B on b. For SimplifiedPreBiased the input is
/// first re-prepared with the pre-biased amplitudes the loss-free circuit
/// needs; success probability is then relative to that preparation.
OpticalOutput optical_cx4(const PhotonRegister& reg, Cx4Variant variant, const DistinguishabilityModel& q = {});

/// Pre-biased re-preparation used by the simplified gate.
PhotonRegister simplified_prebias(const PhotonRegister& reg);

/// Logical [2, 4] state -> (a1, a2, b) register.
PhotonRegister encode_logical(const HybridState& ab, double source_overlap = 1.0);
/// (a1, a2, b) output -> logical [2, 4] block, unnormalized. Weight outside
/// the code space is dropped.
DensityMatrix decode_logical(const OpticalOutput& out);

// --- preparation ----------------------------------------------------------

/// eps |H>_a1 |H>_a2 + zeta |V>_a1 |V>_a2.
PhotonRegister prepare_system_a(Complex eps, Complex zeta, double source_overlap = 1.0);
/// eta |H0> + kappa |H1> + lambda |V0> + mu |V1> on photon b.
PhotonRegister prepare_system_b(Complex eta, Complex kappa, Complex lambda, Complex mu,
                                double source_overlap = 1.0);

// --- HOM ------------------------------------------------------------------

enum class DelayRegime { Zero, Infinite };

/// Coincidence probability of |H>|H> meeting at a PPBS.
double hom_coincidence(DelayRegime delay, const DistinguishabilityModel& q = {});
/// (c_inf - c_zero) / c_inf.
double visibility(double c_zero, double c_infinity);

// --- ququart analyzer -----------------------------------------------------

struct AnalyzerSetting {
  Eigen::Vector2cd pol;       // (a, b)
  Eigen::Vector2cd path;      // (c, d)
  Eigen::Vector4cd vector;    // pol (x) path
  Eigen::Matrix4cd projector;
  double qwp3 = 0.0, hwp3 = 0.0, qwp4 = 0.0, hwp4 = 0.0;  // radians
  OpticalCircuit circuit;     // acts on photon "b"
};

/// Projector onto (a|H> + b|V>) (x) (c|0> + d|1>) and the element settings
/// that realize it. Inputs are normalized here; zero factors throw.
AnalyzerSetting analyzer_projector(Complex a, Complex b, Complex c, Complex d);
/// Detection probability from running the element sequence.
double analyzer_probability(const AnalyzerSetting& s, const HybridState& ququart);
double analyzer_probability(const AnalyzerSetting& s, const DensityMatrix& ququart);

// --- experiments ----------------------------------------------------------

struct OpticalRun {
  DensityMatrix state;   // normalized logical output
  HybridState target;    // ideal protocol output
  double fidelity = 0.0;
  double success_probability = 0.0;
};

/// Ququart b -> (a1, b path) two-qubit state: CX4, keep b in H, project a2
/// onto |D>.
OpticalRun run_optical_4to2(const std::array<Complex, 4>& b_coeffs, const DistinguishabilityModel& q = {},
                            Cx4Variant variant = Cx4Variant::Standard);
/// (eps, zeta) on a, (eta, kappa) on b paths in H -> ququart b: CX4,
/// project a1 and a2 onto |D>.
OpticalRun run_optical_2to4(Complex eps, Complex zeta, Complex eta, Complex kappa,
                            const DistinguishabilityModel& q = {}, Cx4Variant variant = Cx4Variant::Standard);

}  // namespace qitsim::photonics
