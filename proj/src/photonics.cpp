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
#include <numbers>
#include <stdexcept>

#include "qitsim/photonics.hpp"

namespace qitsim::photonics {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Eigen::Vector2cd pol_vector(Complex a, Complex b) {
  Eigen::Vector2cd v;
  v << a, b;
  return v;
}

Eigen::Vector2cd diagonal() { return pol_vector(std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2); }
Eigen::Vector2cd horizontal() { return pol_vector(1.0, 0.0); }

void check_normalized(double norm2, const char* what) {
  if (std::abs(norm2 - 1.0) > kNumericTol) throw std::invalid_argument(std::string(what) + " coefficients are not normalized");
}

void check_cx4_layout(const PhotonRegister& reg) {
  const auto& p = reg.photons();
  if (p.size() != 3 || p[0].label != "a1" || p[0].has_path || p[1].label != "a2" || p[1].has_path ||
      p[2].label != "b" || !p[2].has_path)
    throw std::invalid_argument("CX4 register must hold photons a1 (pol), a2 (pol), b (pol, path)");
}

// Waveplate angles (qwp, hwp) that carry polarization v to |H> up to phase.
std::pair<double, double> to_horizontal(const Eigen::Vector2cd& v) {
  const double s1 = std::norm(v[0]) - std::norm(v[1]);
  const double s2 = 2.0 * std::real(std::conj(v[0]) * v[1]);
  const double orient = 0.5 * std::atan2(s2, s1);
  Eigen::Vector2cd w = jones_qwp(orient).mat * v;
  const Complex ref = std::abs(w[0]) >= std::abs(w[1]) ? w[0] : w[1];
  w *= std::conj(ref) / std::abs(ref);
  const double chi = std::atan2(w[1].real(), w[0].real());
  return {orient, 0.5 * chi};
}

Eigen::Vector2cd normalized_factor(Complex x, Complex y) {
  Eigen::Vector2cd v = pol_vector(x, y);
  const double n = v.norm();
  if (!(n > 0.0)) throw std::invalid_argument("analyzer factor has zero norm");
  return v / n;
}

}  // namespace

// --- gates ----------------------------------------------------------------

OpticalCircuit ppbs_cnot_circuit(const std::string& control, const std::string& target, std::optional<int> target_path) {
  OpticalCircuit c;
  c.name = "ppbs-cnot";
  c.elements = {hwp(target, 22.5 * kDeg, target_path),
                loss(control, kLossVertical),
                loss(target, kLossVertical, target_path),
                ppbs(control, target, target_path),
                hwp(target, 22.5 * kDeg, target_path),
                phase_shift(control, std::numbers::pi),
                hwp(target, 45.0 * kDeg, target_path)};
  return c;
}

OpticalOutput ppbs_cnot(const PhotonRegister& reg, const std::string& control, const std::string& target,
                        std::optional<int> target_path, const DistinguishabilityModel& q) {
  return run_circuit(reg, ppbs_cnot_circuit(control, target, target_path), q);
}

OpticalCircuit cx4_circuit(Cx4Variant variant) {
  OpticalCircuit c;
  if (variant == Cx4Variant::Standard) {
    c.name = "cx4-standard";
    c.elements = {hwp("b", 22.5 * kDeg), loss("a1", kLossVertical), loss("a2", kLossVertical),
                  loss("b", kLossVertical)};
  } else {
    c.name = "cx4-simplified";
    c.elements = {hwp("b", 15.0 * kDeg)};
  }
  // X02 on the upper path controlled by a1, X13 on the lower path by a2.
  c.elements.push_back(ppbs("a1", "b", 0));
  c.elements.push_back(ppbs("a2", "b", 1));
  c.elements.push_back(hwp("b", 22.5 * kDeg));
  // Both branches leave Z on qubit A and X on b's polarization.
  c.elements.push_back(phase_shift("a1", std::numbers::pi));
  c.elements.push_back(hwp("b", 45.0 * kDeg));
  return c;
}

PhotonRegister simplified_prebias(const PhotonRegister& reg) {
  check_cx4_layout(reg);
  const Dims dims = reg.dims();
  Eigen::Matrix2cd control = Eigen::Matrix2cd::Identity();
  control(1, 1) = 1.0 / 3.0;
  Eigen::Matrix2cd f_inv = Eigen::Matrix2cd::Identity();
  f_inv(1, 1) = kLossVertical;
  const Eigen::Matrix2cd target = jones_hwp(15.0 * kDeg).mat * f_inv * jones_hwp(22.5 * kDeg).mat;
  Eigen::VectorXcd v = reg.amplitudes();
  const int a1 = reg.slot("a1", Dof::Pol);
  const int b = reg.slot("b", Dof::Pol);
  v = kernels::apply_operator(dims, v, control, std::span<const int>(&a1, 1));
  v = kernels::apply_operator(dims, v, target, std::span<const int>(&b, 1));
  return PhotonRegister(reg.photons(), v / v.norm(), reg.source_overlap());
}

OpticalOutput optical_cx4(const PhotonRegister& reg, Cx4Variant variant, const DistinguishabilityModel& q) {
  check_cx4_layout(reg);
  if (variant == Cx4Variant::SimplifiedPreBiased) return run_circuit(simplified_prebias(reg), cx4_circuit(variant), q);
  return run_circuit(reg, cx4_circuit(variant), q);
}

PhotonRegister encode_logical(const HybridState& ab, double source_overlap) {
  if (ab.dims() != Dims{2, 4}) throw std::invalid_argument("logical state must have dims [2, 4]");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(16);
  for (int x = 0; x < 2; ++x)
    for (int i = 0; i < 4; ++i) amps[12 * x + i] = ab[static_cast<std::size_t>(4 * x + i)];
  return PhotonRegister({{"a1", false}, {"a2", false}, {"b", true}}, amps, source_overlap);
}

DensityMatrix decode_logical(const OpticalOutput& out) {
  if (out.labels != std::vector<std::string>{"a1.pol", "a2.pol", "b.pol", "b.path"})
    throw std::invalid_argument("output does not carry the (a1, a2, b) encoding");
  Eigen::MatrixXcd m(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) m(r, c) = out.rho(12 * (r / 4) + r % 4, 12 * (c / 4) + c % 4);
  return DensityMatrix({2, 4}, m, false);
}

// --- preparation ----------------------------------------------------------

PhotonRegister prepare_system_a(Complex eps, Complex zeta, double source_overlap) {
  check_normalized(std::norm(eps) + std::norm(zeta), "system A");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
  amps[0] = eps;
  amps[3] = zeta;
  return PhotonRegister({{"a1", false}, {"a2", false}}, amps, source_overlap);
}

PhotonRegister prepare_system_b(Complex eta, Complex kappa, Complex lambda, Complex mu, double source_overlap) {
  check_normalized(std::norm(eta) + std::norm(kappa) + std::norm(lambda) + std::norm(mu), "system B");
  Eigen::VectorXcd amps(4);
  amps << eta, kappa, lambda, mu;
  return PhotonRegister({{"b", true}}, amps, source_overlap);
}

// --- HOM ------------------------------------------------------------------

double hom_coincidence(DelayRegime delay, const DistinguishabilityModel& q) {
  q.validate();
  Eigen::VectorXcd hh = Eigen::VectorXcd::Zero(4);
  hh[0] = 1.0;
  const PhotonRegister reg({{"c", false}, {"t", false}}, hh);
  OpticalCircuit c;
  c.name = "hom";
  c.elements = {ppbs("c", "t")};
  const DistinguishabilityModel eff{delay == DelayRegime::Zero ? q.q : 0.0};
  return run_circuit(reg, c, eff).success_probability;
}

double visibility(double c_zero, double c_infinity) {
  if (!(c_infinity > 0.0)) throw std::domain_error("visibility needs a positive reference coincidence rate");
  return (c_infinity - c_zero) / c_infinity;
}

// --- analyzer -------------------------------------------------------------

AnalyzerSetting analyzer_projector(Complex a, Complex b, Complex c, Complex d) {
  AnalyzerSetting s;
  s.pol = normalized_factor(a, b);
  s.path = normalized_factor(c, d);
  for (int p = 0; p < 2; ++p)
    for (int k = 0; k < 2; ++k) s.vector[2 * p + k] = s.pol[p] * s.path[k];
  s.projector = s.vector * s.vector.adjoint();
  std::tie(s.qwp3, s.hwp3) = to_horizontal(s.pol);
  std::tie(s.qwp4, s.hwp4) = to_horizontal(s.path);

  BdRouting merge;
  merge.to = {{{0, -1}, {-1, 0}}};  // H0 stays, V1 joins path 0, the rest walks off
  s.circuit.name = "ququart-analyzer";
  s.circuit.elements = {qwp("b", s.qwp3), hwp("b", s.hwp3), hwp("b", 45.0 * kDeg, 1), hwp("b", 0.0, 0),
                        beam_displacer("b", merge), qwp("b", s.qwp4, 0), hwp("b", s.hwp4, 0), pbs_transmit("b", 0)};
  const char* names[] = {"QWP3", "HWP3", "HWP45", "HWP0", "BD", "QWP4", "HWP4", "PBS"};
  for (std::size_t k = 0; k < s.circuit.elements.size(); ++k) s.circuit.elements[k].label = names[k];
  return s;
}

double analyzer_probability(const AnalyzerSetting& s, const HybridState& ququart) {
  return analyzer_probability(s, DensityMatrix::pure(ququart));
}

double analyzer_probability(const AnalyzerSetting& s, const DensityMatrix& ququart) {
  if (ququart.dims() != Dims{4}) throw std::invalid_argument("analyzer input must be a single ququart");
  // Transfer matrix of the element sequence, one column per input basis state.
  Eigen::MatrixXcd t(4, 4);
  for (int k = 0; k < 4; ++k) {
    const PhotonRegister reg({{"b", true}}, Eigen::VectorXcd::Unit(4, k));
    t.col(k) = *run_circuit(reg, s.circuit).pure;
  }
  return (t * ququart.matrix() * t.adjoint()).trace().real();
}

// --- experiments ----------------------------------------------------------

OpticalRun run_optical_4to2(const std::array<Complex, 4>& b, const DistinguishabilityModel& q, Cx4Variant variant) {
  const double h = std::numbers::sqrt2 / 2;
  const auto reg = combine(prepare_system_a(h, h), prepare_system_b(b[0], b[1], b[2], b[3]));
  const auto out = post_select(optical_cx4(reg, variant, q), {{"b", Dof::Pol, horizontal()}, {"a2", Dof::Pol, diagonal()}});
  const std::array<Complex, 4> coeffs = b;
  auto target = make_state({2, 2}, std::span<const Complex>(coeffs));
  auto state = out.state();
  const double f = fidelity(state, target);
  return {std::move(state), std::move(target), f, out.success_probability};
}

OpticalRun run_optical_2to4(Complex eps, Complex zeta, Complex eta, Complex kappa, const DistinguishabilityModel& q,
                            Cx4Variant variant) {
  const auto reg = combine(prepare_system_a(eps, zeta), prepare_system_b(eta, kappa, 0.0, 0.0));
  const auto out = post_select(optical_cx4(reg, variant, q), {{"a1", Dof::Pol, diagonal()}, {"a2", Dof::Pol, diagonal()}});
  const std::array<Complex, 4> coeffs{eps * eta, eps * kappa, zeta * eta, zeta * kappa};
  auto target = make_state({4}, std::span<const Complex>(coeffs));
  const double tr = out.rho.trace().real();
  if (!(tr > 0.0)) throw std::domain_error("post-selected output has zero weight");
  DensityMatrix state({4}, out.rho / tr, true);
  const double f = fidelity(state, target);
  return {std::move(state), std::move(target), f, out.success_probability};
}

}  // namespace qitsim::photonics
