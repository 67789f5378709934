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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qitsim/photonics.hpp"

namespace qitsim::photonics {

namespace {

enum class PpbsTerm { Coherent, Direct, Exchange };

std::string dof_name(Dof dof) { return dof == Dof::Pol ? "pol" : "path"; }

double transmit(int pol) { return pol == 0 ? kPpbsTransmitH : kPpbsTransmitV; }
double reflect(int pol) { return pol == 0 ? kPpbsReflectH : kPpbsReflectV; }

// Two-photon map on (control pol, target pol), index 2 * pc + pt, for the
// coincidence where each photon exits through its own arm.
Eigen::Matrix4cd ppbs_pair(PpbsTerm term) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  for (int pc = 0; pc < 2; ++pc) {
    for (int pt = 0; pt < 2; ++pt) {
      const int in = 2 * pc + pt;
      if (term != PpbsTerm::Exchange) m(in, in) += -reflect(pc) * reflect(pt);
      if (term != PpbsTerm::Direct) m(2 * pt + pc, in) += transmit(pc) * transmit(pt);
    }
  }
  return m;
}

struct LocalOp {
  std::vector<int> targets;
  Eigen::MatrixXcd mat;
};

LocalOp single_photon(const PhotonRegister& reg, const OpticalElement& e, const Eigen::Matrix2cd& m) {
  const int pol = reg.slot(e.photon, Dof::Pol);
  if (!e.path) return {{pol}, m};
  if (!reg.has_path(e.photon)) throw std::invalid_argument("path condition on photon without path: " + e.photon);
  if (*e.path < 0 || *e.path > 1) throw std::invalid_argument("path condition must be 0 or 1");
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Identity(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) full(2 * a + *e.path, 2 * b + *e.path) = m(a, b);
  return {{pol, reg.slot(e.photon, Dof::Path)}, full};
}

LocalOp bd_op(const PhotonRegister& reg, const OpticalElement& e) {
  if (!reg.has_path(e.photon)) throw std::invalid_argument("beam displacer needs a path mode on " + e.photon);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  for (int pol = 0; pol < 2; ++pol) {
    const auto& to = e.routing.to[static_cast<std::size_t>(pol)];
    if (to[0] >= 0 && to[0] == to[1]) throw std::invalid_argument("beam displacer routing is not injective");
    for (int path = 0; path < 2; ++path) {
      const int dest = to[static_cast<std::size_t>(path)];
      if (dest < -1 || dest > 1) throw std::invalid_argument("beam displacer routing out of range");
      if (dest >= 0) m(2 * pol + dest, 2 * pol + path) = 1.0;
    }
  }
  return {{reg.slot(e.photon, Dof::Pol), reg.slot(e.photon, Dof::Path)}, m};
}

LocalOp ppbs_op(const PhotonRegister& reg, const OpticalElement& e, PpbsTerm term) {
  if (e.photon == e.partner) throw std::invalid_argument("PPBS photons must be distinct");
  const int pc = reg.slot(e.photon, Dof::Pol);
  const int pt = reg.slot(e.partner, Dof::Pol);
  const Eigen::Matrix4cd pair = ppbs_pair(term);
  if (!e.path) return {{pc, pt}, pair};
  if (!reg.has_path(e.partner)) throw std::invalid_argument("path condition on photon without path: " + e.partner);
  const int p = *e.path;
  if (p < 0 || p > 1) throw std::invalid_argument("path condition must be 0 or 1");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(8, 8);
  for (int c = 0; c < 2; ++c) {
    for (int t = 0; t < 2; ++t) {
      for (int path = 0; path < 2; ++path) {
        const int col = 4 * c + 2 * t + path;
        if (path == p) {
          for (int c2 = 0; c2 < 2; ++c2)
            for (int t2 = 0; t2 < 2; ++t2) m(4 * c2 + 2 * t2 + path, col) = pair(2 * c2 + t2, 2 * c + t);
        } else if (term != PpbsTerm::Exchange) {
          // The control crosses the PPBS alone and must reflect into its arm.
          m(col, col) = reflect(c);
        }
      }
    }
  }
  return {{pc, pt, reg.slot(e.partner, Dof::Path)}, m};
}

LocalOp element_op(const PhotonRegister& reg, const OpticalElement& e, PpbsTerm term) {
  switch (e.kind) {
    case ElementKind::HWP: return single_photon(reg, e, jones_hwp(e.angle).mat);
    case ElementKind::QWP: return single_photon(reg, e, jones_qwp(e.angle).mat);
    case ElementKind::PhaseShift: return single_photon(reg, e, jones_phase(e.angle).mat);
    case ElementKind::Loss: {
      if (e.v_amplitude < 0.0 || e.v_amplitude > 1.0) throw std::invalid_argument("loss amplitude must lie in [0, 1]");
      Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
      m(0, 0) = 1.0;
      m(1, 1) = e.v_amplitude;
      return single_photon(reg, e, m);
    }
    case ElementKind::BD: return bd_op(reg, e);
    case ElementKind::PPBS: return ppbs_op(reg, e, term);
  }
  throw std::logic_error("unknown element kind");
}

struct Layout {
  Dims dims;
  std::vector<std::string> labels;
};

int find_label(const Layout& layout, const ComponentFilter& f) {
  const auto name = f.photon + "." + dof_name(f.dof);
  const auto it = std::find(layout.labels.begin(), layout.labels.end(), name);
  if (it == layout.labels.end()) throw std::invalid_argument("filter refers to missing mode " + name);
  return static_cast<int>(it - layout.labels.begin());
}

Eigen::VectorXcd filter_bra(const ComponentFilter& f) {
  const double n = f.keep.norm();
  if (!(n > 0.0)) throw std::invalid_argument("component filter vector is zero");
  return f.keep / n;
}

// Contracts every column of m on subsystem `sub`.
Eigen::MatrixXcd contract_columns(const Dims& dims, const Eigen::MatrixXcd& m, int sub, const Eigen::VectorXcd& bra) {
  const auto rows = static_cast<Eigen::Index>(total_dim(dims) / static_cast<std::size_t>(dims[static_cast<std::size_t>(sub)]));
  Eigen::MatrixXcd out(rows, m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.col(j) = kernels::contract(dims, m.col(j), sub, bra);
  return out;
}

}  // namespace

void DistinguishabilityModel::validate() const {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("distinguishability q must lie in [0, 1]");
}

// --- register -------------------------------------------------------------

PhotonRegister::PhotonRegister(std::vector<PhotonSpec> photons, Eigen::VectorXcd amps, double source_overlap)
    : photons_(std::move(photons)), amps_(std::move(amps)), source_overlap_(source_overlap) {
  if (photons_.empty()) throw std::invalid_argument("photon register needs at least one photon");
  for (std::size_t i = 0; i < photons_.size(); ++i) {
    for (std::size_t j = i + 1; j < photons_.size(); ++j)
      if (photons_[i].label == photons_[j].label) throw std::invalid_argument("duplicate photon label " + photons_[i].label);
  }
  if (static_cast<std::size_t>(amps_.size()) != total_dim(dims()))
    throw std::invalid_argument("amplitude count does not match photon modes");
  if (amps_.norm() > 1.0 + kNumericTol) throw std::invalid_argument("photon register norm exceeds 1");
  DistinguishabilityModel{source_overlap_}.validate();
}

Dims PhotonRegister::dims() const {
  Dims d;
  for (const auto& p : photons_) {
    d.push_back(2);
    if (p.has_path) d.push_back(2);
  }
  return d;
}

std::vector<std::string> PhotonRegister::subsystem_labels() const {
  std::vector<std::string> out;
  for (const auto& p : photons_) {
    out.push_back(p.label + ".pol");
    if (p.has_path) out.push_back(p.label + ".path");
  }
  return out;
}

bool PhotonRegister::has_photon(const std::string& label) const {
  return std::any_of(photons_.begin(), photons_.end(), [&](const PhotonSpec& p) { return p.label == label; });
}

bool PhotonRegister::has_path(const std::string& label) const {
  return std::any_of(photons_.begin(), photons_.end(),
                     [&](const PhotonSpec& p) { return p.label == label && p.has_path; });
}

int PhotonRegister::slot(const std::string& label, Dof dof) const {
  int k = 0;
  for (const auto& p : photons_) {
    if (p.label == label) {
      if (dof == Dof::Pol) return k;
      if (!p.has_path) throw std::invalid_argument("photon " + label + " has no path mode");
      return k + 1;
    }
    k += p.has_path ? 2 : 1;
  }
  throw std::invalid_argument("no photon labelled " + label);
}

PhotonRegister combine(const PhotonRegister& a, const PhotonRegister& b) {
  auto photons = a.photons();
  photons.insert(photons.end(), b.photons().begin(), b.photons().end());
  Eigen::VectorXcd amps(a.amplitudes().size() * b.amplitudes().size());
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i)
    amps.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()[i] * b.amplitudes();
  return PhotonRegister(std::move(photons), std::move(amps), a.source_overlap() * b.source_overlap());
}

// --- Jones matrices -------------------------------------------------------

GateMatrix jones_hwp(double theta) {
  const double c = std::cos(2 * theta), s = std::sin(2 * theta);
  Eigen::MatrixXcd m(2, 2);
  m << c, s, s, -c;
  return GateMatrix::make_unitary({2}, m, "HWP");
}

GateMatrix jones_qwp(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2cd r;
  r << c, -s, s, c;
  Eigen::Matrix2cd retard = Eigen::Matrix2cd::Zero();
  retard(0, 0) = 1.0;
  retard(1, 1) = Complex(0.0, 1.0);
  return GateMatrix::make_unitary({2}, r * retard * r.adjoint(), "QWP");
}

GateMatrix jones_phase(double phi) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = std::polar(1.0, phi);
  return GateMatrix::make_unitary({2}, m, "PS");
}

// --- element factories ----------------------------------------------------

OpticalElement hwp(const std::string& photon, double theta, std::optional<int> path) {
  OpticalElement e;
  e.kind = ElementKind::HWP;
  e.photon = photon;
  e.path = path;
  e.angle = theta;
  return e;
}

OpticalElement qwp(const std::string& photon, double theta, std::optional<int> path) {
  auto e = hwp(photon, theta, path);
  e.kind = ElementKind::QWP;
  return e;
}

OpticalElement phase_shift(const std::string& photon, double phi, std::optional<int> path) {
  auto e = hwp(photon, phi, path);
  e.kind = ElementKind::PhaseShift;
  return e;
}

OpticalElement loss(const std::string& photon, double v_amplitude, std::optional<int> path) {
  OpticalElement e;
  e.kind = ElementKind::Loss;
  e.photon = photon;
  e.path = path;
  e.v_amplitude = v_amplitude;
  return e;
}

OpticalElement pbs_transmit(const std::string& photon, std::optional<int> path) {
  auto e = loss(photon, 0.0, path);
  e.label = "PBS";
  return e;
}

OpticalElement beam_displacer(const std::string& photon, BdRouting routing) {
  OpticalElement e;
  e.kind = ElementKind::BD;
  e.photon = photon;
  e.routing = routing;
  return e;
}

OpticalElement ppbs(const std::string& control, const std::string& target, std::optional<int> target_path) {
  OpticalElement e;
  e.kind = ElementKind::PPBS;
  e.photon = control;
  e.partner = target;
  e.path = target_path;
  return e;
}

OpticalCircuit concat(OpticalCircuit a, const OpticalCircuit& b) {
  a.elements.insert(a.elements.end(), b.elements.begin(), b.elements.end());
  a.post_selection.filters.insert(a.post_selection.filters.end(), b.post_selection.filters.begin(),
                                  b.post_selection.filters.end());
  return a;
}

// --- evaluation -----------------------------------------------------------

DensityMatrix OpticalOutput::state() const {
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw std::domain_error("post-selected output has zero weight");
  return DensityMatrix(dims, rho / tr, true);
}

OpticalOutput run_circuit(const PhotonRegister& reg, const OpticalCircuit& circuit, const DistinguishabilityModel& q) {
  q.validate();
  if (!circuit.post_selection.coincidence)
    throw std::invalid_argument("post-selection must keep the one-photon-per-arm coincidences");
  const double n0 = reg.norm();
  if (!(n0 > 0.0)) throw std::invalid_argument("photon register has zero norm");

  const Layout start{reg.dims(), reg.subsystem_labels()};
  // Operators are fixed per element and term; build them once.
  std::vector<std::array<LocalOp, 3>> ops;
  std::vector<std::size_t> ppbs_index;
  for (const auto& e : circuit.elements) {
    if (e.kind == ElementKind::PPBS) {
      ppbs_index.push_back(ops.size());
      ops.push_back({ppbs_op(reg, e, PpbsTerm::Coherent), ppbs_op(reg, e, PpbsTerm::Direct),
                     ppbs_op(reg, e, PpbsTerm::Exchange)});
    } else {
      auto op = element_op(reg, e, PpbsTerm::Coherent);
      ops.push_back({op, op, op});
    }
  }

  Layout end = start;
  std::vector<std::pair<int, Eigen::VectorXcd>> contractions;
  for (const auto& f : circuit.post_selection.filters) {
    const int sub = find_label(end, f);
    contractions.emplace_back(sub, filter_bra(f));
    end.dims.erase(end.dims.begin() + sub);
    end.labels.erase(end.labels.begin() + sub);
  }

  auto propagate = [&](const std::vector<int>& term_of_op) {
    Eigen::VectorXcd v = reg.amplitudes() / n0;
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const auto& op = ops[k][static_cast<std::size_t>(term_of_op[k])];
      v = kernels::apply_operator(start.dims, v, op.mat, op.targets);
    }
    Dims dims = start.dims;
    for (const auto& [sub, bra] : contractions) {
      v = kernels::contract(dims, v, sub, bra);
      dims.erase(dims.begin() + sub);
    }
    return v;
  };

  const double qeff = q.q * reg.source_overlap();
  const auto n = static_cast<Eigen::Index>(total_dim(end.dims));
  OpticalOutput out;
  out.dims = end.dims;
  out.labels = end.labels;
  out.rho = Eigen::MatrixXcd::Zero(n, n);

  std::vector<int> terms(ops.size(), 0);
  const Eigen::VectorXcd coherent = propagate(terms);
  if (qeff > 0.0 || ppbs_index.empty()) out.rho += (ppbs_index.empty() ? 1.0 : qeff) * coherent * coherent.adjoint();
  if (qeff >= 1.0 || ppbs_index.empty()) out.pure = coherent;

  if (qeff < 1.0 && !ppbs_index.empty()) {
    const std::size_t k = ppbs_index.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      for (std::size_t j = 0; j < k; ++j)
        terms[ppbs_index[j]] = ((mask >> j) & 1U) ? static_cast<int>(PpbsTerm::Exchange) : static_cast<int>(PpbsTerm::Direct);
      const Eigen::VectorXcd v = propagate(terms);
      out.rho += (1.0 - qeff) * v * v.adjoint();
    }
  }
  out.success_probability = out.rho.trace().real();
  return out;
}

OpticalOutput post_select(const OpticalOutput& in, const std::vector<ComponentFilter>& filters) {
  OpticalOutput out = in;
  Layout layout{in.dims, in.labels};
  for (const auto& f : filters) {
    const int sub = find_label(layout, f);
    const Eigen::VectorXcd bra = filter_bra(f);
    const Eigen::MatrixXcd half = contract_columns(layout.dims, out.rho, sub, bra);
    out.rho = contract_columns(layout.dims, half.adjoint(), sub, bra).adjoint();
    if (out.pure) *out.pure = kernels::contract(layout.dims, *out.pure, sub, bra);
    layout.dims.erase(layout.dims.begin() + sub);
    layout.labels.erase(layout.labels.begin() + sub);
  }
  out.dims = layout.dims;
  out.labels = layout.labels;
  out.success_probability = out.rho.trace().real();
  return out;
}

}  // namespace qitsim::photonics
