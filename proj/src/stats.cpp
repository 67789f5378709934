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

#include "qitsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qitsim::stats {

namespace {

constexpr char kBases[] = {'Z', 'X', 'Y'};

Eigen::Matrix2cd pauli(char p) {
  Eigen::Matrix2cd m;
  const Complex i(0.0, 1.0);
  switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument(std::string("unknown Pauli ") + p);
  }
  return m;
}

// Eigenvector of basis `b` with eigenvalue +1 (bit 0) or -1 (bit 1).
Eigen::Vector2cd eigvec(char b, int bit) {
  const double h = std::numbers::sqrt2 / 2;
  const Complex i(0.0, 1.0);
  Eigen::Vector2cd v;
  switch (b) {
    case 'Z': v << (bit ? 0.0 : 1.0), (bit ? 1.0 : 0.0); break;
    case 'X': v << h, (bit ? -h : h); break;
    case 'Y': v << h, (bit ? -i * h : i * h); break;
    default: throw std::invalid_argument(std::string("unknown basis ") + b);
  }
  return v;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

int qubits_of(const Dims& dims) {
  if (dims == Dims{4}) return 2;
  if (std::all_of(dims.begin(), dims.end(), [](int d) { return d == 2; }) && dims.size() <= 2)
    return static_cast<int>(dims.size());
  throw std::invalid_argument("fidelity plans support one or two qubits, or one ququart");
}

bool covers(const std::string& setting, const std::string& p) {
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] != 'I' && p[k] != setting[k]) return false;
  return true;
}

std::vector<std::string> all_strings(int n, const std::string& alphabet) {
  std::vector<std::string> out{""};
  for (int k = 0; k < n; ++k) {
    std::vector<std::string> next;
    for (const auto& s : out)
      for (char c : alphabet) next.push_back(s + c);
    out = std::move(next);
  }
  return out;
}

int sign_of(const std::string& p, int outcome) {
  const int n = static_cast<int>(p.size());
  int s = 1;
  for (int k = 0; k < n; ++k)
    if (p[static_cast<std::size_t>(k)] != 'I' && ((outcome >> (n - 1 - k)) & 1)) s = -s;
  return s;
}

// Estimate from per-setting tallies (counts or probabilities) in plan order.
FidelityEstimate estimate(const FidelityPlan& plan, const std::vector<std::vector<double>>& tallies, bool with_sd) {
  const double scale = 1.0 / static_cast<double>(1 << plan.num_qubits);
  std::vector<double> totals;
  for (const auto& row : tallies) {
    double t = 0.0;
    for (double x : row) t += x;
    if (!(t > 0.0)) throw std::domain_error("a fidelity setting recorded no events");
    totals.push_back(t);
  }
  std::vector<std::vector<double>> grad;
  for (const auto& row : tallies) grad.emplace_back(row.size(), 0.0);

  double f = scale;
  for (const auto& term : plan.terms) {
    const double w = scale * term.coefficient / static_cast<double>(term.settings.size());
    for (int s : term.settings) {
      const auto& row = tallies[static_cast<std::size_t>(s)];
      const double t = totals[static_cast<std::size_t>(s)];
      double e = 0.0;
      for (std::size_t o = 0; o < row.size(); ++o) e += sign_of(term.pauli, static_cast<int>(o)) * row[o] / t;
      f += w * e;
      for (std::size_t o = 0; o < row.size(); ++o)
        grad[static_cast<std::size_t>(s)][o] += w * (sign_of(term.pauli, static_cast<int>(o)) - e) / t;
    }
  }
  double var = 0.0;
  if (with_sd) {
    for (std::size_t s = 0; s < tallies.size(); ++s)
      for (std::size_t o = 0; o < tallies[s].size(); ++o) var += grad[s][o] * grad[s][o] * tallies[s][o];
  }
  return FidelityEstimate::make(f, std::sqrt(var), FidelityMethod::BasisDecomposition);
}

DensityMatrix invert(const std::vector<double>& data, const std::vector<photonics::AnalyzerSetting>& settings) {
  if (data.size() != settings.size()) throw std::invalid_argument("one datum per analyzer setting required");
  const auto m = static_cast<Eigen::Index>(settings.size());
  Eigen::MatrixXcd a(m, 16);
  Eigen::VectorXcd b(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& pi = settings[static_cast<std::size_t>(k)].projector;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(k, 4 * i + j) = std::conj(pi(i, j));
    b[k] = data[static_cast<std::size_t>(k)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  if (svd.rank() < 16) throw std::invalid_argument("analyzer settings are not informationally complete");
  const Eigen::VectorXcd x = svd.solve(b);
  Eigen::Matrix4cd rho;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rho(i, j) = x[4 * i + j];
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw std::domain_error("tomography data have no weight");
  rho /= tr;
  // Nearest physical state in Frobenius norm: shift the spectrum by a common
  // offset, clip at zero, keep unit trace.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
  std::vector<double> sorted(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  std::sort(sorted.rbegin(), sorted.rend());
  double partial = 0.0, shift = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    partial += sorted[k];
    const double t = (partial - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] > t) shift = t;
  }
  Eigen::Vector4d ev = (es.eigenvalues().array() - shift).cwiseMax(0.0);
  ev /= ev.sum();
  const Eigen::Matrix4cd phys = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix({4}, 0.5 * (phys + phys.adjoint()), true);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(fourfold_rate > 0.0) || !std::isfinite(fourfold_rate)) throw std::invalid_argument("fourfold rate must be > 0");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw std::invalid_argument("duration must be > 0");
}

CountTable sample_counts(const std::vector<SettingProbabilities>& probabilities, const ExperimentConfig& config) {
  config.validate();
  for (const auto& name : config.settings) {
    if (std::none_of(probabilities.begin(), probabilities.end(), [&](const auto& s) { return s.setting == name; }))
      throw std::invalid_argument("unknown setting " + name);
  }
  Rng rng(config.seed);
  CountTable table;
  for (const auto& s : probabilities) {
    if (!config.settings.empty() &&
        std::find(config.settings.begin(), config.settings.end(), s.setting) == config.settings.end())
      continue;
    if (s.outcomes.size() != s.probabilities.size()) throw std::invalid_argument("outcome/probability count mismatch");
    double sum = 0.0;
    for (double p : s.probabilities) {
      if (!(p >= -kIdentityTol && p <= 1.0 + kIdentityTol)) throw std::invalid_argument("probability outside [0, 1]");
      sum += p;
    }
    if (s.complete ? std::abs(sum - 1.0) > 1e-9 : sum > 1.0 + 1e-9)
      throw std::invalid_argument("probabilities of setting " + s.setting + " do not sum to 1");
    std::vector<std::int64_t> counts;
    std::vector<double> expected;
    for (double p : s.probabilities) {
      const double mean = config.expected_events() * std::max(p, 0.0);
      expected.push_back(mean);
      counts.push_back(mean > 0.0 ? std::poisson_distribution<std::int64_t>(mean)(rng) : 0);
    }
    table.settings.push_back(s.setting);
    table.outcomes.push_back(s.outcomes);
    table.counts.push_back(std::move(counts));
    table.expected.push_back(std::move(expected));
  }
  return table;
}

FidelityEstimate FidelityEstimate::make(double value, double std_dev, FidelityMethod method) {
  if (!(std_dev >= 0.0)) throw std::invalid_argument("fidelity standard deviation must be non-negative");
  return {value, std::clamp(value, 0.0, 1.0), std_dev, method};
}

FidelityPlan make_fidelity_plan(const HybridState& target, const std::vector<std::string>& allowed) {
  const int n = qubits_of(target.dims());
  const auto& psi = target.amplitudes();

  std::vector<std::string> candidates;
  if (allowed.empty()) {
    candidates = all_strings(n, std::string(kBases, 3));
  } else {
    for (const auto& s : allowed) {
      if (static_cast<int>(s.size()) != n || s.find_first_not_of("ZXY") != std::string::npos)
        throw std::invalid_argument("setting '" + s + "' is not a " + std::to_string(n) + "-letter string over Z, X, Y");
      if (std::find(candidates.begin(), candidates.end(), s) == candidates.end()) candidates.push_back(s);
    }
  }

  std::vector<PauliTerm> terms;
  for (const auto& p : all_strings(n, "IXYZ")) {
    if (p.find_first_not_of('I') == std::string::npos) continue;
    Eigen::MatrixXcd op = pauli(p[0]);
    for (std::size_t k = 1; k < p.size(); ++k) op = kron(op, pauli(p[k]));
    const double c = (psi.adjoint() * op * psi)(0, 0).real();
    if (std::abs(c) > kIdentityTol) terms.push_back({p, c, {}});
  }

  // Smallest covering subset, scanning sizes upward and masks in order.
  const int m = static_cast<int>(candidates.size());
  std::vector<int> best;
  for (int size = 0; size <= m && best.empty(); ++size) {
    std::vector<bool> pick(static_cast<std::size_t>(m), false);
    std::fill(pick.begin(), pick.begin() + size, true);
    do {
      std::vector<int> chosen;
      for (int k = 0; k < m; ++k)
        if (pick[static_cast<std::size_t>(k)]) chosen.push_back(k);
      const bool ok = std::all_of(terms.begin(), terms.end(), [&](const PauliTerm& t) {
        return std::any_of(chosen.begin(), chosen.end(),
                           [&](int k) { return covers(candidates[static_cast<std::size_t>(k)], t.pauli); });
      });
      if (ok) {
        best = chosen;
        if (best.empty()) best.push_back(-1);  // no terms at all
        break;
      }
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  if (best.empty()) throw std::invalid_argument("settings cannot decompose the target projector");

  FidelityPlan plan{target, n, {}, {}};
  for (int k : best)
    if (k >= 0) plan.settings.push_back(candidates[static_cast<std::size_t>(k)]);
  for (auto& t : terms) {
    for (std::size_t s = 0; s < plan.settings.size(); ++s)
      if (covers(plan.settings[s], t.pauli)) t.settings.push_back(static_cast<int>(s));
  }
  plan.terms = std::move(terms);
  return plan;
}

std::vector<SettingProbabilities> plan_probabilities(const FidelityPlan& plan, const DensityMatrix& rho) {
  const int n = plan.num_qubits;
  if (total_dim(rho.dims()) != (std::size_t{1} << n)) throw std::invalid_argument("state does not match the plan");
  std::vector<SettingProbabilities> out;
  for (const auto& s : plan.settings) {
    SettingProbabilities sp{s, {}, {}, true};
    for (int o = 0; o < (1 << n); ++o) {
      Eigen::MatrixXcd v = eigvec(s[0], (o >> (n - 1)) & 1);
      std::string label(1, ((o >> (n - 1)) & 1) ? '1' : '0');
      for (int k = 1; k < n; ++k) {
        const int bit = (o >> (n - 1 - k)) & 1;
        v = kron(v, eigvec(s[static_cast<std::size_t>(k)], bit));
        label += bit ? '1' : '0';
      }
      sp.outcomes.push_back(label);
      sp.probabilities.push_back(std::max(0.0, (v.adjoint() * rho.matrix() * v)(0, 0).real()));
    }
    out.push_back(std::move(sp));
  }
  return out;
}

FidelityEstimate fidelity_from_counts(const CountTable& counts, const FidelityPlan& plan) {
  std::vector<std::vector<double>> tallies;
  for (const auto& s : plan.settings) {
    const auto it = std::find(counts.settings.begin(), counts.settings.end(), s);
    if (it == counts.settings.end()) throw std::invalid_argument("count table lacks plan setting " + s);
    const auto& row = counts.counts[static_cast<std::size_t>(it - counts.settings.begin())];
    if (row.size() != (std::size_t{1} << plan.num_qubits)) throw std::invalid_argument("setting " + s + " has wrong outcome count");
    tallies.emplace_back(row.begin(), row.end());
  }
  return estimate(plan, tallies, true);
}

FidelityEstimate fidelity_from_probabilities(const std::vector<SettingProbabilities>& probabilities,
                                             const FidelityPlan& plan) {
  std::vector<std::vector<double>> tallies;
  for (const auto& s : plan.settings) {
    const auto it = std::find_if(probabilities.begin(), probabilities.end(), [&](const auto& p) { return p.setting == s; });
    if (it == probabilities.end()) throw std::invalid_argument("probabilities lack plan setting " + s);
    tallies.push_back(it->probabilities);
  }
  return estimate(plan, tallies, false);
}

// --- tomography -----------------------------------------------------------

namespace {

struct Named {
  const char* name;
  Complex x, y;
};

std::vector<Named> pol_states() {
  const double h = std::numbers::sqrt2 / 2;
  const Complex i(0.0, 1.0);
  return {{"H", 1.0, 0.0}, {"V", 0.0, 1.0}, {"D", h, h}, {"A", h, -h}, {"R", h, i * h}, {"L", h, -i * h}};
}

std::vector<Named> path_states() {
  auto v = pol_states();
  const char* names[] = {"0", "1", "+", "-", "+i", "-i"};
  for (std::size_t k = 0; k < v.size(); ++k) v[k].name = names[k];
  return v;
}

}  // namespace

std::vector<photonics::AnalyzerSetting> tomography_settings() {
  std::vector<photonics::AnalyzerSetting> out;
  for (const auto& p : pol_states())
    for (const auto& q : path_states()) out.push_back(photonics::analyzer_projector(p.x, p.y, q.x, q.y));
  return out;
}

std::vector<std::string> tomography_setting_names() {
  std::vector<std::string> out;
  for (const auto& p : pol_states())
    for (const auto& q : path_states()) out.push_back(std::string(p.name) + "," + q.name);
  return out;
}

std::vector<SettingProbabilities> tomography_probabilities(const std::vector<photonics::AnalyzerSetting>& settings,
                                                           const DensityMatrix& rho) {
  const auto names = tomography_setting_names();
  std::vector<SettingProbabilities> out;
  for (std::size_t k = 0; k < settings.size(); ++k) {
    const std::string name = settings.size() == names.size() ? names[k] : "s" + std::to_string(k);
    const double p = std::clamp(photonics::analyzer_probability(settings[k], rho), 0.0, 1.0);
    out.push_back({name, {"click"}, {p}, false});
  }
  return out;
}

DensityMatrix tomography_ququart(const CountTable& counts, const std::vector<photonics::AnalyzerSetting>& settings) {
  if (counts.counts.size() != settings.size()) throw std::invalid_argument("one count row per analyzer setting required");
  std::vector<double> data;
  for (const auto& row : counts.counts) {
    if (row.size() != 1) throw std::invalid_argument("analyzer settings record a single outcome");
    data.push_back(static_cast<double>(row[0]));
  }
  return invert(data, settings);
}

DensityMatrix tomography_ququart(const std::vector<double>& probabilities,
                                 const std::vector<photonics::AnalyzerSetting>& settings) {
  return invert(probabilities, settings);
}

// --- classical bound ------------------------------------------------------

BoundReport classical_bound_check(const std::vector<FidelityEstimate>& estimates) {
  if (estimates.empty()) throw std::invalid_argument("classical bound check needs at least one estimate");
  BoundReport r;
  r.all_above = true;
  double sum = 0.0, var = 0.0;
  for (const auto& e : estimates) {
    const double gap = e.value - kClassicalBound;
    if (e.std_dev > 0.0) {
      r.margins.push_back(gap / e.std_dev);
    } else {
      r.margins.push_back(gap == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), gap));
    }
    r.all_above = r.all_above && gap > 0.0;
    sum += e.value;
    var += e.std_dev * e.std_dev;
  }
  const auto n = static_cast<double>(estimates.size());
  r.mean = sum / n;
  r.mean_std_dev = std::sqrt(var) / n;
  return r;
}

}  // namespace qitsim::stats
