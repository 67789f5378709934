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

#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>

#include "qitsim/benchmarks.hpp"
#include "qitsim/photonics.hpp"
#include "qitsim/protocols.hpp"
#include "qitsim/stats.hpp"
#include "run_spec_schema.hpp"

namespace qitsim::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

struct Report {
  std::vector<Check> checks;
  void add(std::string name, bool pass, std::string detail = {}) {
    checks.push_back({std::move(name), pass, std::move(detail)});
  }
  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
  Json json() const {
    Json a = Json::array();
    for (const auto& c : checks) a.push_back(Json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return a;
  }
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<Complex> amplitudes(const Json& spec, const char* section, const char* key, bool required = true) {
  if (!spec.contains(section) || !spec[section].contains(key)) {
    if (required) throw UsageError(fmt::format("{}.{} is required", section, key));
    return {};
  }
  std::vector<Complex> out;
  for (const auto& x : spec[section][key]) out.push_back(io::complex_from_json(x));
  return out;
}

void expect_size(const std::vector<Complex>& v, std::size_t n, const std::string& what) {
  if (v.size() != n) throw UsageError(fmt::format("{} needs {} amplitudes, got {}", what, n, v.size()));
}

// Command-line amplitudes are accepted unnormalized, as make_state does.
std::vector<Complex> normalized(std::vector<Complex> v, const std::string& what) {
  double n = 0.0;
  for (const auto& z : v) n += std::norm(z);
  if (!(n > 0.0)) throw UsageError(what + " has zero norm");
  for (auto& z : v) z /= std::sqrt(n);
  return v;
}

HybridState state_of(Dims dims, const std::vector<Complex>& amps) {
  return make_state(std::move(dims), std::span<const Complex>(amps));
}

CompletionMode completion(const Json& spec) {
  if (spec.value("mode", "feedforward") == "feedforward") return CompletionMode::feed_forward();
  std::vector<int> kept{0};
  if (spec.contains("kept")) kept = spec["kept"].get<std::vector<int>>();
  return CompletionMode::post_select(kept);
}

std::uint64_t seed_of(const Json& spec) { return spec.value("seed", std::uint64_t{0}); }
double q_of(const Json& spec) { return spec.value("q", 1.0); }

stats::ExperimentConfig experiment_of(const Json& spec, std::uint64_t seed) {
  stats::ExperimentConfig cfg;
  cfg.seed = seed;
  if (spec.contains("experiment")) {
    cfg.fourfold_rate = spec["experiment"].value("rate", cfg.fourfold_rate);
    cfg.duration = spec["experiment"].value("duration", cfg.duration);
  }
  return cfg;
}

bool infinite_of(const Json& spec) {
  return spec.contains("experiment") && spec["experiment"].value("infinite", false);
}

photonics::Cx4Variant variant_of(const Json& section) {
  return section.value("variant", "standard") == "simplified" ? photonics::Cx4Variant::SimplifiedPreBiased
                                                              : photonics::Cx4Variant::Standard;
}

bool near_one(double f) { return std::abs(1.0 - f) <= kNumericTol; }

// --- protocol -------------------------------------------------------------

Json cmd_protocol(const Json& spec, Report& report) {
  const auto& p = spec.at("protocol");
  const auto name = p.at("name").get<std::string>();
  const auto mode = completion(spec);
  OutcomeSource outcomes(seed_of(spec));
  std::optional<ProtocolResult> result;
  std::optional<HybridState> target;

  if (name == "qit2to2") {
    const auto b = amplitudes(spec, "protocol", "state");
    expect_size(b, 2, "qit2to2 state");
    result = qit_2to2(state_of({2}, b), mode, outcomes);
    target = state_of({2}, b);
  } else if (name == "qit4to2") {
    const auto b = amplitudes(spec, "protocol", "state");
    expect_size(b, 4, "qit4to2 state");
    result = qit_4to2(state_of({4}, b), mode, outcomes);
    std::vector<Complex> t(8, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int i = 0; i < 2; ++i) t[static_cast<std::size_t>(4 * x + i)] = b[static_cast<std::size_t>(2 * x + i)];
    target = state_of({2, 4}, t);
  } else if (name == "qit2to4") {
    const auto a = amplitudes(spec, "protocol", "qubit");
    auto b = amplitudes(spec, "protocol", "qudit");
    expect_size(a, 2, "qit2to4 qubit");
    if (b.size() == 2) b.insert(b.end(), {0.0, 0.0});
    expect_size(b, 4, "qit2to4 qudit");
    result = qit_2to4(tensor(state_of({2}, a), state_of({4}, b)), mode, outcomes);
    const auto bn = state_of({4}, b);
    target = state_of({4}, {a[0] * bn[0], a[0] * bn[1], a[1] * bn[0], a[1] * bn[1]});
  } else if (name == "merge") {
    const auto a = amplitudes(spec, "protocol", "qubit");
    const auto b = amplitudes(spec, "protocol", "qudit");
    expect_size(a, 2, "merge qubit");
    const int d = p.value("d", static_cast<int>(b.size()));
    expect_size(b, static_cast<std::size_t>(d), "merge qudit");
    const auto joint = tensor(state_of({2}, a), state_of({d}, b));
    result = merge(joint, mode, outcomes);
    target = HybridState({2 * d}, joint.amplitudes(), true);
  } else if (name == "split") {
    const auto b = amplitudes(spec, "protocol", "state");
    const int d = p.value("d", static_cast<int>(b.size() / 2));
    expect_size(b, static_cast<std::size_t>(2 * d), "split state");
    result = split(state_of({2 * d}, b), mode, outcomes);
    target = state_of({2, d}, b);
  }
  const double f = state_fidelity(result->final_state.renormalized(), *target);
  report.add("fidelity", near_one(f), io::format_double(f));
  return Json{{"result", io::to_json(*result)}, {"target", io::to_json(*target)}, {"fidelity", f}};
}

// --- optical --------------------------------------------------------------

Json optical_run_json(const photonics::OpticalRun& r) {
  return Json{{"state", io::to_json(r.state)},
              {"target", io::to_json(r.target)},
              {"fidelity", r.fidelity},
              {"success_probability", r.success_probability}};
}

Json cmd_optical(const Json& spec, Report& report) {
  using namespace photonics;
  const auto& o = spec.at("optical");
  const auto run = o.at("run").get<std::string>();
  const auto variant = variant_of(o);
  const DistinguishabilityModel q{q_of(spec)};
  const bool ideal = q.q == 1.0;
  const double h = std::numbers::sqrt2 / 2;
  Json j{{"circuit", io::to_json(cx4_circuit(variant))}};

  if (run == "4to2") {
    const auto b = normalized(amplitudes(spec, "optical", "b"), "optical b");
    expect_size(b, 4, "optical b");
    const auto r = run_optical_4to2({b[0], b[1], b[2], b[3]}, q, variant);
    j["post_selection"] = io::to_json(OpticalCircuit{"", {}, {true, {{"b", Dof::Pol, Eigen::Vector2cd(1, 0)},
                                                                     {"a2", Dof::Pol, Eigen::Vector2cd(h, h)}}}})["post_selection"];
    j["run"] = optical_run_json(r);
    if (ideal) report.add("fidelity", near_one(r.fidelity), io::format_double(r.fidelity));
  } else if (run == "2to4") {
    const auto a = normalized(amplitudes(spec, "optical", "a"), "optical a");
    const auto b = normalized(amplitudes(spec, "optical", "b"), "optical b");
    expect_size(a, 2, "optical a");
    expect_size(b, 2, "optical b");
    const auto r = run_optical_2to4(a[0], a[1], b[0], b[1], q, variant);
    j["post_selection"] = io::to_json(OpticalCircuit{"", {}, {true, {{"a1", Dof::Pol, Eigen::Vector2cd(h, h)},
                                                                     {"a2", Dof::Pol, Eigen::Vector2cd(h, h)}}}})["post_selection"];
    j["run"] = optical_run_json(r);
    if (ideal) report.add("fidelity", near_one(r.fidelity), io::format_double(r.fidelity));
  } else {
    const auto a = amplitudes(spec, "optical", "a");
    const auto b = amplitudes(spec, "optical", "b");
    expect_size(a, 2, "optical a");
    expect_size(b, 4, "optical b");
    const auto logical = tensor(state_of({2}, a), state_of({4}, b));
    const auto out = optical_cx4(encode_logical(logical), variant, q);
    const auto decoded = decode_logical(out).renormalized();
    const auto ideal_out = apply(logical, controlled(gate_x4()), {0, 1});
    const double f = fidelity(decoded, ideal_out);
    j["run"] = Json{{"state", io::to_json(decoded)},
                    {"target", io::to_json(ideal_out)},
                    {"fidelity", f},
                    {"success_probability", out.success_probability}};
    if (ideal) {
      report.add("fidelity", near_one(f), io::format_double(f));
      if (variant == Cx4Variant::Standard)
        report.add("success_probability", std::abs(out.success_probability - 1.0 / 27.0) <= kIdentityTol,
                   io::format_double(out.success_probability));
    }
  }
  return j;
}

// --- hom ------------------------------------------------------------------

struct HomRow {
  double q, c0, cinf, v;
};

HomRow hom_row(double q) {
  const photonics::DistinguishabilityModel m{q};
  const double c0 = photonics::hom_coincidence(photonics::DelayRegime::Zero, m);
  const double cinf = photonics::hom_coincidence(photonics::DelayRegime::Infinite, m);
  return {q, c0, cinf, photonics::visibility(c0, cinf)};
}

std::string hom_csv(const std::vector<HomRow>& rows) {
  io::CsvTable csv({"q", "c_zero", "c_infinity", "visibility", "model_visibility"});
  for (const auto& r : rows)
    csv.row({io::format_double(r.q), io::format_double(r.c0), io::format_double(r.cinf), io::format_double(r.v),
             io::format_double(0.8 * r.q)});
  return csv.str();
}

std::pair<Json, std::string> cmd_hom_scan(const Json& spec, Report& report) {
  std::vector<double> qs{0.0, 0.5, 1.0};
  if (spec.contains("hom") && spec["hom"].contains("q_values")) qs = spec["hom"]["q_values"].get<std::vector<double>>();
  std::vector<HomRow> rows;
  double worst = 0.0;
  for (double q : qs) {
    rows.push_back(hom_row(q));
    worst = std::max(worst, std::abs(rows.back().v - 0.8 * q));
  }
  report.add("visibility_linear_in_q", worst <= kIdentityTol, io::format_double(worst));
  Json j = Json::array();
  for (const auto& r : rows) j.push_back(Json{{"q", r.q}, {"c_zero", r.c0}, {"c_infinity", r.cinf}, {"visibility", r.v}});
  return {j, hom_csv(rows)};
}

// --- tomography -----------------------------------------------------------

std::pair<Json, std::string> cmd_tomo(const Json& spec, Report& report) {
  const auto amps = amplitudes(spec, "tomo", "state");
  expect_size(amps, 4, "tomo state");
  const auto psi = state_of({4}, amps);
  const auto settings = stats::tomography_settings();
  const auto probs = stats::tomography_probabilities(settings, DensityMatrix::pure(psi));
  std::string csv;
  std::optional<DensityMatrix> rho;
  const bool infinite = infinite_of(spec);
  if (infinite) {
    std::vector<double> p;
    io::CsvTable t({"setting", "probability"});
    for (const auto& s : probs) {
      p.push_back(s.probabilities[0]);
      t.row({s.setting, io::format_double(s.probabilities[0])});
    }
    rho = stats::tomography_ququart(p, settings);
    csv = t.str();
  } else {
    const auto counts = stats::sample_counts(probs, experiment_of(spec, seed_of(spec)));
    rho = stats::tomography_ququart(counts, settings);
    csv = io::counts_csv(counts);
  }
  const double f = fidelity(*rho, psi);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho->matrix());
  const bool physical = es.eigenvalues().minCoeff() >= -kNumericTol && std::abs(rho->trace() - 1.0) <= kNumericTol &&
                        (rho->matrix() - rho->matrix().adjoint()).cwiseAbs().maxCoeff() <= kNumericTol;
  report.add("physical", physical);
  if (infinite) report.add("fidelity", near_one(f), io::format_double(f));
  return {Json{{"settings", settings.size()}, {"rho", io::to_json(*rho)}, {"fidelity", f}}, csv};
}

// --- synthesis ------------------------------------------------------------

GateMatrix named_gate(const std::string& gate, int n, Rng& rng) {
  const int dim = 1 << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim);
  auto need = [&](int k) {
    if (n != k) throw UsageError(fmt::format("gate {} acts on {} qubits, not {}", gate, k, n));
  };
  if (gate == "cz") {
    need(2);
    m(3, 3) = -1.0;
  } else if (gate == "ccz") {
    need(3);
    m(7, 7) = -1.0;
  } else if (gate == "cccz") {
    need(4);
    m(15, 15) = -1.0;
  } else if (gate == "cnot" || gate == "toffoli") {
    need(gate == "cnot" ? 2 : 3);
    m(dim - 2, dim - 2) = m(dim - 1, dim - 1) = 0.0;
    m(dim - 2, dim - 1) = m(dim - 1, dim - 2) = 1.0;
  } else {
    m = haar_random_unitary(dim, rng);
  }
  Dims dims(static_cast<std::size_t>(n), 2);
  return GateMatrix::make_unitary(dims, m, gate);
}

Json cmd_synthesize(const Json& spec, Report& report) {
  const auto& s = spec.at("synthesize");
  const int n = s.at("n").get<int>();
  const auto gate = s.at("gate").get<std::string>();
  const auto order = s.value("order", "first-least") == "first-most" ? BitOrder::FirstQubitMost : BitOrder::FirstQubitLeast;
  Rng rng(seed_of(spec));
  const auto u = named_gate(gate, n, rng);
  const auto synth = synthesize_gate(u, n, order);
  Json j{{"gate", gate}, {"n", n}, {"order", s.value("order", "first-least")}, {"steps", synth.steps()},
         {"direct_targets", synth.direct_targets()}};
  if (s.value("check", true)) {
    const int trials = s.value("trials", 20);
    const auto mode = completion(spec);
    OutcomeSource outcomes(seed_of(spec) + 1);
    double worst = 0.0;
    Dims dims(static_cast<std::size_t>(n), 2);
    for (int t = 0; t < trials; ++t) {
      const auto input = haar_random_state(dims, rng);
      const auto direct = apply(input, u, synth.direct_targets());
      const auto via = synth.run(input, mode, outcomes);
      worst = std::max(worst, 1.0 - state_fidelity(via.final_state.renormalized(), direct));
    }
    j["trials"] = trials;
    j["max_fidelity_deviation"] = worst;
    report.add("oracle_equivalence", worst <= kNumericTol, io::format_double(worst));
  }
  return j;
}

// --- benchmark suite---------------------------------------------------------

struct SuiteRow {
  std::string name;
  std::vector<std::string> settings;
  stats::FidelityEstimate estimate;
  double model_fidelity;
  double success;
  benchmarks::Measured measured;
};

SuiteRow suite_row(const std::string& name, const photonics::OpticalRun& run, benchmarks::Measured measured,
                   bool infinite, const stats::ExperimentConfig& cfg) {
  const auto plan = stats::make_fidelity_plan(run.target);
  const auto probs = stats::plan_probabilities(plan, run.state);
  const auto est = infinite ? stats::fidelity_from_probabilities(probs, plan)
                            : stats::fidelity_from_counts(stats::sample_counts(probs, cfg), plan);
  return {name, plan.settings, est, run.fidelity, run.success_probability, measured};
}

std::pair<Json, std::string> transfer_suite(const std::vector<SuiteRow>& rows, benchmarks::Measured average,
                                            bool infinite, Report& report) {
  io::CsvTable csv({"state", "settings", "fidelity", "std_dev", "fidelity_clamped", "model_fidelity",
                    "success_probability", "experiment_fidelity", "experiment_std_dev", "reference_only"});
  std::vector<stats::FidelityEstimate> sim, measured;
  Json j = Json::array();
  double worst = 0.0;
  for (const auto& r : rows) {
    std::string settings;
    for (const auto& s : r.settings) settings += (settings.empty() ? "" : " ") + s;
    csv.row({r.name, settings, io::format_double(r.estimate.value), io::format_double(r.estimate.std_dev),
             io::format_double(r.estimate.clamped), io::format_double(r.model_fidelity), io::format_double(r.success),
             io::format_double(r.measured.fidelity), io::format_double(r.measured.std_dev), "true"});
    sim.push_back(r.estimate);
    measured.push_back(stats::FidelityEstimate::make(r.measured.fidelity, r.measured.std_dev, {}));
    worst = std::max(worst, std::abs(r.estimate.value - r.model_fidelity));
    j.push_back(Json{{"state", r.name},
                     {"settings", r.settings},
                     {"estimate", io::to_json(r.estimate)},
                     {"model_fidelity", r.model_fidelity},
                     {"success_probability", r.success},
                     {"experiment", Json{{"fidelity", r.measured.fidelity}, {"std_dev", r.measured.std_dev},
                                         {"reference_only", true}}}});
  }
  if (infinite) report.add("estimator_matches_model", worst <= kNumericTol, io::format_double(worst));
  const Json summary{{"rows", j},
                     {"classical_bound", io::to_json(stats::classical_bound_check(sim))},
                     {"experiment_classical_bound", io::to_json(stats::classical_bound_check(measured))},
                     {"experiment_reported_average", Json{{"fidelity", average.fidelity}, {"std_dev", average.std_dev},
                                                          {"reference_only", true}}}};
  return {summary, csv.str()};
}

std::pair<Json, std::string> cmd_paper_suite(const Json& spec, Report& report) {
  const auto& s = spec.at("paper_suite");
  const auto which = s.at("which").get<std::string>();
  const auto variant = variant_of(s);
  const photonics::DistinguishabilityModel q{q_of(spec)};
  const bool infinite = infinite_of(spec);
  const auto seed = seed_of(spec);

  if (which == "fig4" || which == "fig5") {
    std::vector<SuiteRow> rows;
    std::uint64_t k = 0;
    if (which == "fig4") {
      for (const auto& in : benchmarks::inputs_4to2())
        rows.push_back(suite_row(in.name, photonics::run_optical_4to2(in.b, q, variant), in.measured, infinite,
                                 experiment_of(spec, seed + k++)));
      return transfer_suite(rows, benchmarks::kMeasuredAverage4to2, infinite, report);
    }
    for (const auto& in : benchmarks::inputs_2to4())
      rows.push_back(suite_row(in.name, photonics::run_optical_2to4(in.a[0], in.a[1], in.b[0], in.b[1], q, variant),
                               in.measured, infinite, experiment_of(spec, seed + k++)));
    return transfer_suite(rows, benchmarks::kMeasuredAverage2to4, infinite, report);
  }

  if (which == "hom") {
    std::vector<HomRow> rows{hom_row(1.0)};
    if (q.q != 1.0 && q.q != 0.0) rows.push_back(hom_row(q.q));
    rows.push_back(hom_row(0.0));
    report.add("ideal_visibility", std::abs(rows.front().v - 0.8) <= kIdentityTol, io::format_double(rows.front().v));
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, std::abs(r.v - 0.8 * r.q));
    report.add("visibility_linear_in_q", worst <= kIdentityTol, io::format_double(worst));
    Json j{{"rows", Json::array()},
           {"experiment", Json{{"visibility_ideal", benchmarks::kHomVisibilityIdeal},
                               {"visibility_measured", benchmarks::kHomVisibilityMeasured},
                               {"overlap", benchmarks::kHomOverlap},
                               {"reference_only", true}}}};
    for (const auto& r : rows)
      j["rows"].push_back(Json{{"q", r.q}, {"c_zero", r.c0}, {"c_infinity", r.cinf}, {"visibility", r.v}});
    return {j, hom_csv(rows)};
  }

  // cx4: success probability and logical fidelity over random logical inputs.
  Rng rng(seed);
  io::CsvTable csv({"variant", "input", "success_probability", "fidelity"});
  Json j = Json::array();
  for (auto v : {photonics::Cx4Variant::Standard, photonics::Cx4Variant::SimplifiedPreBiased}) {
    const char* vname = v == photonics::Cx4Variant::Standard ? "standard" : "simplified";
    double smin = 1.0, smax = 0.0, fmin = 1.0;
    for (int t = 0; t < 20; ++t) {
      const auto logical = haar_random_state({2, 4}, rng);
      const auto out = photonics::optical_cx4(photonics::encode_logical(logical), v, q);
      const double f = fidelity(photonics::decode_logical(out).renormalized(),
                                apply(logical, controlled(gate_x4()), {0, 1}));
      smin = std::min(smin, out.success_probability);
      smax = std::max(smax, out.success_probability);
      fmin = std::min(fmin, f);
      csv.row({vname, std::to_string(t), io::format_double(out.success_probability), io::format_double(f)});
    }
    j.push_back(Json{{"variant", vname}, {"success_min", smin}, {"success_max", smax}, {"fidelity_min", fmin}});
    if (q.q == 1.0) {
      report.add(std::string(vname) + "_fidelity", near_one(fmin), io::format_double(fmin));
      if (v == photonics::Cx4Variant::Standard)
        report.add("standard_success_1_27",
                   std::abs(smin - 1.0 / 27.0) <= kIdentityTol && std::abs(smax - 1.0 / 27.0) <= kIdentityTol,
                   io::format_double(smin));
    }
  }
  return {Json{{"variants", j}, {"success_reference", 1.0 / 27.0}}, csv.str()};
}

// --- argument plumbing ----------------------------------------------------

Json amplitude_list(const std::string& text) {
  Json a = Json::array();
  for (const auto& z : parse_complex_list(text)) {
    if (z.imag() == 0.0) {
      a.push_back(z.real());
    } else {
      a.push_back(io::complex_to_json(z));
    }
  }
  return a;
}

std::string utc_timestamp() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now())));
}

}  // namespace

Complex parse_complex(const std::string& raw) {
  std::string t;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw std::invalid_argument("empty amplitude");
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw std::invalid_argument("bad amplitude '" + raw + "'");
    return x;
  };
  if (t.back() != 'i' && t.back() != 'j') return {number(t), 0.0};
  t.pop_back();
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t cut = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  const std::string re = cut == std::string::npos ? "" : t.substr(0, cut);
  std::string im = cut == std::string::npos ? t : t.substr(cut);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  return {re.empty() ? 0.0 : number(re), number(im)};
}

std::vector<Complex> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(',', start);
    out.push_back(parse_complex(text.substr(start, end == std::string::npos ? std::string::npos : end - start)));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

const Json& run_spec_schema() {
  static const Json schema = Json::parse(kRunSpecSchema);
  return schema;
}

int execute(const Json& spec, std::ostream& out, std::ostream& err) {
  const auto errors = io::validate_schema(spec, run_spec_schema());
  if (!errors.empty()) {
    for (const auto& e : errors) err << "schema: " << e << "\n";
    return kUsageError;
  }
  const auto command = spec.at("command").get<std::string>();
  const std::string section = command == "paper-suite" ? "paper_suite" : command == "hom-scan" ? "hom" : command;
  if (command != "hom-scan" && !spec.contains(section)) {
    err << "schema: missing \"" << section << "\" section for command " << command << "\n";
    return kUsageError;
  }

  fs::path dir;
  if (spec.contains("out")) {
    dir = spec["out"].get<std::string>();
  } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
    dir = env;
  } else {
    dir = "qitsim-out";
  }

  Report report;
  Json body;
  std::string csv, stem;
  try {
    if (command == "protocol") {
      body = cmd_protocol(spec, report);
      stem = "protocol";
    } else if (command == "optical") {
      body = cmd_optical(spec, report);
      stem = "optical";
    } else if (command == "hom-scan") {
      std::tie(body, csv) = cmd_hom_scan(spec, report);
      stem = "hom_scan";
    } else if (command == "tomo") {
      std::tie(body, csv) = cmd_tomo(spec, report);
      stem = "tomo";
    } else if (command == "synthesize") {
      body = cmd_synthesize(spec, report);
      stem = "synthesize";
    } else {
      std::tie(body, csv) = cmd_paper_suite(spec, report);
      stem = spec["paper_suite"]["which"].get<std::string>();
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  fs::create_directories(dir);
  // The output location is not part of the result; leaving it out keeps
  // runs into different directories byte-identical.
  Json recorded = spec;
  recorded.erase("out");
  const Json primary{{"spec", recorded}, {"checks", report.json()}, {"ok", report.ok()}, {"output", body}};
  write_file(dir / (stem + ".json"), dump(primary));
  if (!csv.empty()) write_file(dir / (stem + ".csv"), csv);
  write_file(dir / "metadata.json",
             dump(Json{{"tool", "qitsim"}, {"version", kVersion}, {"command", command}, {"timestamp", utc_timestamp()}}));

  for (const auto& c : report.checks)
    out << fmt::format("{} {}{}\n", c.pass ? "PASS" : "FAIL", c.name, c.detail.empty() ? "" : " (" + c.detail + ")");
  out << fmt::format("wrote {}\n", (dir / (stem + ".json")).string());
  return report.ok() ? kOk : kCheckFailed;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qitsim: quantum information transfer simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config, out_dir, mode, kept;
  std::uint64_t seed = 0;
  double q = 1.0;
  app.add_option("--config", config, "JSON run specification; flags override it")->check(CLI::ExistingFile);
  auto* o_seed = app.add_option("--seed", seed, "RNG seed");
  auto* o_q = app.add_option("--q", q, "photon mode-overlap weight in [0, 1]");
  auto* o_mode = app.add_option("--mode", mode, "feedforward or postselect")->check(CLI::IsMember({"feedforward", "postselect"}));
  auto* o_kept = app.add_option("--kept", kept, "post-selected outcome labels, comma separated");
  auto* o_out = app.add_option("--out", out_dir, std::string("output directory (default $") + kOutDirEnv + " or ./qitsim-out)");

  // protocol
  auto* protocol = app.add_subcommand("protocol", "run a transfer protocol on explicit amplitudes");
  std::string p_name, p_state, p_qubit, p_qudit;
  int p_d = 0;
  protocol->add_option("name", p_name, "qit2to2 | qit4to2 | qit2to4 | merge | split")->required();
  auto* o_pstate = protocol->add_option("--state", p_state, "amplitudes, e.g. 0.5,0.5,0.5,0.5 or 1,0.5i");
  auto* o_pqubit = protocol->add_option("--qubit", p_qubit, "qubit amplitudes");
  auto* o_pqudit = protocol->add_option("--qudit", p_qudit, "qudit amplitudes");
  auto* o_pd = protocol->add_option("--d", p_d, "qudit dimension d");

  // optical
  auto* optical = app.add_subcommand("optical", "simulate the photonic experiment");
  std::string op_run = "4to2", op_a, op_b, op_variant;
  auto* o_orun = optical->add_option("--run", op_run, "4to2 | 2to4 | cx4");
  auto* o_oa = optical->add_option("--a", op_a, "system A amplitudes (eps, zeta)");
  auto* o_ob = optical->add_option("--b", op_b, "photon b amplitudes");
  auto* o_ovar = optical->add_option("--variant", op_variant, "standard | simplified");

  // hom-scan
  auto* hom = app.add_subcommand("hom-scan", "HOM coincidences and visibility over q");
  std::string h_qs;
  auto* o_hq = hom->add_option("--q-values", h_qs, "comma separated q values");

  // tomo
  auto* tomo = app.add_subcommand("tomo", "ququart tomography with the 36 analyzer settings");
  std::string t_state;
  bool infinite = false;
  double rate = 0.0, duration = 0.0;
  auto* o_tstate = tomo->add_option("--state", t_state, "ququart amplitudes");

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "multi-qubit gate through one qudit");
  int s_n = 0, s_trials = 0;
  std::string s_gate, s_order;
  bool s_check = false;
  auto* o_sn = synth->add_option("--n", s_n, "number of qubits (2-4)");
  auto* o_sgate = synth->add_option("--gate", s_gate, "cz | cnot | ccz | toffoli | cccz | random");
  auto* o_sorder = synth->add_option("--order", s_order, "first-least | first-most");
  auto* o_scheck = synth->add_flag("--check", s_check, "compare against direct application");
  auto* o_strials = synth->add_option("--trials", s_trials, "random inputs for --check");

  // paper-suite
  auto* suite = app.add_subcommand("paper-suite", "reproduce the experiment tables");
  std::string ps_which, ps_variant;
  suite->add_option("which", ps_which, "fig4 | fig5 | hom | cx4")->required();
  auto* o_psvar = suite->add_option("--variant", ps_variant, "standard | simplified");

  // run (config only) and schema
  auto* runcfg = app.add_subcommand("run", "execute a --config file as is");
  auto* schema = app.add_subcommand("schema", "print the RunSpec JSON schema");

  std::vector<CLI::Option*> exp_opts;
  for (auto* sc : {tomo, suite}) {
    exp_opts.push_back(sc->add_flag("--infinite", infinite, "exact probabilities instead of sampled counts"));
    exp_opts.push_back(sc->add_option("--rate", rate, "fourfold event rate (Hz)"));
    exp_opts.push_back(sc->add_option("--duration", duration, "collection time per setting (s)"));
  }

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  if (schema->parsed()) {
    out << run_spec_schema().dump(2) << "\n";
    return kOk;
  }

  try {
    Json spec = Json::object();
    if (!config.empty()) {
      std::ifstream f(config);
      spec = Json::parse(f);
    }
    if (!runcfg->parsed()) {
      spec["schema_version"] = 1;
      spec["command"] = app.get_subcommands().front()->get_name();
    }
    if (o_seed->count()) spec["seed"] = seed;
    if (o_q->count()) spec["q"] = q;
    if (o_mode->count()) spec["mode"] = mode;
    if (o_kept->count()) {
      Json k = Json::array();
      for (const auto& z : parse_complex_list(kept)) k.push_back(static_cast<int>(z.real()));
      spec["kept"] = k;
    }
    if (o_out->count()) spec["out"] = out_dir;

    if (protocol->parsed()) {
      spec["protocol"]["name"] = p_name;
      if (o_pstate->count()) spec["protocol"]["state"] = amplitude_list(p_state);
      if (o_pqubit->count()) spec["protocol"]["qubit"] = amplitude_list(p_qubit);
      if (o_pqudit->count()) spec["protocol"]["qudit"] = amplitude_list(p_qudit);
      if (o_pd->count()) spec["protocol"]["d"] = p_d;
    }
    if (optical->parsed()) {
      if (o_orun->count() || !spec.contains("optical")) spec["optical"]["run"] = op_run;
      if (o_oa->count()) spec["optical"]["a"] = amplitude_list(op_a);
      if (o_ob->count()) spec["optical"]["b"] = amplitude_list(op_b);
      if (o_ovar->count()) spec["optical"]["variant"] = op_variant;
    }
    if (hom->parsed() && o_hq->count()) {
      Json a = Json::array();
      for (const auto& z : parse_complex_list(h_qs)) a.push_back(z.real());
      spec["hom"]["q_values"] = a;
    }
    if (tomo->parsed() && o_tstate->count()) spec["tomo"]["state"] = amplitude_list(t_state);
    if (synth->parsed()) {
      if (o_sn->count()) spec["synthesize"]["n"] = s_n;
      if (o_sgate->count()) spec["synthesize"]["gate"] = s_gate;
      if (o_sorder->count()) spec["synthesize"]["order"] = s_order;
      if (o_scheck->count()) spec["synthesize"]["check"] = s_check;
      if (o_strials->count()) spec["synthesize"]["trials"] = s_trials;
    }
    if (suite->parsed()) {
      spec["paper_suite"]["which"] = ps_which;
      if (o_psvar->count()) spec["paper_suite"]["variant"] = ps_variant;
    }
    for (auto* opt : exp_opts) {
      if (!opt->count()) continue;
      const auto name = opt->get_name();
      if (name == "--infinite") spec["experiment"]["infinite"] = infinite;
      if (name == "--rate") spec["experiment"]["rate"] = rate;
      if (name == "--duration") spec["experiment"]["duration"] = duration;
    }
    return execute(spec, out, err);
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace qitsim::cli
