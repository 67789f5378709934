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

#include "qitsim/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace qitsim::io {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

const char* kind_name(photonics::ElementKind k) {
  using photonics::ElementKind;
  switch (k) {
    case ElementKind::HWP: return "HWP";
    case ElementKind::QWP: return "QWP";
    case ElementKind::BD: return "BD";
    case ElementKind::PPBS: return "PPBS";
    case ElementKind::Loss: return "Loss";
    case ElementKind::PhaseShift: return "PhaseShift";
  }
  return "?";
}

photonics::ElementKind kind_from(const std::string& s) {
  using photonics::ElementKind;
  for (auto k : {ElementKind::HWP, ElementKind::QWP, ElementKind::BD, ElementKind::PPBS, ElementKind::Loss,
                 ElementKind::PhaseShift})
    if (s == kind_name(k)) return k;
  throw std::invalid_argument("unknown element kind " + s);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string type_of(const Json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "boolean";
  if (j.is_number_integer() || j.is_number_unsigned()) return "integer";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  return "object";
}

bool type_matches(const Json& j, const std::string& t) {
  const auto actual = type_of(j);
  if (t == "number") return actual == "number" || actual == "integer";
  if (t == "integer" && actual == "number") {
    const double x = j.get<double>();
    return x == static_cast<double>(static_cast<long long>(x));
  }
  return actual == t;
}

void validate_at(const Json& inst, const Json& schema, const Json& root, const std::string& ptr,
                 std::vector<std::string>& errs) {
  const std::string where = ptr.empty() ? "/" : ptr;
  if (schema.contains("$ref")) {
    const auto ref = schema["$ref"].get<std::string>();
    if (ref.rfind("#/", 0) != 0) throw std::invalid_argument("only local schema references are supported: " + ref);
    validate_at(inst, root.at(Json::json_pointer(ref.substr(1))), root, ptr, errs);
    return;
  }
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(inst, t.get<std::string>());
    } else {
      for (const auto& x : t) ok = ok || type_matches(inst, x.get<std::string>());
    }
    if (!ok) {
      errs.push_back(where + ": expected type " + t.dump() + ", got " + type_of(inst));
      return;
    }
  }
  if (schema.contains("const") && inst != schema["const"]) errs.push_back(where + ": must equal " + schema["const"].dump());
  if (schema.contains("enum")) {
    const auto& e = schema["enum"];
    if (std::find(e.begin(), e.end(), inst) == e.end()) errs.push_back(where + ": must be one of " + e.dump());
  }
  if (inst.is_number()) {
    const double x = inst.get<double>();
    if (schema.contains("minimum") && x < schema["minimum"].get<double>())
      errs.push_back(where + ": below minimum " + schema["minimum"].dump());
    if (schema.contains("maximum") && x > schema["maximum"].get<double>())
      errs.push_back(where + ": above maximum " + schema["maximum"].dump());
    if (schema.contains("exclusiveMinimum") && x <= schema["exclusiveMinimum"].get<double>())
      errs.push_back(where + ": must exceed " + schema["exclusiveMinimum"].dump());
  }
  if (inst.is_array()) {
    if (schema.contains("minItems") && inst.size() < schema["minItems"].get<std::size_t>())
      errs.push_back(where + ": fewer than " + schema["minItems"].dump() + " items");
    if (schema.contains("maxItems") && inst.size() > schema["maxItems"].get<std::size_t>())
      errs.push_back(where + ": more than " + schema["maxItems"].dump() + " items");
    if (schema.contains("items")) {
      for (std::size_t k = 0; k < inst.size(); ++k) validate_at(inst[k], schema["items"], root, ptr + "/" + std::to_string(k), errs);
    }
  }
  if (inst.is_object()) {
    if (schema.contains("required")) {
      for (const auto& r : schema["required"])
        if (!inst.contains(r.get<std::string>())) errs.push_back(where + ": missing required property " + r.dump());
    }
    const bool closed = schema.contains("additionalProperties") && schema["additionalProperties"] == false;
    for (const auto& [key, value] : inst.items()) {
      if (schema.contains("properties") && schema["properties"].contains(key)) {
        validate_at(value, schema["properties"][key], root, ptr + "/" + key, errs);
      } else if (closed) {
        errs.push_back(where + ": unexpected property \"" + key + "\"");
      }
    }
  }
  if (schema.contains("anyOf")) {
    bool any = false;
    for (const auto& alt : schema["anyOf"]) {
      std::vector<std::string> sub;
      validate_at(inst, alt, root, ptr, sub);
      if (sub.empty()) {
        any = true;
        break;
      }
    }
    if (!any) errs.push_back(where + ": matches none of the allowed forms");
  }
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw std::invalid_argument("complex value must be a number or an [re, im] pair");
}

Json to_json(const HybridState& s) {
  Json amps = Json::array();
  for (std::size_t i = 0; i < s.size(); ++i) amps.push_back(complex_to_json(s[i]));
  return Json{{"dims", s.dims()}, {"normalized", s.normalized()}, {"amplitudes", amps}};
}

Json to_json(const DensityMatrix& rho) {
  Json rows = Json::array();
  const auto& m = rho.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return Json{{"dims", rho.dims()}, {"trace", rho.trace()}, {"matrix", rows}};
}

Json to_json(const ProtocolResult& r) {
  Json log = Json::array();
  for (const auto& m : r.outcome_log) log.push_back(Json{{"outcome", m.outcome}, {"probability", m.probability}});
  Json corr = Json::array();
  for (const auto& c : r.corrections_applied) corr.push_back(Json{{"gate", c.gate}, {"subsystem", c.subsystem}});
  return Json{{"protocol", r.protocol},
              {"final_state", to_json(r.final_state)},
              {"outcome_log", log},
              {"corrections_applied", corr},
              {"success_probability", r.success_probability}};
}

Json to_json(const stats::FidelityEstimate& e) {
  return Json{{"value", e.value},
              {"clamped", e.clamped},
              {"std_dev", e.std_dev},
              {"method", e.method == stats::FidelityMethod::Tomography ? "tomography" : "basis_decomposition"}};
}

Json to_json(const stats::CountTable& t) {
  Json rows = Json::array();
  for (std::size_t s = 0; s < t.settings.size(); ++s) {
    for (std::size_t o = 0; o < t.counts[s].size(); ++o)
      rows.push_back(Json{{"setting", t.settings[s]},
                          {"outcome", t.outcomes[s][o]},
                          {"count", t.counts[s][o]},
                          {"expected", t.expected[s][o]}});
  }
  return rows;
}

Json to_json(const stats::BoundReport& r) {
  Json margins = Json::array();
  for (double m : r.margins) {
    if (std::isfinite(m)) {
      margins.push_back(m);
    } else {
      margins.push_back(m > 0 ? "inf" : "-inf");
    }
  }
  return Json{{"mean", r.mean}, {"mean_std_dev", r.mean_std_dev}, {"all_above", r.all_above}, {"margins", margins}};
}

Json to_json(const photonics::OpticalCircuit& c) {
  using photonics::ElementKind;
  Json elements = Json::array();
  for (const auto& e : c.elements) {
    Json j{{"kind", kind_name(e.kind)}, {"photon", e.photon}};
    if (e.path) j["path"] = *e.path;
    if (!e.label.empty()) j["label"] = e.label;
    switch (e.kind) {
      case ElementKind::HWP:
      case ElementKind::QWP: j["angle_deg"] = e.angle * kDeg; break;
      case ElementKind::PhaseShift: j["phase_deg"] = e.angle * kDeg; break;
      case ElementKind::Loss: j["v_amplitude"] = e.v_amplitude; break;
      case ElementKind::BD: j["routing"] = Json{{"H", e.routing.to[0]}, {"V", e.routing.to[1]}}; break;
      case ElementKind::PPBS: j["partner"] = e.partner; break;
    }
    elements.push_back(j);
  }
  Json filters = Json::array();
  for (const auto& f : c.post_selection.filters)
    filters.push_back(Json{{"photon", f.photon},
                           {"dof", f.dof == photonics::Dof::Pol ? "pol" : "path"},
                           {"keep", Json::array({complex_to_json(f.keep[0]), complex_to_json(f.keep[1])})}});
  return Json{{"name", c.name},
              {"elements", elements},
              {"post_selection", Json{{"coincidence", c.post_selection.coincidence}, {"filters", filters}}}};
}

photonics::OpticalCircuit circuit_from_json(const Json& j) {
  using photonics::ElementKind;
  photonics::OpticalCircuit c;
  c.name = j.value("name", "");
  for (const auto& e : j.at("elements")) {
    photonics::OpticalElement el;
    el.kind = kind_from(e.at("kind").get<std::string>());
    el.photon = e.at("photon").get<std::string>();
    if (e.contains("path")) el.path = e["path"].get<int>();
    el.label = e.value("label", "");
    switch (el.kind) {
      case ElementKind::HWP:
      case ElementKind::QWP: el.angle = e.at("angle_deg").get<double>() / kDeg; break;
      case ElementKind::PhaseShift: el.angle = e.at("phase_deg").get<double>() / kDeg; break;
      case ElementKind::Loss: el.v_amplitude = e.at("v_amplitude").get<double>(); break;
      case ElementKind::BD:
        el.routing.to[0] = e.at("routing").at("H").get<std::array<int, 2>>();
        el.routing.to[1] = e.at("routing").at("V").get<std::array<int, 2>>();
        break;
      case ElementKind::PPBS: el.partner = e.at("partner").get<std::string>(); break;
    }
    c.elements.push_back(std::move(el));
  }
  if (j.contains("post_selection")) {
    const auto& ps = j["post_selection"];
    c.post_selection.coincidence = ps.value("coincidence", true);
    for (const auto& f : ps.value("filters", Json::array())) {
      photonics::ComponentFilter cf;
      cf.photon = f.at("photon").get<std::string>();
      const auto dof = f.at("dof").get<std::string>();
      if (dof != "pol" && dof != "path") throw std::invalid_argument("filter dof must be pol or path");
      cf.dof = dof == "pol" ? photonics::Dof::Pol : photonics::Dof::Path;
      cf.keep << complex_from_json(f.at("keep").at(0)), complex_from_json(f.at("keep").at(1));
      c.post_selection.filters.push_back(cf);
    }
  }
  return c;
}

std::string counts_csv(const stats::CountTable& t) {
  CsvTable csv({"setting", "outcome", "count", "expected"});
  for (std::size_t s = 0; s < t.settings.size(); ++s) {
    for (std::size_t o = 0; o < t.counts[s].size(); ++o)
      csv.row({t.settings[s], t.outcomes[s][o], std::to_string(t.counts[s][o]), format_double(t.expected[s][o])});
  }
  return csv.str();
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::invalid_argument("CSV row width does not match header");
  rows_.push_back(std::move(cells));
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += csv_escape(cells[k]);
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

std::vector<std::string> validate_schema(const Json& instance, const Json& schema) {
  std::vector<std::string> errs;
  validate_at(instance, schema, schema, "", errs);
  return errs;
}

}  // namespace qitsim::io
