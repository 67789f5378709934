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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qitsim/hilbert.hpp"
#include "qitsim/photonics.hpp"
#include "qitsim/protocols.hpp"
#include "qitsim/stats.hpp"

/// JSON and CSV forms of simulator objects. Complex numbers are [re, im]
/// pairs; angles in circuit descriptions are degrees.
namespace qitsim::io {

using Json = nlohmann::ordered_json;

/// 17 significant digits.
std::string format_double(double x);

Json complex_to_json(Complex z);
/// Accepts a number or an [re, im] pair.
Complex complex_from_json(const Json& j);

Json to_json(const HybridState& s);
Json to_json(const DensityMatrix& rho);
Json to_json(const ProtocolResult& r);
Json to_json(const stats::FidelityEstimate& e);
Json to_json(const stats::CountTable& t);
Json to_json(const stats::BoundReport& r);
Json to_json(const photonics::OpticalCircuit& c);

photonics::OpticalCircuit circuit_from_json(const Json& j);

/// One row per setting/outcome: setting,outcome,count,expected.
std::string counts_csv(const stats::CountTable& t);

/// Row-oriented CSV writer; numbers are written with format_double.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(std::vector<std::string> cells);
  std::string str() const;
  static std::string cell(double x) { return format_double(x); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Validates `instance` against a JSON Schema subset: type, enum, const,
/// minimum, maximum, exclusiveMinimum, properties, required,
/// additionalProperties (boolean), items, minItems, maxItems, anyOf and
/// local $ref ("#/...").
/// Returns one message per violation, prefixed with its JSON pointer.
std::vector<std::string> validate_schema(const Json& instance, const Json& schema);

}  // namespace qitsim::io
