// Copyright 2026 The weakval Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON interchange. Complex numbers are [re, im] pairs (a bare number is
// read as a real value); matrices are row-major nested arrays.

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "weakval/hilbert.hpp"
#include "weakval/meter.hpp"
#include "weakval/weakvalue.hpp"

namespace weakval::io {

using json = nlohmann::ordered_json;

json encode(cplx z);
json encode(const Vector& v);
json encode(const Matrix& m);
json encode(const State& s);
json encode(const Observable& A);
json encode(const WeakValueReport& r);
json encode(const PhaseAnalysis<double>& p);
json encode(const BoundsReport& b);
json encode(const IdentityResolution<double>& r);
json encode(const TradeoffResult<double>& t);
json encode(const PointerResult& p);
json encode(const ResidualCheck<double>& c);
json encode(const ConvergenceReport<double>& c);
json encode(const MeterConfig& cfg);

/// `path` names the field for diagnostics, e.g. "psi[1]".
cplx decode_complex(const json& j, const std::string& path);
Vector decode_vector(const json& j, const std::string& path);
Matrix decode_matrix(const json& j, const std::string& path);

std::string_view to_string(PhaseRelation relation);

struct ScanPath {
    Vector from;
    Vector to;
    int steps = 41;
};

/// One problem document. Every field is optional at parse time; commands
/// check for what they need.
struct Problem {
    std::optional<Matrix> A;
    std::optional<Matrix> B;
    std::optional<Vector> psi;
    std::optional<Vector> phi;
    std::optional<std::vector<Vector>> basis;
    std::optional<ScanPath> scan;
    std::optional<double> g;
    std::optional<json> meter;
};

Problem parse_problem(const json& doc);

/// Applies the fields present in `overrides` to `cfg`.
void apply_meter_overrides(const json& overrides, MeterConfig& cfg);

/// Shortest round-trip decimal form of a double ("nan"/"inf" for
/// non-finite values), for CSV output.
std::string format_double(double value);

} // namespace weakval::io
