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

#include "weakval/io.hpp"

#include <charconv>
#include <cmath>

namespace weakval::io {

namespace {

[[noreturn]] void parse_error(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::ParseError, path + ": " + what);
}

json optional_angle(const std::optional<double>& value) {
    return value ? json(*value) : json(nullptr);
}

} // namespace

json encode(cplx z) { return json::array({z.real(), z.imag()}); }

json encode(const Vector& v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(encode(v[k]));
    return out;
}

json encode(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(encode(m(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

json encode(const State& s) { return encode(s.amplitudes()); }

json encode(const Observable& A) { return encode(A.matrix()); }

json encode(const WeakValueReport& r) {
    json out;
    out["weak_value"] = encode(r.weak_value);
    out["average"] = r.average;
    out["delta_a"] = r.delta_a;
    out["psi_bar"] = r.psi_bar ? encode(*r.psi_bar) : json(nullptr);
    out["anomalous"] = encode(r.anomalous);
    out["eigenstate_flag"] = r.eigenstate_flag;
    out["overlap"] = encode(r.overlap);
    out["bar_overlap"] = encode(r.bar_overlap);
    out["phase_phi"] = r.phase_phi;
    out["phase_phi_bar"] = optional_angle(r.phase_phi_bar);
    out["ill_conditioned"] = r.ill_conditioned;
    return out;
}

std::string_view to_string(PhaseRelation relation) {
    switch (relation) {
    case PhaseRelation::EvenMultipleOfPi: return "even_multiple_of_pi";
    case PhaseRelation::OddMultipleOfPi: return "odd_multiple_of_pi";
    case PhaseRelation::OddMultipleOfHalfPi: return "odd_multiple_of_half_pi";
    case PhaseRelation::Generic: return "generic";
    }
    return "generic";
}

json encode(const PhaseAnalysis<double>& p) {
    json out;
    out["re_predicted"] = p.re_predicted;
    out["im_predicted"] = p.im_predicted;
    out["in_phase"] = p.in_phase;
    out["relative_phase"] = p.relative_phase;
    out["relation"] = std::string(to_string(p.relation));
    return out;
}

json encode(const BoundsReport& b) {
    json out;
    out["anomaly_modulus"] = b.anomaly_modulus;
    out["lower"] = b.lower;
    out["upper"] = b.upper;
    out["lambda_max_gap"] = b.lambda_max_gap;
    out["lambda_gap_bound"] = b.lambda_gap_bound;
    out["lower_satisfied"] = b.lower_satisfied;
    out["upper_satisfied"] = b.upper_satisfied;
    out["gap_satisfied"] = b.gap_satisfied;
    return out;
}

json encode(const IdentityResolution<double>& r) {
    json out;
    out["weighted_sum"] = r.weighted_sum;
    out["anomalous_weighted_sum"] = encode(r.anomalous_weighted_sum);
    json terms = json::array();
    for (const auto& t : r.terms) {
        json term;
        term["weight"] = t.weight;
        term["weak_value"] = t.weak_value ? encode(*t.weak_value) : json(nullptr);
        term["anomalous"] = encode(t.anomalous);
        term["skipped"] = t.skipped;
        terms.push_back(std::move(term));
    }
    out["terms"] = std::move(terms);
    return out;
}

json encode(const TradeoffResult<double>& t) {
    json out;
    out["lhs"] = t.lhs;
    out["rhs"] = t.rhs;
    out["satisfied"] = t.satisfied;
    out["commutator_modulus"] = t.commutator_modulus;
    return out;
}

json encode(const PointerResult& p) {
    json out;
    out["g"] = p.g;
    out["p_select"] = p.p_select;
    out["mean_x_before"] = p.mean_x_before;
    out["mean_x_after"] = p.mean_x_after;
    out["mean_m_before"] = p.mean_m_before;
    out["mean_m_after"] = p.mean_m_after;
    out["var_m"] = p.var_m;
    return out;
}

json encode(const ResidualCheck<double>& c) {
    json out;
    out["residual_g"] = c.residual_g;
    out["residual_half"] = c.residual_half;
    out["ratio"] = c.ratio;
    out["applicable"] = c.applicable;
    out["passed"] = c.passed;
    return out;
}

json encode(const ConvergenceReport<double>& c) {
    json out;
    out["g"] = c.g;
    out["weak_value"] = encode(c.weak_value);
    out["at_g"] = encode(c.at_g);
    out["at_half"] = encode(c.at_half);
    out["x_shift"] = encode(c.x_shift);
    out["m_shift"] = encode(c.m_shift);
    out["p_select"] = encode(c.p_select);
    out["passed"] = c.passed();
    return out;
}

json encode(const MeterConfig& cfg) {
    json out;
    out["n_grid"] = cfg.n_grid;
    out["half_width"] = cfg.half_width;
    out["sigma"] = cfg.sigma;
    out["k0"] = cfg.k0;
    out["x0"] = cfg.x0;
    return out;
}

cplx decode_complex(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        parse_error(path, "expected [re, im] or a number");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

Vector decode_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) parse_error(path, "expected a non-empty array of complex entries");
    Vector v(Eigen::Index(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        v[Eigen::Index(k)] = decode_complex(j[k], path + "[" + std::to_string(k) + "]");
    }
    return v;
}

Matrix decode_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) parse_error(path, "expected a non-empty array of rows");
    const std::size_t n = j.size();
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const std::string row_path = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != n) {
            parse_error(row_path, "expected a row of " + std::to_string(n) + " entries");
        }
        for (std::size_t k = 0; k < n; ++k) {
            m(Eigen::Index(i), Eigen::Index(k)) =
                decode_complex(j[i][k], row_path + "[" + std::to_string(k) + "]");
        }
    }
    return m;
}

Problem parse_problem(const json& doc) {
    if (!doc.is_object()) parse_error("<root>", "expected a JSON object");
    Problem p;
    if (doc.contains("A")) p.A = decode_matrix(doc["A"], "A");
    if (doc.contains("B")) p.B = decode_matrix(doc["B"], "B");
    if (doc.contains("psi")) p.psi = decode_vector(doc["psi"], "psi");
    if (doc.contains("phi")) p.phi = decode_vector(doc["phi"], "phi");
    if (doc.contains("basis")) {
        const json& b = doc["basis"];
        if (!b.is_array()) parse_error("basis", "expected an array of states");
        std::vector<Vector> basis;
        for (std::size_t k = 0; k < b.size(); ++k) {
            basis.push_back(decode_vector(b[k], "basis[" + std::to_string(k) + "]"));
        }
        p.basis = std::move(basis);
    }
    if (doc.contains("scan")) {
        const json& s = doc["scan"];
        if (!s.is_object() || !s.contains("from") || !s.contains("to")) {
            parse_error("scan", "expected an object with 'from' and 'to' states");
        }
        ScanPath path;
        path.from = decode_vector(s["from"], "scan.from");
        path.to = decode_vector(s["to"], "scan.to");
        if (s.contains("steps")) {
            if (!s["steps"].is_number_integer()) parse_error("scan.steps", "expected an integer");
            path.steps = s["steps"].get<int>();
        }
        p.scan = std::move(path);
    }
    if (doc.contains("g")) {
        if (!doc["g"].is_number()) parse_error("g", "expected a number");
        p.g = doc["g"].get<double>();
    }
    if (doc.contains("meter")) {
        if (!doc["meter"].is_object()) parse_error("meter", "expected an object");
        p.meter = doc["meter"];
    }
    return p;
}

void apply_meter_overrides(const json& overrides, MeterConfig& cfg) {
    for (const auto& [key, value] : overrides.items()) {
        const std::string path = "meter." + key;
        if (key == "n_grid") {
            if (!value.is_number_integer()) parse_error(path, "expected an integer");
            cfg.n_grid = value.get<int>();
            continue;
        }
        if (!value.is_number()) parse_error(path, "expected a number");
        const double v = value.get<double>();
        if (key == "half_width") cfg.half_width = v;
        else if (key == "sigma") cfg.sigma = v;
        else if (key == "k0") cfg.k0 = v;
        else if (key == "x0") cfg.x0 = v;
        else parse_error(path, "unknown meter field");
    }
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

} // namespace weakval::io
