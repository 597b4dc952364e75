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

#include "weakval/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "weakval/io.hpp"
#include "weakval/meter.hpp"
#include "weakval/verify.hpp"
#include "weakval/weakvalue.hpp"

namespace weakval::cli {

namespace {

using io::json;

enum class Format { Json, Csv };

struct RunConfig {
    std::string command;
    std::string input_path;
    RngSeed seed{42};
    std::optional<std::string> format;
    double overlap_threshold = kDefaultOverlapThreshold;
    double slack = kBoundSlack;
    std::optional<double> g;
    std::optional<int> n_grid;
    std::optional<double> half_width;
    std::optional<double> sigma;
    std::optional<double> k0;
    std::optional<double> x0;
    std::size_t trials = 100000;
    std::string dims = "2..8";
    unsigned threads = 1;
    std::size_t max_counterexamples = 10;
    std::string vary = "overlap";
    std::optional<int> steps;
};

/// Whether every check reported by a command held.
struct Outcome {
    bool checks_passed = true;
};

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorCode::ValidationError, what);
}

Format output_format(const RunConfig& cfg, Format fallback) {
    if (!cfg.format) return fallback;
    if (*cfg.format == "json") return Format::Json;
    if (*cfg.format == "csv") return Format::Csv;
    invalid("--format must be json or csv, got '" + *cfg.format + "'");
}

std::pair<int, int> parse_dims(const std::string& text) {
    const auto sep = text.find("..");
    try {
        if (sep == std::string::npos) {
            const int d = std::stoi(text);
            return {d, d};
        }
        return {std::stoi(text.substr(0, sep)), std::stoi(text.substr(sep + 2))};
    } catch (const std::exception&) {
        invalid("--dims must look like 2..8, got '" + text + "'");
    }
}

/// Typed view of a problem file with field provenance in every error.
class Inputs {
public:
    Inputs(io::Problem problem, const RunConfig& cfg, std::ostream& err)
        : p_(std::move(problem)), cfg_(cfg), err_(err) {}

    Observable observable(const char* field) const {
        const auto& m = field == std::string("B") ? p_.B : p_.A;
        if (!m) invalid(std::string("missing required field '") + field + "'");
        try {
            return Observable(*m);
        } catch (const Error& e) {
            invalid(std::string(field) + ": " + e.what());
        }
    }

    State state(const std::optional<Vector>& v, const std::string& field) const {
        if (!v) invalid("missing required field '" + field + "'");
        return to_state(*v, field);
    }

    /// Vectors within the construction tolerance are used bit-exactly; others
    /// are renormalized, with a warning when the deviation exceeds 1e-6.
    State to_state(const Vector& v, const std::string& field) const {
        try {
            const double norm = v.norm();
            if (std::abs(norm - 1.0) <= tol::construction) return State(v);
            if (std::abs(norm - 1.0) > 1e-6) {
                err_ << "warning: " << field << ": norm " << io::format_double(norm)
                     << " deviates from 1; state renormalized\n";
            }
            return State::normalize(v);
        } catch (const Error& e) {
            invalid(field + ": " + e.what());
        }
    }

    State psi() const { return state(p_.psi, "psi"); }
    State phi() const { return state(p_.phi, "phi"); }

    PpsEnsemble ensemble() const {
        const State pre = psi();
        const State post = phi();
        try {
            PpsEnsemble e(pre, post, cfg_.overlap_threshold);
            warn_conditioning(e);
            return e;
        } catch (const Error& e) {
            invalid(std::string("psi/phi: ") + e.what());
        }
    }

    void warn_conditioning(const PpsEnsemble& e) const {
        if (e.ill_conditioned()) {
            err_ << "warning: |<phi|psi>| = " << io::format_double(std::abs(e.overlap()))
                 << " is below 1e-6; the anomalous part is ill-conditioned\n";
        }
    }

    std::vector<State> basis(Eigen::Index dim) const {
        if (!p_.basis) return computational_basis(dim);
        std::vector<State> out;
        for (std::size_t k = 0; k < p_.basis->size(); ++k) {
            out.push_back(to_state((*p_.basis)[k], "basis[" + std::to_string(k) + "]"));
        }
        return out;
    }

    double coupling() const {
        if (cfg_.g) return *cfg_.g;
        if (p_.g) return *p_.g;
        invalid("coupling 'g' is required (problem field or --g)");
    }

    MeterConfig meter() const {
        MeterConfig m;
        if (p_.meter) io::apply_meter_overrides(*p_.meter, m);
        if (cfg_.n_grid) m.n_grid = *cfg_.n_grid;
        if (cfg_.half_width) m.half_width = *cfg_.half_width;
        if (cfg_.sigma) m.sigma = *cfg_.sigma;
        if (cfg_.k0) m.k0 = *cfg_.k0;
        if (cfg_.x0) m.x0 = *cfg_.x0;
        return m;
    }

    const io::Problem& problem() const { return p_; }

private:
    io::Problem p_;
    const RunConfig& cfg_;
    std::ostream& err_;
};

json header(const std::string& command) {
    json out;
    out["command"] = command;
    return out;
}

void emit(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

Outcome cmd_compute(const Inputs& in, std::ostream& out) {
    const Observable A = in.observable("A");
    const PpsEnsemble e = in.ensemble();
    const PpsEnsemble chi = equivalent_pps(e);
    const auto checks = verify::equivalence_checks(A, e);

    json doc = header("compute");
    doc["weak_value"] = io::encode(weak_value(A, e));
    doc["overlap"] = io::encode(e.overlap());
    doc["ill_conditioned"] = e.ill_conditioned();
    json eq;
    eq["chi"] = io::encode(chi.pre());
    eq["overlap"] = io::encode(chi.overlap());
    eq["weak_value"] = io::encode(weak_value(A, chi));
    doc["equivalent_pps"] = std::move(eq);
    doc["checks"] = verify::encode(checks);
    emit(out, doc);
    return {verify::all_passed(checks)};
}

Outcome cmd_decompose(const Inputs& in, std::ostream& out) {
    const Observable A = in.observable("A");
    const PpsEnsemble e = in.ensemble();
    const auto report = decompose_weak_value(A, e);
    const auto checks = verify::decompose_checks(A, e);

    json doc = header("decompose");
    doc["report"] = io::encode(report);
    doc["phase"] = report.phase_phi_bar ? io::encode(phase_analysis(report)) : json(nullptr);
    doc["checks"] = verify::encode(checks);
    emit(out, doc);
    return {verify::all_passed(checks)};
}

Outcome cmd_bounds(const Inputs& in, const RunConfig& cfg, std::ostream& out) {
    const Observable A = in.observable("A");
    const PpsEnsemble e = in.ensemble();
    const auto checks = verify::bounds_checks(A, e, cfg.slack);

    json doc = header("bounds");
    doc["bounds"] = io::encode(anomaly_bounds(A, e, cfg.slack));
    doc["checks"] = verify::encode(checks);
    emit(out, doc);
    return {verify::all_passed(checks)};
}

Outcome cmd_tradeoff(const Inputs& in, const RunConfig& cfg, std::ostream& out) {
    const Observable A = in.observable("A");
    const Observable B = in.observable("B");
    if (A.dim() != B.dim()) invalid("A and B must have the same dimension");
    const PpsEnsemble e = in.ensemble();
    const auto checks = verify::tradeoff_checks(A, B, e, cfg.slack);

    json doc = header("tradeoff");
    doc["tradeoff"] = io::encode(tradeoff_check(A, B, e, cfg.slack));
    doc["checks"] = verify::encode(checks);
    emit(out, doc);
    return {verify::all_passed(checks)};
}

Outcome cmd_average(const Inputs& in, std::ostream& out) {
    const Observable A = in.observable("A");
    const State psi = in.psi();
    const auto basis = in.basis(psi.dim());
    std::vector<verify::CheckResult> checks;
    IdentityResolution<double> res;
    try {
        res = identity_resolution_average(A, psi, std::span<const State>(basis));
        checks = verify::average_checks(A, psi, basis);
    } catch (const Error& e) {
        invalid(std::string("basis: ") + e.what());
    }

    json doc = header("average");
    doc["expectation"] = expectation(A, psi);
    doc["average"] = io::encode(res);
    doc["checks"] = verify::encode(checks);
    emit(out, doc);
    return {verify::all_passed(checks)};
}

Outcome cmd_simulate(const Inputs& in, std::ostream& out) {
    const Observable A = in.observable("A");
    const PpsEnsemble e = in.ensemble();
    const double g = in.coupling();
    const MeterConfig mcfg = in.meter();
    const PointerResult r = evolve_and_postselect(A, e, mcfg, g);
    const cplx aw = weak_value(A, e);

    json predicted;
    predicted["x_shift"] = g * aw.real();
    predicted["m_shift"] = 2 * g * r.var_m * aw.imag();
    predicted["p_select"] = std::norm(e.overlap()) * (1 + 2 * g * aw.imag() * r.mean_m_before);

    json doc = header("simulate");
    doc["meter"] = io::encode(mcfg);
    doc["weak_value"] = io::encode(aw);
    doc["pointer"] = io::encode(r);
    doc["first_order"] = std::move(predicted);
    emit(out, doc);
    return {};
}

Outcome cmd_converge(const Inputs& in, const RunConfig& cfg, std::ostream& out) {
    const Observable A = in.observable("A");
    const PpsEnsemble e = in.ensemble();
    const double g = in.coupling();
    const MeterConfig mcfg = in.meter();
    const auto rep = first_order_checks(A, e, mcfg, g);

    if (output_format(cfg, Format::Json) == Format::Csv) {
        out << "g,residual_x,residual_m,residual_p\n";
        out << io::format_double(rep.g) << ',' << io::format_double(rep.x_shift.residual_g) << ','
            << io::format_double(rep.m_shift.residual_g) << ','
            << io::format_double(rep.p_select.residual_g) << '\n';
        out << io::format_double(rep.at_half.g) << ','
            << io::format_double(rep.x_shift.residual_half) << ','
            << io::format_double(rep.m_shift.residual_half) << ','
            << io::format_double(rep.p_select.residual_half) << '\n';
    } else {
        json doc = header("converge");
        doc["meter"] = io::encode(mcfg);
        doc["convergence"] = io::encode(rep);
        emit(out, doc);
    }
    return {rep.passed()};
}

/// φ(τ) = cos(τθ)s + sin(τθ)u along the great circle from `from` to `to`.
std::vector<std::pair<double, State>> great_circle(const State& from, const State& to, int steps) {
    Vector target = to.amplitudes();
    const cplx st = from.amplitudes().dot(target);
    if (std::abs(st) > 0) target *= std::conj(st) / std::abs(st);
    const Vector perp = target - from.amplitudes() * from.amplitudes().dot(target);
    const double perp_norm = perp.norm();
    if (perp_norm < tol::construction) invalid("scan: endpoints coincide up to a phase");
    const Vector u = perp / perp_norm;
    const double theta = std::atan2(perp_norm, from.amplitudes().dot(target).real());

    std::vector<std::pair<double, State>> path;
    for (int i = 0; i < steps; ++i) {
        const double tau = double(i) / double(steps - 1);
        path.emplace_back(tau, State::normalize(Vector(std::cos(tau * theta) * from.amplitudes() +
                                                       std::sin(tau * theta) * u)));
    }
    return path;
}

Outcome cmd_scan(const Inputs& in, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.vary != "overlap") invalid("--vary supports only 'overlap', got '" + cfg.vary + "'");
    const Observable A = in.observable("A");
    const State psi = in.psi();
    const auto& scan = in.problem().scan;
    if (!scan) invalid("missing required field 'scan'");
    const int steps = cfg.steps.value_or(scan->steps);
    if (steps < 2) invalid("scan.steps must be at least 2");
    const State from = in.to_state(scan->from, "scan.from");
    const State to = in.to_state(scan->to, "scan.to");
    if (from.dim() != psi.dim() || to.dim() != psi.dim()) {
        invalid("scan endpoints must match the dimension of psi");
    }

    struct Row {
        double tau;
        double overlap;
        WeakValueReport report;
        BoundsReport bounds;
    };
    std::vector<Row> rows;
    for (const auto& [tau, phi] : great_circle(from, to, steps)) {
        try {
            const PpsEnsemble e(psi, phi, cfg.overlap_threshold);
            rows.push_back({tau, std::abs(e.overlap()), decompose_weak_value(A, e),
                            anomaly_bounds(A, e, cfg.slack)});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::OrthogonalPostSelection) throw;
            err << "warning: scan point t=" << io::format_double(tau)
                << " skipped (post-selection orthogonal to psi)\n";
        }
    }

    if (output_format(cfg, Format::Csv) == Format::Csv) {
        out << "t,overlap_modulus,weak_value_re,weak_value_im,average,delta_a,anomaly_modulus,"
               "lower_bound,upper_bound,lambda_max_gap\n";
        for (const auto& r : rows) {
            const double fields[] = {r.tau,
                                     r.overlap,
                                     r.report.weak_value.real(),
                                     r.report.weak_value.imag(),
                                     r.report.average,
                                     r.report.delta_a,
                                     r.bounds.anomaly_modulus,
                                     r.bounds.lower,
                                     r.bounds.upper,
                                     r.bounds.lambda_max_gap};
            for (std::size_t k = 0; k < std::size(fields); ++k) {
                out << (k ? "," : "") << io::format_double(fields[k]);
            }
            out << '\n';
        }
    } else {
        json doc = header("scan");
        json points = json::array();
        for (const auto& r : rows) {
            json p;
            p["t"] = r.tau;
            p["overlap_modulus"] = r.overlap;
            p["report"] = io::encode(r.report);
            p["bounds"] = io::encode(r.bounds);
            points.push_back(std::move(p));
        }
        doc["points"] = std::move(points);
        emit(out, doc);
    }
    bool ok = true;
    for (const auto& r : rows) ok = ok && r.bounds.satisfied();
    return {ok};
}

Outcome cmd_fuzz(const RunConfig& cfg, std::ostream& out) {
    verify::FuzzConfig f;
    f.trials = cfg.trials;
    std::tie(f.dim_lo, f.dim_hi) = parse_dims(cfg.dims);
    f.seed = cfg.seed;
    f.slack = cfg.slack;
    f.threads = cfg.threads;
    f.max_counterexamples = cfg.max_counterexamples;
    const auto summary = verify::run_fuzz(f);
    emit(out, verify::encode(summary));
    return {summary.total_violations() == 0};
}

io::Problem load_problem(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw Error(ErrorCode::ParseError, "cannot open input file");
    json doc;
    try {
        doc = json::parse(file);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return io::parse_problem(doc);
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.command == "fuzz") {
        return cmd_fuzz(cfg, out).checks_passed ? kExitOk : kExitInequality;
    }
    const Inputs in(load_problem(cfg.input_path), cfg, err);
    // Render into a buffer so a validation error never leaves a partial document.
    std::ostringstream buffer;
    Outcome outcome;
    if (cfg.command == "compute") outcome = cmd_compute(in, buffer);
    else if (cfg.command == "decompose") outcome = cmd_decompose(in, buffer);
    else if (cfg.command == "bounds") outcome = cmd_bounds(in, cfg, buffer);
    else if (cfg.command == "tradeoff") outcome = cmd_tradeoff(in, cfg, buffer);
    else if (cfg.command == "average") outcome = cmd_average(in, buffer);
    else if (cfg.command == "simulate") outcome = cmd_simulate(in, buffer);
    else if (cfg.command == "converge") outcome = cmd_converge(in, cfg, buffer);
    else if (cfg.command == "scan") outcome = cmd_scan(in, cfg, buffer, err);
    else invalid("unknown command '" + cfg.command + "'");
    out << buffer.str();
    return outcome.checks_passed ? kExitOk : kExitInequality;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Weak values of pre- and post-selected ensembles: decomposition, bounds, "
                 "tradeoffs and exact pointer simulation."};
    app.name("weakval");
    app.require_subcommand(1, 1);
    app.fallthrough();

    app.add_option("--seed", cfg.seed.value, "RNG seed for fuzz");
    app.add_option("--format", cfg.format, "Output format: json or csv");
    app.add_option("--overlap-threshold", cfg.overlap_threshold,
                   "Minimum |<phi|psi>| accepted for an ensemble");
    app.add_option("--slack", cfg.slack, "Slack for inequality checks");
    app.add_option("--g", cfg.g, "Coupling strength (overrides the problem file)");
    app.add_option("--n-grid", cfg.n_grid, "Meter grid points (power of two)");
    app.add_option("--half-width", cfg.half_width, "Meter grid half-width L");
    app.add_option("--sigma", cfg.sigma, "Meter Gaussian width");
    app.add_option("--k0", cfg.k0, "Meter initial momentum");
    app.add_option("--x0", cfg.x0, "Meter initial position");
    app.add_option("--trials", cfg.trials, "Number of fuzz trials");
    app.add_option("--dims", cfg.dims, "Fuzz dimension range, e.g. 2..8");
    app.add_option("--threads", cfg.threads, "Fuzz worker threads");
    app.add_option("--max-counterexamples", cfg.max_counterexamples,
                   "Counterexamples printed by fuzz");
    app.add_option("--vary", cfg.vary, "Scan variable (overlap)");
    app.add_option("--steps", cfg.steps, "Scan points (overrides scan.steps)");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"compute", "Weak value and its equivalent real-overlap ensemble"},
        {"decompose", "Average + anomalous decomposition and phase analysis"},
        {"bounds", "Lower/upper bounds on the anomalous part and the lambda_max gap"},
        {"tradeoff", "Anomaly tradeoff for two observables A and B"},
        {"average", "Average as weighted intermediate weak values over a basis"},
        {"simulate", "Exact pointer simulation with post-selection"},
        {"converge", "First-order pointer predictions at g and g/2"},
        {"scan", "Sweep the post-selection along a great circle"},
        {"fuzz", "Randomized verification of every identity and inequality"},
    };
    for (const auto& [name, description] : commands) {
        auto* sub = app.add_subcommand(name, description);
        sub->callback([&cfg, name = name] { cfg.command = name; });
        if (name != "fuzz") {
            sub->add_option("input", cfg.input_path, "Problem file (JSON)")->required();
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        return dispatch(cfg, out, err);
    } catch (const Error& e) {
        err << "error: " << (cfg.input_path.empty() ? "" : cfg.input_path + ": ") << e.what()
            << '\n';
        return e.code() == ErrorCode::InequalityViolation ? kExitInequality : kExitValidation;
    }
}

} // namespace weakval::cli
