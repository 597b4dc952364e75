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

#include "weakval/verify.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <thread>

namespace weakval::verify {

std::string_view name(Check check) {
    switch (check) {
    case Check::Decomposition: return "decomposition";
    case Check::PhaseReconstruction: return "phase_reconstruction";
    case Check::IdentityResolution: return "identity_resolution";
    case Check::LowerBound: return "lower_bound";
    case Check::UpperBound: return "upper_bound";
    case Check::LambdaMaxGap: return "lambda_max_gap";
    case Check::Tradeoff: return "tradeoff";
    case Check::EquivalentPps: return "equivalent_pps";
    }
    return "unknown";
}

std::string_view replay_command(Check check) {
    switch (check) {
    case Check::Decomposition:
    case Check::PhaseReconstruction: return "decompose";
    case Check::IdentityResolution: return "average";
    case Check::LowerBound:
    case Check::UpperBound:
    case Check::LambdaMaxGap: return "bounds";
    case Check::Tradeoff: return "tradeoff";
    case Check::EquivalentPps: return "compute";
    }
    return "compute";
}

io::json encode(const CheckResult& result) {
    io::json out;
    out["check"] = std::string(name(result.check));
    out["value"] = result.value;
    out["limit"] = result.limit;
    out["passed"] = result.passed;
    return out;
}

io::json encode(std::span<const CheckResult> results) {
    io::json out = io::json::array();
    for (const auto& r : results) out.push_back(encode(r));
    return out;
}

bool all_passed(std::span<const CheckResult> results) {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

std::vector<CheckResult> decompose_checks(const Observable& A, const PpsEnsemble& e) {
    const auto report = decompose_weak_value(A, e);
    std::vector<CheckResult> out;
    const double residual = report.decomposition_residual();
    out.push_back({Check::Decomposition, residual, kIdentityTolerance, residual < kIdentityTolerance});

    if (report.phase_phi_bar) {
        const auto phase = phase_analysis(report);
        const double miss = std::abs(cplx(phase.re_predicted, phase.im_predicted) - report.weak_value);
        // Realness/positivity read directly off a freshly computed ⟨φ|ψ̄⟩.
        const cplx direct = inner(e.post(), *report.psi_bar);
        const bool direct_in_phase =
            std::abs(direct.imag()) < tol::identity && direct.real() > tol::identity;
        out.push_back({Check::PhaseReconstruction, miss, kIdentityTolerance,
                       miss < kIdentityTolerance && direct_in_phase == phase.in_phase});
    }
    return out;
}

std::vector<CheckResult> average_checks(const Observable& A, const State& psi,
                                        std::span<const State> basis) {
    const auto res = identity_resolution_average(A, psi, basis);
    const double miss = std::max(std::abs(res.weighted_sum - expectation(A, psi)),
                                 std::abs(res.anomalous_weighted_sum));
    return {{Check::IdentityResolution, miss, kAverageTolerance, miss < kAverageTolerance}};
}

std::vector<CheckResult> bounds_checks(const Observable& A, const PpsEnsemble& e, double slack) {
    const auto b = anomaly_bounds(A, e, slack);
    return {
        {Check::LowerBound, b.lower - b.anomaly_modulus, slack, b.lower_satisfied},
        {Check::UpperBound, b.anomaly_modulus - b.upper, slack, b.upper_satisfied},
        {Check::LambdaMaxGap, b.lambda_max_gap - b.lambda_gap_bound, slack, b.gap_satisfied},
    };
}

std::vector<CheckResult> tradeoff_checks(const Observable& A, const Observable& B,
                                         const PpsEnsemble& e, double slack) {
    const auto t = tradeoff_check(A, B, e, slack);
    return {{Check::Tradeoff, t.rhs - t.lhs, slack, t.satisfied}};
}

std::vector<CheckResult> equivalence_checks(const Observable& A, const PpsEnsemble& e) {
    const PpsEnsemble chi = equivalent_pps(e);
    const cplx ov = chi.overlap();
    const double miss = std::abs(weak_value(A, chi) - weak_value(A, e));
    const bool real_positive = std::abs(ov.imag()) < kRealnessTolerance && ov.real() > 0;
    return {{Check::EquivalentPps, miss, kIdentityTolerance,
             real_positive && miss < kIdentityTolerance}};
}

// ---------------------------------------------------------------------------

TrialInput make_trial(const FuzzConfig& cfg, std::size_t index) {
    Engine rng(mix_seed(cfg.seed.value, index));
    std::uniform_int_distribution<int> dim_dist(cfg.dim_lo, cfg.dim_hi);
    const Eigen::Index d = dim_dist(rng);

    TrialInput t;
    t.index = index;
    t.A = random_hermitian(d, rng).matrix();
    t.B = random_hermitian(d, rng).matrix();
    const State psi = random_state(d, rng);
    State phi = random_state(d, rng);
    while (!(std::abs(inner(phi, psi)) > cfg.min_overlap)) {
        phi = random_state(d, rng);
    }
    t.psi = psi.amplitudes();
    t.phi = phi.amplitudes();
    for (const auto& s : random_basis(d, rng)) t.basis.push_back(s.amplitudes());
    return t;
}

std::vector<CheckResult> evaluate_trial(const TrialInput& input, double slack) {
    const Observable A(input.A);
    const Observable B(input.B);
    const State psi(input.psi);
    const PpsEnsemble e(psi, State(input.phi));
    std::vector<State> basis;
    for (const auto& v : input.basis) basis.emplace_back(v);

    std::vector<CheckResult> out;
    auto append = [&out](std::vector<CheckResult> more) {
        out.insert(out.end(), more.begin(), more.end());
    };
    append(decompose_checks(A, e));
    append(average_checks(A, psi, basis));
    append(bounds_checks(A, e, slack));
    append(tradeoff_checks(A, B, e, slack));
    append(equivalence_checks(A, e));
    return out;
}

std::size_t FuzzSummary::total_violations() const {
    std::size_t total = 0;
    for (auto v : violations) total += v;
    return total;
}

namespace {

struct Partial {
    std::array<std::size_t, kAllChecks.size()> violations{};
    std::array<double, kAllChecks.size()> worst{};
    std::vector<Counterexample> counterexamples;
};

Partial run_range(const FuzzConfig& cfg, std::size_t begin, std::size_t end) {
    Partial p;
    p.worst.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = begin; i < end; ++i) {
        TrialInput input = make_trial(cfg, i);
        const auto results = evaluate_trial(input, cfg.slack);
        for (const auto& r : results) {
            const auto k = std::size_t(r.check);
            p.worst[k] = std::max(p.worst[k], r.value);
            if (!r.passed) {
                ++p.violations[k];
                if (p.counterexamples.size() < cfg.max_counterexamples) {
                    p.counterexamples.push_back({r, input});
                }
            }
        }
    }
    return p;
}

} // namespace

FuzzSummary run_fuzz(const FuzzConfig& cfg) {
    if (cfg.dim_lo < 2 || cfg.dim_hi < cfg.dim_lo) {
        throw Error(ErrorCode::ValidationError, "dimension range must satisfy 2 <= lo <= hi");
    }
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, unsigned(cfg.trials)));
    std::vector<Partial> parts(workers);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (cfg.trials + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(cfg.trials, w * chunk);
            const std::size_t end = std::min(cfg.trials, begin + chunk);
            pool.emplace_back([&, w, begin, end] { parts[w] = run_range(cfg, begin, end); });
        }
    }

    FuzzSummary s;
    s.config = cfg;
    s.worst.fill(-std::numeric_limits<double>::infinity());
    // Chunks are contiguous and merged in order, so the result does not
    // depend on the worker count.
    for (auto& p : parts) {
        for (std::size_t k = 0; k < kAllChecks.size(); ++k) {
            s.violations[k] += p.violations[k];
            s.worst[k] = std::max(s.worst[k], p.worst[k]);
        }
        for (auto& c : p.counterexamples) {
            if (s.counterexamples.size() < cfg.max_counterexamples) {
                s.counterexamples.push_back(std::move(c));
            }
        }
    }
    return s;
}

io::json encode_problem(const TrialInput& input) {
    io::json out;
    out["A"] = io::encode(input.A);
    out["B"] = io::encode(input.B);
    out["psi"] = io::encode(input.psi);
    out["phi"] = io::encode(input.phi);
    io::json basis = io::json::array();
    for (const auto& v : input.basis) basis.push_back(io::encode(v));
    out["basis"] = std::move(basis);
    return out;
}

io::json encode(const Counterexample& c) {
    io::json out;
    out["trial"] = c.input.index;
    out["command"] = std::string(replay_command(c.result.check));
    out["violation"] = encode(c.result);
    const io::json problem = encode_problem(c.input);
    for (const auto& [key, value] : problem.items()) out[key] = value;
    return out;
}

io::json encode(const FuzzSummary& s) {
    io::json out;
    out["command"] = "fuzz";
    out["trials"] = s.config.trials;
    out["dims"] = io::json::array({s.config.dim_lo, s.config.dim_hi});
    out["seed"] = s.config.seed.value;
    out["slack"] = s.config.slack;
    io::json violations, worst;
    for (auto check : kAllChecks) {
        const auto k = std::size_t(check);
        violations[std::string(name(check))] = s.violations[k];
        worst[std::string(name(check))] = s.worst[k];
    }
    out["violations"] = std::move(violations);
    out["total_violations"] = s.total_violations();
    out["worst"] = std::move(worst);
    io::json ces = io::json::array();
    for (const auto& c : s.counterexamples) ces.push_back(encode(c));
    out["counterexamples"] = std::move(ces);
    return out;
}

} // namespace weakval::verify
