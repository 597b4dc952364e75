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

// Identity and inequality checks shared by the single-shot commands and the
// randomized fuzz engine. Both paths call the same functions, so a fuzz
// counterexample replayed through its command reproduces the same numbers.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "weakval/hilbert.hpp"
#include "weakval/io.hpp"
#include "weakval/weakvalue.hpp"

namespace weakval::verify {

enum class Check {
    Decomposition,        // weak value = average + anomalous
    PhaseReconstruction,  // Re/Im rebuilt from Φ̄ − Φ; in_phase predicate
    IdentityResolution,   // weighted intermediate weak values; zero anomalous sum
    LowerBound,           // ΔA|⟨φ|ψ̄⟩| ≤ |δ⟨A⟩_w|
    UpperBound,           // |δ⟨A⟩_w| ≤ ΔA/|⟨φ|ψ⟩|
    LambdaMaxGap,         // Re⟨A⟩_w − λ_max ≤ ΔA/|⟨φ|ψ⟩|
    Tradeoff,             // |δA||δB| ≥ ½|⟨[A,B]⟩||⟨φ|ψ̄_A⟩||⟨φ|ψ̄_B⟩|
    EquivalentPps,        // ⟨φ|χ⟩ real positive, same weak value
};

inline constexpr std::array kAllChecks = {
    Check::Decomposition, Check::PhaseReconstruction, Check::IdentityResolution,
    Check::LowerBound,    Check::UpperBound,          Check::LambdaMaxGap,
    Check::Tradeoff,      Check::EquivalentPps,
};

std::string_view name(Check check);
/// Single-shot command that re-evaluates `check`.
std::string_view replay_command(Check check);

/// `passed` is decided by the check itself; `value`/`limit` report how close
/// it came (value ≤ limit when passing).
struct CheckResult {
    Check check;
    double value = 0;
    double limit = 0;
    bool passed = true;
};

io::json encode(const CheckResult& result);
io::json encode(std::span<const CheckResult> results);
bool all_passed(std::span<const CheckResult> results);

inline constexpr double kIdentityTolerance = 1e-10;
inline constexpr double kAverageTolerance = 1e-9;
inline constexpr double kRealnessTolerance = 1e-12;

std::vector<CheckResult> decompose_checks(const Observable& A, const PpsEnsemble& e);
std::vector<CheckResult> average_checks(const Observable& A, const State& psi,
                                        std::span<const State> basis);
std::vector<CheckResult> bounds_checks(const Observable& A, const PpsEnsemble& e, double slack);
std::vector<CheckResult> tradeoff_checks(const Observable& A, const Observable& B,
                                         const PpsEnsemble& e, double slack);
std::vector<CheckResult> equivalence_checks(const Observable& A, const PpsEnsemble& e);

// ---------------------------------------------------------------------------
// Randomized engine

struct FuzzConfig {
    std::size_t trials = 100000;
    int dim_lo = 2;
    int dim_hi = 8;
    RngSeed seed{42};
    double slack = kBoundSlack;
    /// Trials with |⟨φ|ψ⟩| at or below this are redrawn.
    double min_overlap = 1e-6;
    unsigned threads = 1;
    std::size_t max_counterexamples = 10;
};

/// Inputs of one trial; regenerated deterministically from (seed, index).
struct TrialInput {
    std::size_t index = 0;
    Matrix A;
    Matrix B;
    Vector psi;
    Vector phi;
    std::vector<Vector> basis;
};

TrialInput make_trial(const FuzzConfig& cfg, std::size_t index);

/// All checks for one trial, in kAllChecks order.
std::vector<CheckResult> evaluate_trial(const TrialInput& input, double slack);

struct Counterexample {
    CheckResult result;
    TrialInput input;
};

struct FuzzSummary {
    FuzzConfig config;
    std::array<std::size_t, kAllChecks.size()> violations{};
    std::array<double, kAllChecks.size()> worst{};   // max value seen per check
    std::vector<Counterexample> counterexamples;      // ascending trial order

    std::size_t total_violations() const;
};

FuzzSummary run_fuzz(const FuzzConfig& cfg);

/// Problem document reproducing a trial (A, B, psi, phi, basis).
io::json encode_problem(const TrialInput& input);
io::json encode(const Counterexample& c);
io::json encode(const FuzzSummary& summary);

} // namespace weakval::verify
