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

// Weak values of pre-/post-selected ensembles and their split into the
// pre-selected average plus an anomalous part.
//
// For an observable A, pre-selection |ψ⟩ and post-selection |φ⟩:
//
//     ⟨A⟩_w = ⟨φ|A|ψ⟩ / ⟨φ|ψ⟩
//     A|ψ⟩  = ⟨A⟩|ψ⟩ + ΔA|ψ̄⟩,          ⟨ψ|ψ̄⟩ = 0
//     ⟨A⟩_w = ⟨A⟩ + ΔA ⟨φ|ψ̄⟩ / ⟨φ|ψ⟩
//
// The second term is the anomalous part δ⟨A⟩_w. It vanishes exactly when
// ΔA = 0 or ⟨φ|ψ̄⟩ = 0, and it is bounded by
//
//     ΔA |⟨φ|ψ̄⟩|  ≤  |δ⟨A⟩_w|  ≤  ΔA / |⟨φ|ψ⟩|.

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weakval/hilbert.hpp"

namespace weakval {

inline constexpr double kDefaultOverlapThreshold = 1e-9;
inline constexpr double kConditioningWarning = 1e-6;
inline constexpr double kBoundSlack = 1e-9;
inline constexpr double kPhaseTolerance = 1e-9;
/// Below this modulus an overlap is treated as exactly zero.
inline constexpr double kZeroOverlap = 1e-12;
/// Intermediate post-selections lighter than this are skipped.
inline constexpr double kZeroWeight = 1e-14;

/// Pre-selection ψ and post-selection φ with cached ⟨φ|ψ⟩.
template <typename Real> class BasicPpsEnsemble {
public:
    BasicPpsEnsemble(BasicState<Real> pre, BasicState<Real> post,
                     Real overlap_threshold = Real(kDefaultOverlapThreshold))
        : pre_(std::move(pre)), post_(std::move(post)), threshold_(overlap_threshold) {
        require_same_dim(pre_.dim(), post_.dim(), "PpsEnsemble");
        overlap_ = inner(post_, pre_);
        if (!(std::abs(overlap_) > threshold_)) {
            throw Error(ErrorCode::OrthogonalPostSelection,
                        "|<phi|psi>| = " + std::to_string(double(std::abs(overlap_))) +
                            " is not above the threshold " + std::to_string(double(threshold_)));
        }
    }

    const BasicState<Real>& pre() const { return pre_; }
    const BasicState<Real>& post() const { return post_; }
    Eigen::Index dim() const { return pre_.dim(); }
    /// ⟨φ|ψ⟩
    Complex<Real> overlap() const { return overlap_; }
    Real overlap_threshold() const { return threshold_; }
    /// The anomalous part amplifies rounding as 1/|⟨φ|ψ⟩|.
    bool ill_conditioned() const { return std::abs(overlap_) < Real(kConditioningWarning); }

private:
    BasicState<Real> pre_;
    BasicState<Real> post_;
    Complex<Real> overlap_;
    Real threshold_;
};

using PpsEnsemble = BasicPpsEnsemble<double>;

template <typename Real> struct VaidmanSplit {
    Real average = 0;
    Real delta_a = 0;
    std::optional<BasicState<Real>> psi_bar;   // absent for eigenstates
};

template <typename Real> struct BasicWeakValueReport {
    Complex<Real> weak_value;
    Real average = 0;
    Real delta_a = 0;
    std::optional<BasicState<Real>> psi_bar;
    Complex<Real> anomalous;
    bool eigenstate_flag = false;
    Complex<Real> overlap;        // ⟨φ|ψ⟩
    Complex<Real> bar_overlap;    // ⟨φ|ψ̄⟩, zero when ψ̄ is absent
    Real phase_phi = 0;           // arg⟨φ|ψ⟩
    std::optional<Real> phase_phi_bar;
    bool ill_conditioned = false;

    /// max(|Re|, |Im|) of weak_value − (average + anomalous).
    Real decomposition_residual() const {
        const Complex<Real> diff = weak_value - (Complex<Real>(average) + anomalous);
        return std::max(std::abs(diff.real()), std::abs(diff.imag()));
    }
};

using WeakValueReport = BasicWeakValueReport<double>;

/// How Φ̄ − Φ sits relative to multiples of π/2.
enum class PhaseRelation {
    EvenMultipleOfPi,    // weak value real, anomaly adds to the average
    OddMultipleOfPi,     // weak value real, anomaly subtracts
    OddMultipleOfHalfPi, // Re⟨A⟩_w = ⟨A⟩
    Generic,
};

template <typename Real> struct PhaseAnalysis {
    Real re_predicted = 0;
    Real im_predicted = 0;
    bool in_phase = false;
    Real relative_phase = 0;   // Φ̄ − Φ reduced into (−π, π]
    PhaseRelation relation = PhaseRelation::Generic;
};

template <typename Real> struct BasicBoundsReport {
    Real anomaly_modulus = 0;
    Real lower = 0;
    Real upper = 0;
    Real lambda_max_gap = 0;
    Real lambda_gap_bound = 0;
    bool lower_satisfied = true;
    bool upper_satisfied = true;
    bool gap_satisfied = true;

    bool satisfied() const { return lower_satisfied && upper_satisfied && gap_satisfied; }
};

using BoundsReport = BasicBoundsReport<double>;

template <typename Real> struct AverageTerm {
    Real weight = 0;                            // |⟨ψ|ψ_k⟩|²
    std::optional<Complex<Real>> weak_value;    // ⟨A⟩_w^(k), absent when skipped
    Complex<Real> anomalous;                    // δ⟨A⟩_w^(k), zero when skipped
    bool skipped = false;
};

template <typename Real> struct IdentityResolution {
    Real weighted_sum = 0;
    Complex<Real> anomalous_weighted_sum;
    std::vector<AverageTerm<Real>> terms;
};

template <typename Real> struct TradeoffResult {
    Real lhs = 0;
    Real rhs = 0;
    bool satisfied = true;
    Real commutator_modulus = 0;   // |⟨ψ|[A,B]|ψ⟩|
};

// ---------------------------------------------------------------------------

/// arg z in (−π, π].
template <typename Real> Real principal_arg(Complex<Real> z) {
    const Real a = std::arg(z);
    return a == -std::numbers::pi_v<Real> ? std::numbers::pi_v<Real> : a;
}

/// Reduces an angle into (−π, π].
template <typename Real> Real reduce_angle(Real angle) {
    constexpr Real pi = std::numbers::pi_v<Real>;
    Real r = std::remainder(angle, 2 * pi);
    if (r <= -pi) r += 2 * pi;
    return r;
}

/// ⟨φ|A|ψ⟩ / ⟨φ|ψ⟩
template <typename Real>
Complex<Real> weak_value(const BasicObservable<Real>& A, const BasicPpsEnsemble<Real>& e) {
    require_same_dim(A.dim(), e.dim(), "weak_value");
    const Complex<Real> numerator = e.post().amplitudes().dot(A.matrix() * e.pre().amplitudes());
    return numerator / e.overlap();
}

/// Unvalidated pair; throws OrthogonalPostSelection when |⟨φ|ψ⟩| ≤ threshold.
template <typename Real>
Complex<Real> weak_value(const BasicObservable<Real>& A, const BasicState<Real>& psi,
                         const BasicState<Real>& phi,
                         Real overlap_threshold = Real(kDefaultOverlapThreshold)) {
    return weak_value(A, BasicPpsEnsemble<Real>(psi, phi, overlap_threshold));
}

template <typename Real>
VaidmanSplit<Real> vaidman_decompose(const BasicObservable<Real>& A, const BasicState<Real>& psi) {
    require_same_dim(A.dim(), psi.dim(), "vaidman_decompose");
    VaidmanSplit<Real> out;
    out.average = expectation(A, psi);
    CVector<Real> residual = A.matrix() * psi.amplitudes() - out.average * psi.amplitudes();
    // Cancellation near eigenstates leaves a rounding-level component along ψ;
    // one reorthogonalization pass keeps ψ̄ orthogonal to working precision.
    residual -= psi.amplitudes().dot(residual) * psi.amplitudes();
    out.delta_a = residual.norm();
    if (out.delta_a >= Real(tol::identity)) {
        out.psi_bar.emplace(CVector<Real>(residual / out.delta_a));
    }
    return out;
}

template <typename Real>
BasicWeakValueReport<Real> decompose_weak_value(const BasicObservable<Real>& A,
                                                const BasicPpsEnsemble<Real>& e) {
    BasicWeakValueReport<Real> r;
    r.weak_value = weak_value(A, e);
    auto split = vaidman_decompose(A, e.pre());
    r.average = split.average;
    r.delta_a = split.delta_a;
    r.overlap = e.overlap();
    r.phase_phi = principal_arg(r.overlap);
    r.ill_conditioned = e.ill_conditioned();
    r.eigenstate_flag = !split.psi_bar.has_value();
    if (split.psi_bar) {
        r.bar_overlap = inner(e.post(), *split.psi_bar);
        r.anomalous = r.delta_a * r.bar_overlap / r.overlap;
        if (std::abs(r.bar_overlap) >= Real(kZeroOverlap)) {
            r.phase_phi_bar = principal_arg(r.bar_overlap);
        }
        r.psi_bar = std::move(split.psi_bar);
    }
    return r;
}

/// Re/Im of the weak value rebuilt from the moduli and phases of ⟨φ|ψ̄⟩ and
/// ⟨φ|ψ⟩. Throws PhaseUndefined when Φ̄ does not exist.
template <typename Real> PhaseAnalysis<Real> phase_analysis(const BasicWeakValueReport<Real>& r) {
    if (!r.phase_phi_bar) {
        throw Error(ErrorCode::PhaseUndefined,
                    r.eigenstate_flag ? "pre-selection is an eigenstate (no orthogonal component)"
                                      : "post-selection is orthogonal to the orthogonal component");
    }
    constexpr Real pi = std::numbers::pi_v<Real>;
    PhaseAnalysis<Real> out;
    out.relative_phase = reduce_angle(*r.phase_phi_bar - r.phase_phi);
    const Real ratio = r.delta_a * std::abs(r.bar_overlap) / std::abs(r.overlap);
    out.re_predicted = r.average + ratio * std::cos(out.relative_phase);
    out.im_predicted = ratio * std::sin(out.relative_phase);
    out.in_phase = std::abs(r.bar_overlap.imag()) < Real(tol::identity) &&
                   r.bar_overlap.real() > Real(tol::identity);

    const Real tolerance = Real(kPhaseTolerance);
    const Real abs_phase = std::abs(out.relative_phase);
    if (abs_phase <= tolerance) {
        out.relation = PhaseRelation::EvenMultipleOfPi;
    } else if (pi - abs_phase <= tolerance) {
        out.relation = PhaseRelation::OddMultipleOfPi;
    } else if (std::abs(abs_phase - pi / 2) <= tolerance) {
        out.relation = PhaseRelation::OddMultipleOfHalfPi;
    }
    return out;
}

/// Σ_k |⟨ψ|ψ_k⟩|² ⟨A⟩_w^(k) over a complete orthonormal basis, together
/// with the weighted sum of the intermediate anomalous parts (which is zero).
template <typename Real>
IdentityResolution<Real> identity_resolution_average(const BasicObservable<Real>& A,
                                                     const BasicState<Real>& psi,
                                                     std::span<const BasicState<Real>> basis) {
    const Eigen::Index d = psi.dim();
    require_same_dim(A.dim(), d, "identity_resolution_average");
    if (Eigen::Index(basis.size()) > d) {
        throw Error(ErrorCode::NonOrthonormalBasis, std::to_string(basis.size()) +
                                                        " vectors cannot be orthonormal in dimension " +
                                                        std::to_string(d));
    }
    CMatrix<Real> columns(d, Eigen::Index(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        require_same_dim(basis[k].dim(), d, "identity_resolution_average basis");
        columns.col(Eigen::Index(k)) = basis[k].amplitudes();
    }
    if (!(orthonormality_residue(columns) < Real(tol::identity))) {
        throw Error(ErrorCode::NonOrthonormalBasis, "basis vectors are not orthonormal");
    }
    const CMatrix<Real> projector_sum = columns * columns.adjoint();
    if (Eigen::Index(basis.size()) < d ||
        !((projector_sum - CMatrix<Real>::Identity(d, d)).cwiseAbs().maxCoeff() <
          Real(tol::identity))) {
        throw Error(ErrorCode::IncompleteBasis, "basis projectors do not resolve the identity");
    }

    const auto split = vaidman_decompose(A, psi);
    const CVector<Real> a_psi = A.matrix() * psi.amplitudes();

    IdentityResolution<Real> out;
    Complex<Real> total(0);
    for (const auto& state : basis) {
        AverageTerm<Real> term;
        const Complex<Real> amp = inner(state, psi);   // ⟨ψ_k|ψ⟩
        term.weight = std::norm(amp);
        if (term.weight < Real(kZeroWeight)) {
            term.skipped = true;
            out.terms.push_back(term);
            continue;
        }
        term.weak_value = state.amplitudes().dot(a_psi) / amp;
        if (split.psi_bar) {
            term.anomalous = split.delta_a * inner(state, *split.psi_bar) / amp;
        }
        total += term.weight * *term.weak_value;
        out.anomalous_weighted_sum += term.weight * term.anomalous;
        out.terms.push_back(term);
    }
    out.weighted_sum = total.real();
    return out;
}

/// Lower/upper bounds on |δ⟨A⟩_w| and the gap Re⟨A⟩_w − λ_max ≤ ΔA/|⟨φ|ψ⟩|.
template <typename Real>
BasicBoundsReport<Real> anomaly_bounds(const BasicObservable<Real>& A,
                                       const BasicPpsEnsemble<Real>& e,
                                       Real slack = Real(kBoundSlack)) {
    const auto r = decompose_weak_value(A, e);
    const Real overlap_mod = std::abs(e.overlap());
    BasicBoundsReport<Real> b;
    b.anomaly_modulus = std::abs(r.anomalous);
    b.lower = r.delta_a * std::abs(r.bar_overlap);
    b.upper = r.delta_a / overlap_mod;
    b.lambda_max_gap = r.weak_value.real() - A.lambda_max();
    b.lambda_gap_bound = r.delta_a / overlap_mod;
    b.lower_satisfied = b.lower <= b.anomaly_modulus + slack;
    b.upper_satisfied = b.anomaly_modulus <= b.upper + slack;
    b.gap_satisfied = b.lambda_max_gap <= b.lambda_gap_bound + slack;
    return b;
}

/// (Re⟨A⟩_w − λ_max, ΔA/|⟨φ|ψ⟩|)
template <typename Real>
std::pair<Real, Real> lambda_max_gap(const BasicObservable<Real>& A,
                                     const BasicPpsEnsemble<Real>& e) {
    const auto b = anomaly_bounds(A, e);
    return {b.lambda_max_gap, b.lambda_gap_bound};
}

/// |δ⟨A⟩_w||δ⟨B⟩_w| ≥ ½|⟨ψ|[A,B]|ψ⟩| |⟨φ|ψ̄_A⟩| |⟨φ|ψ̄_B⟩|
template <typename Real>
TradeoffResult<Real> tradeoff_check(const BasicObservable<Real>& A, const BasicObservable<Real>& B,
                                    const BasicPpsEnsemble<Real>& e,
                                    Real slack = Real(kBoundSlack)) {
    require_same_dim(A.dim(), B.dim(), "tradeoff_check");
    const auto ra = decompose_weak_value(A, e);
    const auto rb = decompose_weak_value(B, e);
    const CMatrix<Real> c = commutator(A, B);
    const Complex<Real> comm = e.pre().amplitudes().dot(c * e.pre().amplitudes());

    TradeoffResult<Real> out;
    out.commutator_modulus = std::abs(comm);
    if (ra.eigenstate_flag || rb.eigenstate_flag) {
        // Robertson: |⟨[A,B]⟩| ≤ 2ΔAΔB, so a vanishing spread forces it to zero.
        if (!(out.commutator_modulus <= 2 * ra.delta_a * rb.delta_a + Real(kBoundSlack))) {
            throw Error(ErrorCode::InequalityViolation,
                        "eigenstate pre-selection with non-vanishing commutator expectation");
        }
    }
    const Real factor_a = ra.eigenstate_flag ? Real(0) : std::abs(ra.bar_overlap);
    const Real factor_b = rb.eigenstate_flag ? Real(0) : std::abs(rb.bar_overlap);
    out.lhs = std::abs(ra.anomalous) * std::abs(rb.anomalous);
    out.rhs = Real(0.5) * out.commutator_modulus * factor_a * factor_b;
    out.satisfied = out.lhs >= out.rhs - slack;
    return out;
}

/// Replaces ψ by χ = (⟨ψ|φ⟩/|⟨ψ|φ⟩|) ψ so that ⟨φ|χ⟩ is real and positive.
template <typename Real>
BasicPpsEnsemble<Real> equivalent_pps(const BasicPpsEnsemble<Real>& e) {
    const Complex<Real> ov = e.overlap();
    if (ov.imag() == Real(0) && ov.real() > Real(0)) {
        return e;
    }
    const Complex<Real> multiplier = std::conj(ov) / std::abs(ov);
    return BasicPpsEnsemble<Real>(BasicState<Real>(CVector<Real>(multiplier * e.pre().amplitudes())),
                                  e.post(), e.overlap_threshold());
}

} // namespace weakval
