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

// Exact von Neumann measurement with a discretized Gaussian pointer.
//
// The meter lives on a periodic grid x_j = −L + j·2L/n. Its momentum M is
// diagonal in the discrete Fourier basis with wavenumbers k_m = πm/L,
// m ∈ [−n/2, n/2), so exp(−i g a M) is applied exactly as a phase in
// momentum space. The joint state after the coupling exp(−i g A⊗M) is
//
//     |Ψ⟩ = Σ_a P_a|ψ⟩ ⊗ exp(−i g a M)|Φ⟩
//
// over the eigenvalues a of A, and post-selecting φ leaves the meter in
// Σ_a ⟨φ|P_a|ψ⟩ exp(−i g a M)|Φ⟩.

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "weakval/hilbert.hpp"
#include "weakval/weakvalue.hpp"

namespace weakval {

struct MeterConfig {
    int n_grid = 512;
    double half_width = 10.0;
    double sigma = 1.0;
    double k0 = 0.0;
    double x0 = 0.0;

    void validate() const {
        auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
        if (n_grid < 64 || (n_grid & (n_grid - 1)) != 0) {
            fail("n_grid must be a power of two >= 64, got " + std::to_string(n_grid));
        }
        if (!(sigma > 0)) fail("sigma must be positive");
        if (!(half_width >= 8 * sigma)) fail("half_width must be at least 8 sigma");
        if (!(std::abs(x0) + 6 * sigma < half_width)) fail("|x0| + 6 sigma must be below half_width");
        if (!std::isfinite(k0)) fail("k0 must be finite");
    }
};

template <typename Real> struct BasicMeter {
    MeterConfig config;
    RVector<Real> positions;        // x_j, ascending
    RVector<Real> momenta;          // k_m, ascending
    CMatrix<Real> fourier;          // F(j, m) = exp(i k_m x_j)/√n
    BasicState<Real> state;         // |Φ⟩ in the position representation
    CVector<Real> state_momentum;   // F†|Φ⟩
    BasicObservable<Real> position_op;
    BasicObservable<Real> momentum_op;
};

using Meter = BasicMeter<double>;

template <typename Real> struct BasicPointerResult {
    Real p_select = 0;
    Real mean_x_before = 0;
    Real mean_x_after = 0;
    Real mean_m_before = 0;
    Real mean_m_after = 0;
    Real var_m = 0;   // Var(M) of the initial meter state
    Real g = 0;
};

using PointerResult = BasicPointerResult<double>;

namespace detail {

/// exp(2πi r/n) for r in [0, n), with exact conjugate symmetry r ↔ n − r.
template <typename Real> CVector<Real> roots_of_unity(int n) {
    CVector<Real> w(n);
    for (int r = 0; r <= n / 2; ++r) {
        w[r] = std::polar(Real(1), 2 * std::numbers::pi_v<Real> * Real(r) / Real(n));
    }
    for (int r = n / 2 + 1; r < n; ++r) {
        w[r] = std::conj(w[n - r]);
    }
    return w;
}

inline int mod(long long a, int n) {
    const long long r = a % n;
    return int(r < 0 ? r + n : r);
}

} // namespace detail

template <typename Real = double> BasicMeter<Real> build_meter(const MeterConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_grid;
    const Real L = Real(cfg.half_width);
    const Real dx = 2 * L / Real(n);
    const CVector<Real> w = detail::roots_of_unity<Real>(n);

    RVector<Real> x(n), k(n);
    for (int j = 0; j < n; ++j) x[j] = -L + Real(j) * dx;
    for (int m = 0; m < n; ++m) k[m] = std::numbers::pi_v<Real> * Real(m - n / 2) / L;

    // k_m x_j = 2π (m − n/2)(j − n/2)/n (mod 2π)
    const Real inv_sqrt_n = Real(1) / std::sqrt(Real(n));
    CMatrix<Real> F(n, n);
    for (int m = 0; m < n; ++m) {
        for (int j = 0; j < n; ++j) {
            F(j, m) = w[detail::mod(static_cast<long long>(m - n / 2) * (j - n / 2), n)] * inv_sqrt_n;
        }
    }

    // M(j, l) = (1/n) Σ_m k_m exp(2πi (m − n/2)(j − l)/n) depends on j − l only.
    CVector<Real> band(2 * n - 1);
    for (int delta = -(n - 1); delta <= n - 1; ++delta) {
        Complex<Real> acc(0);
        for (int m = 0; m < n; ++m) {
            acc += k[m] * w[detail::mod(static_cast<long long>(m - n / 2) * delta, n)];
        }
        band[delta + n - 1] = acc / Real(n);
    }
    CMatrix<Real> M(n, n);
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) M(j, l) = band[j - l + n - 1];
    }
    M = (M + M.adjoint()).eval() / Real(2);

    CVector<Real> phi(n);
    const Real sigma = Real(cfg.sigma);
    for (int j = 0; j < n; ++j) {
        const Real u = x[j] - Real(cfg.x0);
        phi[j] = std::exp(-u * u / (4 * sigma * sigma)) *
                 std::polar(Real(1), Real(cfg.k0) * x[j]);
    }
    auto state = BasicState<Real>::normalize(phi);
    CVector<Real> state_momentum = F.adjoint() * state.amplitudes();

    auto position_op = BasicObservable<Real>::from_spectral(
        CMatrix<Real>(x.template cast<Complex<Real>>().asDiagonal()), x,
        CMatrix<Real>::Identity(n, n));
    auto momentum_op = BasicObservable<Real>::from_spectral(std::move(M), k, F);

    return BasicMeter<Real>{cfg,
                            std::move(x),
                            std::move(k),
                            std::move(F),
                            std::move(state),
                            std::move(state_momentum),
                            std::move(position_op),
                            std::move(momentum_op)};
}

/// exp(−i·shift·M) applied to a position-representation vector; an exact
/// (band-limited) translation by `shift`.
template <typename Real>
CVector<Real> translate(const BasicMeter<Real>& meter, const CVector<Real>& v, Real shift) {
    require_same_dim(v.size(), meter.positions.size(), "translate");
    CVector<Real> tilde = meter.fourier.adjoint() * v;
    for (Eigen::Index m = 0; m < tilde.size(); ++m) {
        tilde[m] *= std::polar(Real(1), -shift * meter.momenta[m]);
    }
    return meter.fourier * tilde;
}

/// Unnormalized meter state (momentum representation) after the coupling and
/// post-selection onto φ. Its squared norm is the selection probability.
template <typename Real>
CVector<Real> postselected_meter(const BasicObservable<Real>& A, const BasicState<Real>& psi,
                                 const BasicState<Real>& phi, const BasicMeter<Real>& meter,
                                 Real g) {
    require_same_dim(A.dim(), psi.dim(), "postselected_meter");
    require_same_dim(A.dim(), phi.dim(), "postselected_meter");
    if (!(std::abs(g) * A.spectral_radius() <= Real(meter.config.half_width) / 4)) {
        throw Error(ErrorCode::ConfigInvalid,
                    "|g| * max|lambda| exceeds half_width/4; the pointer would wrap around");
    }
    const auto& V = A.eigenvectors();
    // ⟨φ|v_a⟩⟨v_a|ψ⟩ per eigenvalue
    const CVector<Real> weights =
        (V.adjoint() * phi.amplitudes()).conjugate().cwiseProduct(V.adjoint() * psi.amplitudes());
    const auto& spectrum = A.spectrum();
    CVector<Real> out(meter.momenta.size());
    for (Eigen::Index m = 0; m < out.size(); ++m) {
        Complex<Real> factor(0);
        for (Eigen::Index a = 0; a < weights.size(); ++a) {
            factor += weights[a] * std::polar(Real(1), -g * spectrum[a] * meter.momenta[m]);
        }
        out[m] = meter.state_momentum[m] * factor;
    }
    return out;
}

/// ‖(⟨φ| ⊗ I) exp(−i g A⊗M) |ψ⟩|Φ⟩‖²
template <typename Real>
Real selection_probability(const BasicObservable<Real>& A, const BasicState<Real>& psi,
                           const BasicState<Real>& phi, const BasicMeter<Real>& meter, Real g) {
    return postselected_meter(A, psi, phi, meter, g).squaredNorm();
}

template <typename Real>
BasicPointerResult<Real> evolve_and_postselect(const BasicObservable<Real>& A,
                                               const BasicPpsEnsemble<Real>& e,
                                               const BasicMeter<Real>& meter, Real g) {
    const CVector<Real> selected = postselected_meter(A, e.pre(), e.post(), meter, g);
    const RVector<Real> prob_m = selected.cwiseAbs2();
    const Real p = prob_m.sum();
    if (!(p >= Real(1e-300))) {
        throw Error(ErrorCode::ZeroSelectionProbability, "post-selected meter state is null");
    }
    const RVector<Real> prob_x = (meter.fourier * selected).cwiseAbs2();
    const RVector<Real> before_x = meter.state.amplitudes().cwiseAbs2();
    const RVector<Real> before_m = meter.state_momentum.cwiseAbs2();

    BasicPointerResult<Real> r;
    r.g = g;
    r.p_select = p;
    r.mean_x_before = meter.positions.dot(before_x);
    r.mean_x_after = meter.positions.dot(prob_x) / p;
    r.mean_m_before = meter.momenta.dot(before_m);
    r.mean_m_after = meter.momenta.dot(prob_m) / p;
    r.var_m = meter.momenta.cwiseAbs2().dot(before_m) - r.mean_m_before * r.mean_m_before;
    return r;
}

template <typename Real>
BasicPointerResult<Real> evolve_and_postselect(const BasicObservable<Real>& A,
                                               const BasicPpsEnsemble<Real>& e,
                                               const MeterConfig& cfg, Real g) {
    return evolve_and_postselect(A, e, build_meter<Real>(cfg), g);
}

// ---------------------------------------------------------------------------
// First-order checks

inline constexpr double kConvergenceRatioLow = 3.5;
inline constexpr double kConvergenceRatioHigh = 4.5;
inline constexpr double kResidualFloor = 1e-12;
inline constexpr double kGuardLimit = 0.5;

template <typename Real> struct ResidualCheck {
    Real residual_g = 0;      // |observed − prediction| at g
    Real residual_half = 0;   // same at g/2
    Real ratio = 0;           // residual_g / residual_half (0 when undefined)
    bool applicable = true;
    bool passed = true;
};

template <typename Real> struct ConvergenceReport {
    Real g = 0;
    Complex<Real> weak_value;
    BasicPointerResult<Real> at_g;
    BasicPointerResult<Real> at_half;
    ResidualCheck<Real> x_shift;   // Δ⟨X⟩ ≈ g Re⟨A⟩_w, real envelope only
    ResidualCheck<Real> m_shift;   // Δ⟨M⟩ ≈ 2g Var(M) Im⟨A⟩_w
    ResidualCheck<Real> p_select;  // p ≈ |⟨φ|ψ⟩|²(1 + 2g Im⟨A⟩_w ⟨M⟩)

    bool passed() const { return x_shift.passed && m_shift.passed && p_select.passed; }
};

namespace detail {

template <typename Real> ResidualCheck<Real> ratio_check(Real r_g, Real r_half, bool applicable) {
    ResidualCheck<Real> c;
    c.residual_g = r_g;
    c.residual_half = r_half;
    c.applicable = applicable;
    c.ratio = r_half > Real(0) ? r_g / r_half : Real(0);
    if (applicable && r_g > Real(kResidualFloor)) {
        c.passed = c.ratio >= Real(kConvergenceRatioLow) && c.ratio <= Real(kConvergenceRatioHigh);
    }
    return c;
}

} // namespace detail

/// Runs the exact simulation at g and g/2 and checks that the residual of
/// each first-order prediction falls by a factor in [3.5, 4.5].
template <typename Real>
ConvergenceReport<Real> first_order_checks(const BasicObservable<Real>& A,
                                           const BasicPpsEnsemble<Real>& e,
                                           const BasicMeter<Real>& meter, Real g) {
    const Complex<Real> aw = weak_value(A, e);
    const CMatrix<Real> a2 = A.matrix() * A.matrix();
    const Complex<Real> a2w =
        e.post().amplitudes().dot(a2 * e.pre().amplitudes()) / e.overlap();
    const RVector<Real> before_m = meter.state_momentum.cwiseAbs2();
    const Real m2 = meter.momenta.cwiseAbs2().dot(before_m);
    const Real guard =
        std::abs(g) * std::max(std::abs(aw), std::sqrt(std::abs(a2w))) * std::sqrt(m2);
    if (!(guard < Real(kGuardLimit))) {
        throw Error(ErrorCode::GuardViolated,
                    "predicted first-order correction " + std::to_string(double(guard)) +
                        " is not below " + std::to_string(kGuardLimit));
    }

    ConvergenceReport<Real> rep;
    rep.g = g;
    rep.weak_value = aw;
    rep.at_g = evolve_and_postselect(A, e, meter, g);
    rep.at_half = evolve_and_postselect(A, e, meter, g / 2);
    const Real overlap2 = std::norm(e.overlap());

    auto residuals = [&](const BasicPointerResult<Real>& r) {
        const Real dx = r.mean_x_after - r.mean_x_before;
        const Real dm = r.mean_m_after - r.mean_m_before;
        return std::array<Real, 3>{
            std::abs(dx - r.g * aw.real()),
            std::abs(dm - 2 * r.g * r.var_m * aw.imag()),
            std::abs(r.p_select - overlap2 * (1 + 2 * r.g * aw.imag() * r.mean_m_before)),
        };
    };
    const auto full = residuals(rep.at_g);
    const auto half = residuals(rep.at_half);
    rep.x_shift = detail::ratio_check(full[0], half[0], meter.config.k0 == 0.0);
    rep.m_shift = detail::ratio_check(full[1], half[1], true);
    rep.p_select = detail::ratio_check(full[2], half[2], true);
    return rep;
}

template <typename Real>
ConvergenceReport<Real> first_order_checks(const BasicObservable<Real>& A,
                                           const BasicPpsEnsemble<Real>& e,
                                           const MeterConfig& cfg, Real g) {
    return first_order_checks(A, e, build_meter<Real>(cfg), g);
}

} // namespace weakval
