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

// Pointer simulation against closed forms for Gaussian meters (σ = 1, so
// Var M = 1/4) and against brute-force joint evolution on a small grid.

#include <doctest.h>

#include "helpers.hpp"
#include "weakval/meter.hpp"

using namespace weakval;
using namespace weakval::testing;

namespace {

PpsEnsemble real_ensemble() { return PpsEnsemble(ket({1.0, 1.0}), ket({2.0, -1.0})); }

// ⟨A⟩_w = −i for σ_z
PpsEnsemble imaginary_ensemble() { return PpsEnsemble(ket({1.0, 1.0}), ket({1.0, -1i})); }

// ⟨A⟩_w = 0.4 + 0.2i for diag(−1, 0, 2)
PpsEnsemble qutrit_ensemble() { return PpsEnsemble(ket({1.0, 1.0, 1.0}), ket({1.0, 1i, 1.0})); }

MeterConfig with_k0(double k0) {
    MeterConfig cfg;
    cfg.k0 = k0;
    return cfg;
}

} // namespace

TEST_CASE("initial meter moments") {
    for (const auto& [k0, x0] : {std::pair{0.0, 0.0}, std::pair{0.3, 0.0}, std::pair{0.0, 1.0}}) {
        MeterConfig cfg;
        cfg.k0 = k0;
        cfg.x0 = x0;
        const Meter m = build_meter(cfg);
        const PointerResult r = evolve_and_postselect(pauli_z(), real_ensemble(), m, 0.0);
        CHECK(std::abs(r.mean_x_before - x0) < 1e-8);
        CHECK(std::abs(r.mean_m_before - k0) < 1e-8);
        CHECK(std::abs(r.var_m / 0.25 - 1.0) < 1e-6);
        CHECK(std::abs(expectation(m.momentum_op, m.state) - k0) < 1e-8);
    }
}

TEST_CASE("grid operators") {
    MeterConfig cfg;
    cfg.n_grid = 128;
    const Meter m = build_meter(cfg);
    CHECK(orthonormality_residue(m.fourier) < 1e-12);
    CHECK(hermiticity_residue(m.momentum_op.matrix()) == 0.0);
    const Matrix rebuilt = m.fourier * m.momenta.cast<cplx>().asDiagonal() * m.fourier.adjoint();
    CHECK(max_abs(rebuilt - m.momentum_op.matrix()) < 1e-10);

    const Vector& v = m.state.amplitudes();
    const Vector two_step = translate(m, translate(m, v, 0.7), -1.9);
    CHECK((two_step - translate(m, v, -1.2)).norm() < 1e-12);
    CHECK((translate(m, v, 0.0) - v).norm() < 1e-12);

    // A whole grid step is an exact cyclic shift.
    const double dx = 2 * cfg.half_width / cfg.n_grid;
    const Vector shifted = translate(m, v, dx);
    for (Eigen::Index j = 1; j < v.size(); ++j) CHECK(std::abs(shifted[j] - v[j - 1]) < 1e-12);
}

TEST_CASE("zero coupling leaves the meter untouched") {
    const auto e = qutrit_ensemble();
    const auto r = evolve_and_postselect(diagonal({-1.0, 0.0, 2.0}), e, with_k0(0.3), 0.0);
    CHECK(std::abs(r.p_select - std::norm(e.overlap())) < 1e-12);
    CHECK(std::abs(r.mean_x_after - r.mean_x_before) < 1e-12);
    CHECK(std::abs(r.mean_m_after - r.mean_m_before) < 1e-12);
}

TEST_CASE("eigenstate pre-selection shifts the pointer by g times the eigenvalue") {
    const Observable A = diagonal({-1.0, 0.5, 2.0});
    const Meter m = build_meter(MeterConfig{});
    for (double g : {0.01, 0.3, 1.0}) {
        const PpsEnsemble e(State{0.0, 0.0, 1.0}, ket({1.0, 2.0, 1i}));
        const auto r = evolve_and_postselect(A, e, m, g);
        CHECK(std::abs(r.mean_x_after - r.mean_x_before - 2.0 * g) < 1e-9);
        CHECK(std::abs(r.mean_m_after - r.mean_m_before) < 1e-9);
    }
}

TEST_CASE("selection probabilities over a basis sum to one") {
    Engine rng(77);
    const Meter m = build_meter(with_k0(0.2));
    for (int trial = 0; trial < 10; ++trial) {
        const Observable A = random_hermitian(3, rng);
        const State psi = random_state(3, rng);
        const double g = 0.05 + 0.05 * trial;
        double total = 0.0;
        for (const State& phi : random_basis(3, rng)) total += selection_probability(A, psi, phi, m, g);
        CHECK(std::abs(total - 1.0) < 1e-10);
    }
}

TEST_CASE("real ensemble matches the two-Gaussian closed form") {
    const Meter m = build_meter(MeterConfig{});
    for (double g : {0.01, 0.1, 0.5, 1.0, 2.0}) {
        const auto r = evolve_and_postselect(pauli_z(), real_ensemble(), m, g);
        const double overlap = std::exp(-g * g / 2);
        CHECK(std::abs(r.p_select - (5 - 4 * overlap) / 10) < 1e-10);
        CHECK(std::abs(r.mean_x_after - 3 * g / (5 - 4 * overlap)) < 1e-9);
        CHECK(std::abs(r.mean_m_after) < 1e-9);
    }
}

TEST_CASE("imaginary weak value matches the momentum-space closed form") {
    constexpr double var = 0.25;
    for (double k0 : {0.0, 0.3, -0.7}) {
        const Meter m = build_meter(with_k0(k0));
        for (double g : {0.01, 0.2, 0.8}) {
            const auto r = evolve_and_postselect(pauli_z(), imaginary_ensemble(), m, g);
            const double damp = std::exp(-2 * g * g * var);
            const double s = std::sin(2 * g * k0), c = std::cos(2 * g * k0);
            const double p = 0.5 * (1 - s * damp);
            const double mean_m = (k0 - damp * (k0 * s + 2 * g * var * c)) / (1 - s * damp);
            CHECK(std::abs(r.p_select - p) < 1e-10);
            CHECK(std::abs(r.mean_m_after - mean_m) < 1e-9);
        }
    }
}

TEST_CASE("agrees with dense evolution of the joint system") {
    MeterConfig cfg;
    cfg.n_grid = 64;
    cfg.half_width = 8.0;
    cfg.k0 = 0.4;
    const Meter m = build_meter(cfg);
    Engine rng(13);
    for (int trial = 0; trial < 3; ++trial) {
        const Observable A = random_hermitian(2, rng);
        const State psi = random_state(2, rng);
        const State phi = random_state(2, rng);
        const double g = 0.3 + 0.4 * trial;

        const Observable H = tensor_op(A, m.momentum_op);
        const Matrix& V = H.eigenvectors();
        const Vector phases = (-1i * g * H.spectrum().cast<cplx>()).array().exp();
        const Vector joint =
            V * phases.asDiagonal() * (V.adjoint() * tensor(psi, m.state).amplitudes());
        const Vector dense = contract_first(phi, joint);

        const Vector fast = m.fourier * postselected_meter(A, psi, phi, m, g);
        CHECK((dense - fast).norm() < 1e-10);
    }
}

TEST_CASE("results are insensitive to grid refinement") {
    MeterConfig coarse, fine;
    coarse.k0 = fine.k0 = 0.3;
    fine.n_grid = 1024;
    const Observable A = diagonal({-1.0, 0.0, 2.0});
    for (double g : {0.05, 0.5}) {
        const auto a = evolve_and_postselect(A, qutrit_ensemble(), coarse, g);
        const auto b = evolve_and_postselect(A, qutrit_ensemble(), fine, g);
        CHECK(std::abs(a.p_select - b.p_select) < 1e-8);
        CHECK(std::abs(a.mean_x_after - b.mean_x_after) < 1e-8);
        CHECK(std::abs(a.mean_m_after - b.mean_m_after) < 1e-8);
    }
}

TEST_CASE("simulation does not depend on the eigenbasis of degenerate eigenspaces") {
    Engine rng(31);
    const Meter m = build_meter(with_k0(0.25));
    const std::vector<double> spectrum = {-1.0, 1.5, 1.5, 1.5};
    for (int trial = 0; trial < 5; ++trial) {
        const auto [m1, basis] = with_spectrum(spectrum, rng);
        const Observable A1(m1), A2(rebuild_with_rotated_eigenspaces(spectrum, basis, rng));
        const PpsEnsemble e(random_state(4, rng), random_state(4, rng));
        const auto a = evolve_and_postselect(A1, e, m, 0.4);
        const auto b = evolve_and_postselect(A2, e, m, 0.4);
        CHECK(std::abs(a.p_select - b.p_select) < 1e-9);
        CHECK(std::abs(a.mean_x_after - b.mean_x_after) < 1e-9);
        CHECK(std::abs(a.mean_m_after - b.mean_m_after) < 1e-9);
    }
}

TEST_CASE("first-order checks") {
    SUBCASE("complex weak value converges quadratically") {
        const auto rep = first_order_checks(diagonal({-1.0, 0.0, 2.0}), qutrit_ensemble(),
                                            with_k0(0.3), 0.01);
        CHECK(std::abs(rep.weak_value - cplx(0.4, 0.2)) < 1e-12);
        CHECK_FALSE(rep.x_shift.applicable);
        CHECK(rep.m_shift.ratio == doctest::Approx(4.0).epsilon(0.01));
        CHECK(rep.p_select.ratio == doctest::Approx(4.0).epsilon(0.01));
        CHECK(rep.passed());
    }
    SUBCASE("real ensemble: the x residual is cubic by parity") {
        // Δ⟨X⟩ = 3g/(5 − 4e^{−g²/2}) = 3g − 6g³ + O(g⁵); halving g divides the
        // residual by about 8, outside the [3.5, 4.5] acceptance band.
        const auto rep = first_order_checks(pauli_z(), real_ensemble(), MeterConfig{}, 0.05);
        const double g = 0.05;
        CHECK(rep.x_shift.residual_g ==
              doctest::Approx(std::abs(3 * g / (5 - 4 * std::exp(-g * g / 2)) - 3 * g)).epsilon(1e-6));
        CHECK(rep.x_shift.ratio == doctest::Approx(8.0).epsilon(0.01));
        CHECK_FALSE(rep.x_shift.passed);
        CHECK(rep.m_shift.passed);
        CHECK(rep.p_select.ratio == doctest::Approx(4.0).epsilon(0.01));
        CHECK_FALSE(rep.passed());
    }
    SUBCASE("guard") {
        try {
            first_order_checks(pauli_z(), real_ensemble(), MeterConfig{}, 0.4);
            FAIL("expected GuardViolated");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::GuardViolated);
        }
    }
}

TEST_CASE("meter error paths") {
    auto code_of = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        FAIL("expected an error");
        return ErrorCode::ValidationError;
    };
    for (auto bad : {MeterConfig{100}, MeterConfig{32}, MeterConfig{512, 5.0}, MeterConfig{512, 10.0, 0.0},
                     MeterConfig{512, 10.0, 1.0, 0.0, 4.5}}) {
        CHECK(code_of([&] { build_meter(bad); }) == ErrorCode::ConfigInvalid);
    }
    const Meter m = build_meter(MeterConfig{});
    CHECK(code_of([&] { evolve_and_postselect(pauli_z(), real_ensemble(), m, 3.0); }) ==
          ErrorCode::ConfigInvalid);

    // |⟨φ|ψ⟩|² = 1e-320 underflows the selection probability.
    Vector tiny(2);
    tiny << 1.0, 1e-160;
    const PpsEnsemble e(State(tiny), State{0.0, 1.0}, 0.0);
    CHECK(code_of([&] { evolve_and_postselect(pauli_z(), e, m, 0.0); }) ==
          ErrorCode::ZeroSelectionProbability);
}
