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

#include <doctest.h>

#include "helpers.hpp"
#include "weakval/hilbert.hpp"

using namespace weakval;
using namespace weakval::testing;

TEST_CASE("inner product") {
    const State e0{1.0, 0.0};
    const State e1{0.0, 1.0};
    CHECK(std::abs(inner(e0, e0) - 1.0) == 0.0);
    CHECK(std::abs(inner(e0, e1)) == 0.0);

    // (1/√2)(1,1) against (1/√5)(2,−1): (2 − 1)/√10
    const cplx v = inner(ket({1.0, 1.0}), ket({2.0, -1.0}));
    CHECK(v.real() == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-14));
    CHECK(std::abs(v.imag()) < 1e-15);

    Engine rng(3);
    const State a = random_state(4, rng);
    const State b = random_state(4, rng);
    CHECK(std::abs(inner(a, b) - std::conj(inner(b, a))) < 1e-15);

    CHECK_THROWS_AS(inner(e0, ket({1.0, 0.0, 0.0})), Error);
}

TEST_CASE("state construction enforces normalization and dimension") {
    Vector v(2);
    v << 1.0, 1.0;
    CHECK_THROWS_AS(State{v}, Error);
    try {
        State{v};
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotNormalized);
    }
    CHECK(std::abs(State::normalize(v).amplitudes().squaredNorm() - 1.0) < 1e-15);

    Vector one(1);
    one << 1.0;
    CHECK_THROWS_AS(State{one}, Error);
    CHECK_THROWS_AS(State::normalize(Vector::Zero(3)), Error);
}

TEST_CASE("expectation") {
    CHECK(expectation(pauli_z(), State{1.0, 0.0}) == 1.0);
    CHECK(std::abs(expectation(pauli_z(), ket({1.0, 1.0}))) < 1e-15);
    // σ_x on (2,1)/√5: 2·(2·1)/5
    CHECK(expectation(pauli_x(), ket({2.0, 1.0})) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK_THROWS_AS(expectation(pauli_x(), ket({1.0, 0.0, 0.0})), Error);
}

TEST_CASE("uncertainty") {
    CHECK(uncertainty(pauli_z(), State{1.0, 0.0}) == 0.0);
    CHECK(uncertainty(pauli_z(), ket({1.0, 1.0})) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(uncertainty(pauli_x(), State{1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("uncertainty vanishes exactly on eigenvectors") {
    Engine rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Observable A = random_hermitian(5, rng);
        const State v = State::normalize(Vector(A.eigenvectors().col(trial % 5)));
        CHECK(uncertainty(A, v) < 1e-8);

        const State psi = random_state(5, rng);
        const double mean = expectation(A, psi);
        const double residual = (A.matrix() * psi.amplitudes() - mean * psi.amplitudes()).norm();
        CHECK((uncertainty(A, psi) < 1e-8) == (residual < 1e-8));
    }
}

TEST_CASE("eigendecomposition") {
    const auto z = eig(pauli_z());
    CHECK(z.spectrum[0] == doctest::Approx(-1.0));
    CHECK(z.spectrum[1] == doctest::Approx(1.0));
    const auto x = eig(pauli_x());
    CHECK(x.spectrum[0] == doctest::Approx(-1.0));
    CHECK(x.spectrum[1] == doctest::Approx(1.0));

    const Observable D = diagonal({2.0, 5.0, 5.0});
    CHECK(D.spectrum()[0] == doctest::Approx(2.0));
    CHECK(D.spectrum()[1] == doctest::Approx(5.0));
    CHECK(D.spectrum()[2] == doctest::Approx(5.0));
    CHECK(orthonormality_residue(D.eigenvectors()) < 1e-10);

    Engine rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const Observable A = random_hermitian(2 + trial % 7, rng);
        const Matrix rebuilt =
            A.eigenvectors() * A.spectrum().cast<cplx>().asDiagonal() * A.eigenvectors().adjoint();
        CHECK(max_abs(A.matrix() - rebuilt) < 1e-10);
        CHECK(orthonormality_residue(A.eigenvectors()) < 1e-10);
        for (Eigen::Index k = 1; k < A.dim(); ++k) CHECK(A.spectrum()[k - 1] <= A.spectrum()[k]);
    }
}

TEST_CASE("non-Hermitian input is rejected") {
    Matrix m(2, 2);
    m << 1.0, 2.0, 0.0, 1.0;
    try {
        Observable{m};
        FAIL("expected HermiticityViolation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HermiticityViolation);
    }
}

TEST_CASE("commutator") {
    const Matrix xy = commutator(pauli_x(), pauli_y());
    CHECK(max_abs(xy - 2.0i * pauli_z().matrix()) < 1e-15);
    CHECK(max_abs(commutator(pauli_z(), pauli_z())) == 0.0);
    CHECK(max_abs(commutator(diagonal({1.0, 2.0}), pauli_z())) == 0.0);

    Engine rng(8);
    const Observable A = random_hermitian(6, rng);
    const Observable B = random_hermitian(6, rng);
    const Matrix c = commutator(A, B);
    CHECK(max_abs(c + c.adjoint()) < 1e-12);
    CHECK_THROWS_AS(commutator(A, pauli_x()), Error);
}

TEST_CASE("tensor products use system-major ordering") {
    const State p = tensor(State{1.0, 0.0}, State{0.0, 1.0});
    CHECK(p.dim() == 4);
    CHECK(p[1] == cplx(1.0));
    CHECK(std::abs(p[0]) + std::abs(p[2]) + std::abs(p[3]) == 0.0);

    const Matrix zi = tensor_op(pauli_z(), diagonal({1.0, 1.0})).matrix();
    Matrix expected = Matrix::Zero(4, 4);
    expected.diagonal() << 1.0, 1.0, -1.0, -1.0;
    CHECK(max_abs(zi - expected) == 0.0);

    const State plus0 = tensor(ket({1.0, 1.0}), State{1.0, 0.0});
    CHECK(std::abs(plus0[0] - kInvSqrt2) < 1e-16);
    CHECK(std::abs(plus0[2] - kInvSqrt2) < 1e-16);
    CHECK(std::abs(plus0[1]) + std::abs(plus0[3]) == 0.0);
}

TEST_CASE("contracting the second factor recovers the first up to phase") {
    Engine rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const State a = random_state(3, rng);
        const State b = random_state(4, rng);
        const Vector joint = tensor(a, b).amplitudes();
        const State marginal = State::normalize(contract_second(joint, b));
        CHECK(equal_up_to_phase(marginal, a));
        const State other = State::normalize(contract_first(a, joint));
        CHECK(equal_up_to_phase(other, b));
    }
}

TEST_CASE("random sampling is deterministic and well formed") {
    const State a = random_state(2, RngSeed{7});
    const State b = random_state(2, RngSeed{7});
    CHECK((a.amplitudes().array() == b.amplitudes().array()).all());
    CHECK_FALSE((random_state(2, RngSeed{8}).amplitudes().array() == a.amplitudes().array()).all());

    for (std::uint64_t s = 0; s < 20; ++s) {
        CHECK(hermiticity_residue(random_hermitian(4, RngSeed{s}).matrix()) < 1e-14);
    }
    CHECK_THROWS_AS(random_state(1, RngSeed{1}), Error);
    CHECK_THROWS_AS(random_hermitian(0, RngSeed{1}), Error);

    Engine rng(4);
    CHECK(orthonormality_residue(random_unitary(6, rng)) < 1e-12);
}

TEST_CASE("Haar states put half the weight on a fixed basis vector on average") {
    // Monte Carlo oracle: E|⟨e_0|ψ⟩|² = 1/d for Haar-random ψ.
    double sum = 0.0;
    constexpr int kSamples = 100000;
    for (int s = 0; s < kSamples; ++s) {
        sum += std::norm(random_state(2, RngSeed{std::uint64_t(s)})[0]);
    }
    CHECK(std::abs(sum / kSamples - 0.5) < 0.01);
}

TEST_CASE("observable invariants hold for random inputs") {
    Engine rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::Index d = 2 + trial % 7;
        const Observable A = random_hermitian(d, rng);
        const State a = random_state(d, rng);
        const State b = random_state(d, rng);
        CHECK(std::abs(inner(a, b)) <= 1.0 + 1e-12);
        const double mean = expectation(A, a);
        CHECK(mean >= A.lambda_min() - 1e-10);
        CHECK(mean <= A.lambda_max() + 1e-10);
    }
}

TEST_CASE("long double instantiation") {
    using StateL = BasicState<long double>;
    using ObservableL = BasicObservable<long double>;
    CMatrix<long double> m(2, 2);
    m << 1.0L, 0.0L, 0.0L, -1.0L;
    const ObservableL z(m);
    const auto psi = StateL::normalize(CVector<long double>::Ones(2));
    CHECK(std::abs(expectation(z, psi)) < 1e-18L);
    CHECK(std::abs(uncertainty(z, psi) - 1.0L) < 1e-18L);
}
