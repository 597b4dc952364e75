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

// Dense complex linear algebra for small finite-dimensional Hilbert spaces:
// normalized states, Hermitian observables with a cached spectral
// decomposition, tensor products and seeded random sampling.
//
// Everything is templated on the real scalar type; `State`, `Observable`
// etc. are the double-precision aliases used throughout the project.
// Tensor products use system-major ordering: index = i_sys * dim_b + j_b.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "weakval/errors.hpp"

namespace weakval {

template <typename Real> using Complex = std::complex<Real>;
template <typename Real> using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real> using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Tolerance tiers: representation error, single-operation identities,
/// multi-operation physical properties.
namespace tol {
inline constexpr double construction = 1e-12;
inline constexpr double identity = 1e-10;
inline constexpr double physical = 1e-8;
} // namespace tol

struct RngSeed {
    std::uint64_t value = 0;
};

/// SplitMix64 step; used to derive independent per-trial seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where) {
    if (a != b) {
        throw Error(ErrorCode::DimensionMismatch, std::string(where) + ": dimension " +
                                                      std::to_string(a) + " vs " +
                                                      std::to_string(b));
    }
}

// ---------------------------------------------------------------------------
// State

/// A normalized pure state. Amplitudes are stored as given (no phase fixing);
/// construction requires |‖v‖² − 1| ≤ 1e-12.
template <typename Real> class BasicState {
public:
    using Scalar = Complex<Real>;
    using Vector = CVector<Real>;

    explicit BasicState(Vector amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.size() < 2) {
            throw Error(ErrorCode::InvalidDimension,
                        "state dimension must be at least 2, got " + std::to_string(amps_.size()));
        }
        const Real norm2 = amps_.squaredNorm();
        if (!(std::abs(norm2 - Real(1)) <= Real(tol::construction))) {
            throw Error(ErrorCode::NotNormalized,
                        "squared norm deviates from 1 by " + std::to_string(double(norm2 - 1)));
        }
    }

    BasicState(std::initializer_list<Scalar> amplitudes)
        : BasicState(Vector(Eigen::Map<const Vector>(amplitudes.begin(),
                                                     Eigen::Index(amplitudes.size())))) {}

    /// Rescales `v` to unit norm. Throws InvalidDimension for a null vector.
    static BasicState normalize(const Vector& v) {
        const Real norm = v.norm();
        if (!(norm > Real(0)) || !std::isfinite(double(norm))) {
            throw Error(ErrorCode::InvalidDimension, "cannot normalize a null or non-finite vector");
        }
        return BasicState(Vector(v / norm));
    }

    Eigen::Index dim() const { return amps_.size(); }
    const Vector& amplitudes() const { return amps_; }
    Scalar operator[](Eigen::Index k) const { return amps_[k]; }

private:
    Vector amps_;
};

// ---------------------------------------------------------------------------
// Observable

template <typename Real> struct Eigensystem {
    RVector<Real> spectrum;       // ascending
    CMatrix<Real> eigenvectors;   // column k pairs with spectrum[k]
};

template <typename Derived>
auto hermiticity_residue(const Eigen::MatrixBase<Derived>& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Hermitian matrix with a cached eigendecomposition.
template <typename Real> class BasicObservable {
public:
    using Matrix = CMatrix<Real>;

    explicit BasicObservable(Matrix matrix) : matrix_(std::move(matrix)) {
        validate_matrix();
        Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_);
        if (solver.info() != Eigen::Success) {
            throw Error(ErrorCode::ConvergenceFailure, "Hermitian eigensolver did not converge");
        }
        spectrum_ = solver.eigenvalues();
        eigenvectors_ = solver.eigenvectors();
    }

    /// Builds an observable whose eigenpairs are already known (e.g. the
    /// Fourier-diagonal meter momentum). The matrix is checked for
    /// Hermiticity and the spectrum for ordering; the eigenpairs are trusted.
    static BasicObservable from_spectral(Matrix matrix, RVector<Real> spectrum,
                                         Matrix eigenvectors) {
        BasicObservable out;
        out.matrix_ = std::move(matrix);
        out.validate_matrix();
        if (spectrum.size() != out.matrix_.rows() || eigenvectors.rows() != out.matrix_.rows() ||
            eigenvectors.cols() != out.matrix_.rows()) {
            throw Error(ErrorCode::DimensionMismatch, "spectral data does not match matrix size");
        }
        if (!std::is_sorted(spectrum.data(), spectrum.data() + spectrum.size())) {
            throw Error(ErrorCode::ValidationError, "spectrum must be sorted ascending");
        }
        out.spectrum_ = std::move(spectrum);
        out.eigenvectors_ = std::move(eigenvectors);
        return out;
    }

    Eigen::Index dim() const { return matrix_.rows(); }
    const Matrix& matrix() const { return matrix_; }
    const RVector<Real>& spectrum() const { return spectrum_; }
    const Matrix& eigenvectors() const { return eigenvectors_; }
    Real lambda_min() const { return spectrum_[0]; }
    Real lambda_max() const { return spectrum_[spectrum_.size() - 1]; }
    Real spectral_radius() const { return std::max(std::abs(lambda_min()), std::abs(lambda_max())); }

private:
    BasicObservable() = default;

    void validate_matrix() const {
        if (matrix_.rows() != matrix_.cols()) {
            throw Error(ErrorCode::DimensionMismatch, "observable matrix must be square");
        }
        if (matrix_.rows() < 2) {
            throw Error(ErrorCode::InvalidDimension, "observable dimension must be at least 2");
        }
        if (!matrix_.allFinite()) {
            throw Error(ErrorCode::HermiticityViolation, "observable has non-finite entries");
        }
        const Real residue = hermiticity_residue(matrix_);
        if (!(residue < Real(tol::construction))) {
            throw Error(ErrorCode::HermiticityViolation,
                        "max |A_jk - conj(A_kj)| = " + std::to_string(double(residue)));
        }
    }

    Matrix matrix_;
    RVector<Real> spectrum_;
    Matrix eigenvectors_;
};

using State = BasicState<double>;
using Observable = BasicObservable<double>;
using Vector = CVector<double>;
using Matrix = CMatrix<double>;
using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Core operations

/// ⟨a|b⟩, conjugate-linear in the first argument.
template <typename Real>
Complex<Real> inner(const BasicState<Real>& a, const BasicState<Real>& b) {
    require_same_dim(a.dim(), b.dim(), "inner");
    return a.amplitudes().dot(b.amplitudes());
}

template <typename Real>
Real expectation(const BasicObservable<Real>& A, const BasicState<Real>& psi) {
    require_same_dim(A.dim(), psi.dim(), "expectation");
    const Complex<Real> value = psi.amplitudes().dot(A.matrix() * psi.amplitudes());
    if (!(std::abs(value.imag()) < Real(tol::identity))) {
        throw Error(ErrorCode::HermiticityViolation,
                    "expectation has imaginary residue " + std::to_string(double(value.imag())));
    }
    return value.real();
}

/// ΔA = ‖(A − ⟨A⟩)ψ‖, i.e. sqrt⟨ψ|(A − ⟨A⟩)²|ψ⟩ evaluated without the
/// cancellation of ⟨A²⟩ − ⟨A⟩².
template <typename Real>
Real uncertainty(const BasicObservable<Real>& A, const BasicState<Real>& psi) {
    const Real mean = expectation(A, psi);
    const Real spread = (A.matrix() * psi.amplitudes() - mean * psi.amplitudes()).norm();
    if (!std::isfinite(double(spread))) {
        throw Error(ErrorCode::NegativeVariance, "variance is not a finite non-negative number");
    }
    return spread;
}

template <typename Real> Eigensystem<Real> eig(const BasicObservable<Real>& A) {
    return {A.spectrum(), A.eigenvectors()};
}

/// AB − BA (anti-Hermitian).
template <typename Real>
CMatrix<Real> commutator(const BasicObservable<Real>& A, const BasicObservable<Real>& B) {
    require_same_dim(A.dim(), B.dim(), "commutator");
    return A.matrix() * B.matrix() - B.matrix() * A.matrix();
}

template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                               a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

template <typename Real>
BasicState<Real> tensor(const BasicState<Real>& a, const BasicState<Real>& b) {
    return BasicState<Real>(CVector<Real>(kron(a.amplitudes(), b.amplitudes())));
}

template <typename Real>
BasicObservable<Real> tensor_op(const BasicObservable<Real>& A, const BasicObservable<Real>& B) {
    return BasicObservable<Real>(CMatrix<Real>(kron(A.matrix(), B.matrix())));
}

/// (⟨phi| ⊗ I)|joint⟩ for a system-major joint vector; the result is the
/// unnormalized conditional state of the second factor.
template <typename Real>
CVector<Real> contract_first(const BasicState<Real>& phi, const CVector<Real>& joint) {
    const Eigen::Index d = phi.dim();
    if (joint.size() % d != 0) {
        throw Error(ErrorCode::DimensionMismatch, "joint dimension is not a multiple of " +
                                                      std::to_string(d));
    }
    const Eigen::Index rest = joint.size() / d;
    CVector<Real> out = CVector<Real>::Zero(rest);
    for (Eigen::Index i = 0; i < d; ++i) {
        out += std::conj(phi[i]) * joint.segment(i * rest, rest);
    }
    return out;
}

/// (I ⊗ ⟨b|)|joint⟩ for a system-major joint vector.
template <typename Real>
CVector<Real> contract_second(const CVector<Real>& joint, const BasicState<Real>& b) {
    const Eigen::Index rest = b.dim();
    if (joint.size() % rest != 0) {
        throw Error(ErrorCode::DimensionMismatch, "joint dimension is not a multiple of " +
                                                      std::to_string(rest));
    }
    const Eigen::Index d = joint.size() / rest;
    CVector<Real> out(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        out[i] = b.amplitudes().dot(joint.segment(i * rest, rest));
    }
    return out;
}

/// Equality up to a global phase: |⟨a|b⟩| = 1 within `tolerance`.
template <typename Real>
bool equal_up_to_phase(const BasicState<Real>& a, const BasicState<Real>& b,
                       Real tolerance = Real(tol::identity)) {
    return a.dim() == b.dim() && std::abs(std::abs(inner(a, b)) - Real(1)) <= tolerance;
}

/// Orthonormality residue max_jk |⟨v_j|v_k⟩ − δ_jk| of the columns of `v`.
template <typename Derived> auto orthonormality_residue(const Eigen::MatrixBase<Derived>& v) {
    using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Matrix gram = v.adjoint() * v;
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Random sampling
//
// mt19937_64 plus std::normal_distribution: bit-identical for a given seed
// with a given standard library.

using Engine = std::mt19937_64;

inline Engine make_engine(RngSeed seed) { return Engine(seed.value); }

template <typename Real> CMatrix<Real> complex_gaussian(Eigen::Index rows, Eigen::Index cols,
                                                        Engine& rng) {
    std::normal_distribution<Real> normal(Real(0), Real(1));
    CMatrix<Real> g(rows, cols);
    // Column-major fill keeps the draw order fixed.
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const Real re = normal(rng);
            const Real im = normal(rng);
            g(i, j) = Complex<Real>(re, im);
        }
    }
    return g;
}

inline void require_random_dim(Eigen::Index dim) {
    if (dim < 2) {
        throw Error(ErrorCode::InvalidDimension, "random sampling needs dim >= 2, got " +
                                                     std::to_string(dim));
    }
}

/// Haar-uniform pure state: normalized i.i.d. complex Gaussian vector.
template <typename Real = double> BasicState<Real> random_state(Eigen::Index dim, Engine& rng) {
    require_random_dim(dim);
    return BasicState<Real>::normalize(CVector<Real>(complex_gaussian<Real>(dim, 1, rng)));
}

template <typename Real = double> BasicState<Real> random_state(Eigen::Index dim, RngSeed seed) {
    Engine rng = make_engine(seed);
    return random_state<Real>(dim, rng);
}

/// GUE-style Hermitian matrix (G + G†)/2.
template <typename Real = double>
BasicObservable<Real> random_hermitian(Eigen::Index dim, Engine& rng) {
    require_random_dim(dim);
    const CMatrix<Real> g = complex_gaussian<Real>(dim, dim, rng);
    return BasicObservable<Real>(CMatrix<Real>((g + g.adjoint()) / Real(2)));
}

template <typename Real = double>
BasicObservable<Real> random_hermitian(Eigen::Index dim, RngSeed seed) {
    Engine rng = make_engine(seed);
    return random_hermitian<Real>(dim, rng);
}

/// Haar unitary from the QR decomposition of a complex Ginibre matrix, with
/// the phases of R's diagonal moved into Q.
template <typename Real = double> CMatrix<Real> random_unitary(Eigen::Index dim, Engine& rng) {
    require_random_dim(dim);
    const CMatrix<Real> g = complex_gaussian<Real>(dim, dim, rng);
    Eigen::HouseholderQR<CMatrix<Real>> qr(g);
    CMatrix<Real> q = qr.householderQ();
    const CMatrix<Real> r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < dim; ++k) {
        const Real mag = std::abs(r(k, k));
        if (mag > Real(0)) {
            q.col(k) *= r(k, k) / mag;
        }
    }
    return q;
}

/// Columns of a Haar unitary as a list of states.
template <typename Real = double>
std::vector<BasicState<Real>> random_basis(Eigen::Index dim, Engine& rng) {
    const CMatrix<Real> u = random_unitary<Real>(dim, rng);
    std::vector<BasicState<Real>> basis;
    basis.reserve(std::size_t(dim));
    for (Eigen::Index k = 0; k < dim; ++k) {
        basis.emplace_back(CVector<Real>(u.col(k)));
    }
    return basis;
}

template <typename Real = double>
std::vector<BasicState<Real>> computational_basis(Eigen::Index dim) {
    std::vector<BasicState<Real>> basis;
    for (Eigen::Index k = 0; k < dim; ++k) {
        basis.emplace_back(CVector<Real>(CVector<Real>::Unit(dim, k)));
    }
    return basis;
}

template <typename Real>
std::vector<BasicState<Real>> eigenbasis(const BasicObservable<Real>& A) {
    std::vector<BasicState<Real>> basis;
    for (Eigen::Index k = 0; k < A.dim(); ++k) {
        basis.emplace_back(BasicState<Real>::normalize(CVector<Real>(A.eigenvectors().col(k))));
    }
    return basis;
}

} // namespace weakval
