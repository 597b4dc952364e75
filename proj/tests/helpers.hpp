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

#pragma once

#include <cmath>
#include <complex>

#include "weakval/hilbert.hpp"

namespace weakval::testing {

using namespace std::complex_literals;

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
inline const double kInvSqrt5 = 1.0 / std::sqrt(5.0);

inline Observable pauli_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return Observable(m);
}

inline Observable pauli_y() {
    Matrix m(2, 2);
    m << 0.0, -1i, 1i, 0.0;
    return Observable(m);
}

inline Observable pauli_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return Observable(m);
}

inline Observable diagonal(std::initializer_list<double> values) {
    Vector d(Eigen::Index(values.size()));
    Eigen::Index k = 0;
    for (double v : values) d[k++] = v;
    return Observable(Matrix(d.asDiagonal()));
}

/// Unnormalized amplitudes in, normalized state out.
inline State ket(std::initializer_list<cplx> amplitudes) {
    Vector v(Eigen::Index(amplitudes.size()));
    Eigen::Index k = 0;
    for (auto a : amplitudes) v[k++] = a;
    return State::normalize(v);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Hermitian matrix with prescribed spectrum (repeated values give
/// degenerate eigenspaces) in a Haar-random eigenbasis. Returns the matrix
/// and the eigenbasis used.
inline std::pair<Matrix, Matrix> with_spectrum(const std::vector<double>& spectrum, Engine& rng) {
    const auto d = Eigen::Index(spectrum.size());
    const Matrix u = random_unitary(d, rng);
    Vector lam(d);
    for (Eigen::Index k = 0; k < d; ++k) lam[k] = spectrum[std::size_t(k)];
    Matrix m = u * lam.asDiagonal() * u.adjoint();
    m = ((m + m.adjoint()) / 2.0).eval();
    return {m, u};
}

/// Same operator rebuilt from a different orthonormal basis of each
/// degenerate eigenspace (eigenvectors of equal eigenvalues mixed by a random
/// unitary).
inline Matrix rebuild_with_rotated_eigenspaces(const std::vector<double>& spectrum,
                                               const Matrix& basis, Engine& rng) {
    const auto d = Eigen::Index(spectrum.size());
    Matrix rotated = basis;
    Eigen::Index start = 0;
    while (start < d) {
        Eigen::Index stop = start + 1;
        while (stop < d && spectrum[std::size_t(stop)] == spectrum[std::size_t(start)]) ++stop;
        const Eigen::Index block = stop - start;
        if (block >= 2) {
            rotated.middleCols(start, block) = basis.middleCols(start, block) *
                                               random_unitary(block, rng);
        }
        start = stop;
    }
    Vector lam(d);
    for (Eigen::Index k = 0; k < d; ++k) lam[k] = spectrum[std::size_t(k)];
    Matrix m = rotated * lam.asDiagonal() * rotated.adjoint();
    return ((m + m.adjoint()) / 2.0).eval();
}

} // namespace weakval::testing
