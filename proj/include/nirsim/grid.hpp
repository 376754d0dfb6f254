// Copyright 2026 The nirsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "nirsim/hamiltonian.hpp"

namespace nirsim {

using cplx = std::complex<double>;

/**
 * @brief Uniform N-qubit grid per mode, q_n = delta (n - 2^(N-1)).
 *
 * Mode m occupies bits [N m, N (m + 1)) of the product index; mode 0 is the
 * least significant.
 */
struct GridBasis {
    int qubits_per_mode = 0;
    int num_modes = 0;
    double delta = 0.0;
    std::vector<double> points;

    [[nodiscard]] static GridBasis make(int qubits_per_mode, int num_modes);
    [[nodiscard]] std::size_t mode_dim() const { return std::size_t{1} << qubits_per_mode; }
    [[nodiscard]] std::size_t dim() const {
        return std::size_t{1} << (qubits_per_mode * num_modes);
    }
    /// Grid index of mode m within a product index.
    [[nodiscard]] std::size_t digit(std::size_t index, int mode) const {
        return (index >> (qubits_per_mode * mode)) & (mode_dim() - 1);
    }
};

/// Amplitudes over the product grid with value semantics.
struct StateVector {
    Eigen::VectorXcd amps;
    GridBasis basis;
    bool normalized = true;

    [[nodiscard]] double norm() const { return amps.norm(); }
};

/// Largest M N for which full product-space vectors are allocated.
inline constexpr int kMaxStateQubits = 24;

/// Throws SizeGuardError when the product space exceeds the given qubit count.
void require_size(const GridBasis &basis, int max_qubits, const char *what);

/// q on one mode broadcast over the product space.
[[nodiscard]] Eigen::VectorXd position_diagonal(const GridBasis &basis, int mode);

/**
 * @brief Centered DFT on one mode, F[j, n] = exp(-2 pi i (j - G/2)(n - G/2) / G) / sqrt(G).
 *
 * Maps position amplitudes to momentum amplitudes on the same delta grid,
 * with p = -i d/dq.
 */
[[nodiscard]] Eigen::MatrixXcd centered_dft_matrix(int qubits);

/// Applies a mode_dim x mode_dim matrix to one mode axis in place.
void apply_mode_matrix(Eigen::VectorXcd &amps, const GridBasis &basis, int mode,
                       const Eigen::MatrixXcd &op);

/// Q_M on the listed modes, or its adjoint.
[[nodiscard]] StateVector shifted_dft(const StateVector &state, const std::vector<int> &modes,
                                      bool inverse = false);
/// Q_M on every mode, in place.
void shifted_dft_all(Eigen::VectorXcd &amps, const GridBasis &basis, bool inverse);

/// <psi| prod q_a |psi>, or prod p_a when momentum is set.
[[nodiscard]] cplx operator_moment(const StateVector &state, const Monomial &modes,
                                   bool momentum = false);

/// Dense single-mode p on the position grid.
[[nodiscard]] Eigen::MatrixXcd momentum_matrix(int qubits);

/**
 * @brief Diagonal fragments of H on the grid.
 *
 * v is V(q) in the position basis, t is sum K_ij p_i p_j in the momentum basis
 * reached by shifted_dft_all.
 */
struct GridOperators {
    GridBasis basis;
    Eigen::VectorXd v;
    Eigen::VectorXd t;

    [[nodiscard]] static GridOperators build(const TaylorHamiltonian &ham,
                                             const GridBasis &basis);
    void apply_v(const Eigen::VectorXcd &in, Eigen::VectorXcd &out) const;
    void apply_t(const Eigen::VectorXcd &in, Eigen::VectorXcd &out) const;
    [[nodiscard]] Eigen::VectorXcd apply_h(const Eigen::VectorXcd &in) const;
};

[[nodiscard]] Eigen::VectorXd potential_diagonal(const TaylorHamiltonian &ham,
                                                 const GridBasis &basis);
[[nodiscard]] Eigen::VectorXd kinetic_diagonal(const TaylorHamiltonian &ham,
                                               const GridBasis &basis);

} // namespace nirsim
