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

#include <vector>

#include <Eigen/Dense>

#include "nirsim/grid.hpp"
#include "nirsim/hamiltonian.hpp"

namespace nirsim {

struct VscfOptions {
    double tolerance = 1e-10;
    int max_iterations = 200;
};

/**
 * @brief Ground-state mean-field modals on the grid.
 *
 * modals[m] holds the eigenvectors of the converged one-mode effective
 * Hamiltonian as columns, ordered by energies[m] ascending.
 */
struct VscfSolution {
    GridBasis basis;
    std::vector<Eigen::MatrixXcd> modals;
    std::vector<Eigen::VectorXd> energies;
    double e0 = 0.0;
    std::vector<double> trace;
    int iterations = 0;
    bool monotonic = true;

    /// Sum of per-mode modal excitation energies of a product state.
    [[nodiscard]] double excitation_energy(const std::vector<int> &indices) const;
};

struct ProductState {
    std::vector<int> indices;
    cplx amplitude{1.0, 0.0};
    double omega = 0.0;
};

[[nodiscard]] VscfSolution solve_vscf(const TaylorHamiltonian &ham, const GridBasis &basis,
                                      const VscfOptions &opts = {});

/// Product excitations with lo <= omega <= hi and at most max_quanta total quanta.
[[nodiscard]] std::vector<ProductState> vscf_excitations(const VscfSolution &sol, double lo,
                                                         double hi, int max_quanta = 6);

/// Amplitudes of the product state on the grid.
[[nodiscard]] StateVector product_state_vector(const VscfSolution &sol,
                                               const std::vector<int> &indices);

/// Coefficients in the full modal product basis, and back.
[[nodiscard]] Eigen::VectorXcd to_modal_basis(const VscfSolution &sol,
                                              const Eigen::VectorXcd &amps);
[[nodiscard]] Eigen::VectorXcd from_modal_basis(const VscfSolution &sol,
                                                const Eigen::VectorXcd &coeffs);

/// Modal indices of a product-basis position.
[[nodiscard]] std::vector<int> modal_indices(const GridBasis &basis, std::size_t index);

} // namespace nirsim
