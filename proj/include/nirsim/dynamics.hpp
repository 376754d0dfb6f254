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

#include <array>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "nirsim/grid.hpp"
#include "nirsim/hamiltonian.hpp"
#include "nirsim/vscf.hpp"

namespace nirsim {

/// Qubit limit for dense matrices.
inline constexpr int kMaxDenseQubits = 14;

/// Hermitian H on the product grid, assembled column by column.
[[nodiscard]] Eigen::MatrixXcd dense_hamiltonian(const TaylorHamiltonian &ham,
                                                 const GridBasis &basis);

struct DenseSpectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
};

[[nodiscard]] DenseSpectrum exact_diagonalize(const TaylorHamiltonian &ham,
                                              const GridBasis &basis);

/// exp(-i H t) psi through the eigendecomposition.
[[nodiscard]] Eigen::VectorXcd dense_propagate(const DenseSpectrum &spec,
                                               const Eigen::VectorXcd &psi, double t);

/**
 * @brief Fixed-point copy of the Hamiltonian coefficients.
 *
 * Each degree, and the kinetic matrix as its own group, is rounded to a
 * multiple of scale * 2^(1 - b_k). Phases are rounded to multiples of
 * 2^(1 - b_r) rad. b_k = 0 or b_r = 0 disables the respective rounding.
 */
struct QuantizedCoefficients {
    TaylorHamiltonian ham;
    int b_k = 0;
    int b_r = 0;
    std::array<double, 5> scale{};
    double kinetic_scale = 0.0;
    /// Largest |rounded - exact| / scale over all coefficients.
    double max_relative_error = 0.0;

    [[nodiscard]] double phase_step() const;
    [[nodiscard]] double max_phase_error() const { return 0.5 * phase_step(); }
};

[[nodiscard]] QuantizedCoefficients quantize(const TaylorHamiltonian &ham, int b_k, int b_r);
[[nodiscard]] QuantizedCoefficients unquantized(const TaylorHamiltonian &ham);

/// Rounds theta to the nearest multiple of step (no-op for step 0).
[[nodiscard]] double round_phase(double theta, double step);

/**
 * @brief Second-order split step [e^{-iV s/2} Q^dag e^{-iT s} Q e^{-iV s/2}].
 *
 * The energy offset is subtracted from V before exponentiation.
 */
class TrotterPropagator {
  public:
    TrotterPropagator(const GridOperators &ops, double step, double phase_step,
                      double energy_offset = 0.0);
    void apply(Eigen::VectorXcd &amps, long long steps) const;
    [[nodiscard]] double step() const { return step_; }

  private:
    GridBasis basis_;
    double step_;
    Eigen::VectorXcd half_v_;
    Eigen::VectorXcd full_t_;
};

/// [U_2(t / r)]^r applied to the state, using the quantized coefficients.
[[nodiscard]] StateVector trotter_oracle(const StateVector &state,
                                         const QuantizedCoefficients &quantized, double t,
                                         long long r);

/**
 * @brief <psi| E_2 |psi> with E_2 = (2 [T,[T,V]] + [V,[T,V]]) / 24.
 *
 * One split step of length s has effective Hamiltonian H - s^2 E_2 + O(s^4).
 */
[[nodiscard]] cplx error_operator_expectation_complex(const GridOperators &ops,
                                                      const Eigen::VectorXcd &psi);
[[nodiscard]] double error_operator_expectation(const GridOperators &ops,
                                                const StateVector &state);

struct PlanEntry {
    int component = 0;
    std::vector<int> indices;
    double weight = 0.0;
    double e2 = 0.0;
    double tau = std::numeric_limits<double>::infinity();
};

struct TrotterPlan {
    double step_time = std::numeric_limits<double>::infinity();
    long long steps_per_unit = 1;
    double epsilon_nu = 0.0;
    double delta_t = 0.0;
    std::array<double, 3> component_tau{};
    std::vector<PlanEntry> entries;
};

struct PlanOptions {
    /// Retained states cover at least this fraction of the weight.
    double coverage = 0.99;
};

/**
 * @brief Perturbative step size from per-state error estimates.
 *
 * tau_j = sqrt(eps / |<E_j|E_2|E_j>|) over the dominant VSCF product states
 * of each active component; r = ceil((2 pi / Omega) / tau).
 */
[[nodiscard]] TrotterPlan trotter_plan(const GridOperators &ops, const VscfSolution &sol,
                                       const std::array<StateVector, 3> &components,
                                       const std::array<bool, 3> &active, double epsilon_nu,
                                       double omega, const PlanOptions &opts = {});

} // namespace nirsim
