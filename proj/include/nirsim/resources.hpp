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

#include <string>
#include <vector>

#include "nirsim/dynamics.hpp"
#include "nirsim/hamiltonian.hpp"
#include "nirsim/spectroscopy.hpp"

namespace nirsim {

/// Fault-tolerant cost parameters.
struct CostModel {
    int qubits_per_mode = 4;
    int b_k = 10;
    int b_r = 25;
    double blocks_per_tgate = 10.0;
    double zeta = 1.49;
    double double_phase_factor = 0.5;
    /// T gates per controlled-phase rotation inside one shifted DFT.
    double qft_rotation_t = 50.0;
    bool caching = true;
    bool double_phase = true;
    bool double_measurement = true;
    /// One resource state shared by all Taylor degrees instead of D - 1.
    bool single_resource_state = false;

    /// Out-of-place addition of b bits into the phase-gradient register.
    [[nodiscard]] double adder_cost(int bits) const { return 4.0 * (bits - 1); }
    void validate() const;
};

[[nodiscard]] long long mult_cost(long long a, long long b);

struct StepCost {
    double t_gates = 0.0;
    /// Register products for one V application.
    long long v_products = 0;
    /// Register products per step, both V halves and the kinetic terms.
    long long mults = 0;
    long long coefficient_mults = 0;
    long long adds = 0;
    double v_application_t = 0.0;
    double kinetic_t = 0.0;
    double qft_t = 0.0;
};

[[nodiscard]] StepCost trotter_step_cost(const TaylorHamiltonian &ham, const CostModel &model);

struct ResourceEstimate {
    long long r = 1;
    double step_t = 0.0;
    double max_t = 0.0;
    double total_t = 0.0;
    double total_shots = 0.0;
};

/**
 * @brief Circuit totals for the windowed workflow.
 *
 * max = step r k_max f and total = 3 sum_k 2 N_k step r k f / zeta, with
 * f the double-phase factor.
 */
[[nodiscard]] ResourceEstimate workflow_cost(const StepCost &step, long long r,
                                             const WindowConfig &window,
                                             const ShotLedger &ledger, const CostModel &model);

/// Active-volume runtime in seconds for a T count.
[[nodiscard]] double active_volume_runtime(double t_gates, int qubit_budget, double clock_hz,
                                           int logical_qubits, const CostModel &model);

struct QubitAccounting {
    int system = 0;
    int hadamard = 1;
    /// Five b_k registers plus one b_r resource state.
    int ancilla_registers = 0;
    /// Intermediate N d registers, coefficient, product and resource states.
    int ancilla_itemized = 0;
    int total_registers = 0;
    int total_itemized = 0;
    int paper_total = 173;
};

[[nodiscard]] QubitAccounting qubit_accounting(int num_modes, int max_degree,
                                               const CostModel &model);

struct ScalingRow {
    int num_modes = 0;
    long long products = 0;
    double step_t = 0.0;
    double christiansen_terms = 0.0;
};

struct ScalingTable {
    std::vector<ScalingRow> rows;
    double product_exponent = 0.0;
    double step_exponent = 0.0;
};

[[nodiscard]] ScalingTable scaling_table(int m_lo, int m_hi, int max_degree, int n_mode,
                                         const CostModel &model);

/// sum_{m=1}^{n} C(M, m) N_max^(2m).
[[nodiscard]] double christiansen_term_count(int num_modes, int n_max, int n_mode);

/// T cost of the single-monomial multiplication chain of degree D.
[[nodiscard]] double chain_cost(int degree, int qubits_per_mode);

/// 100 2^N M + 4 D log2 D.
[[nodiscard]] double state_prep_cost(int num_modes, int qubits_per_mode, double terms);

struct LedgerRow {
    std::string name;
    double baseline = 0.0;
    double optimized = 0.0;
    [[nodiscard]] double ratio() const { return optimized > 0.0 ? baseline / optimized : 0.0; }
};

struct LedgerInputs {
    /// Retained norm of the window projection; the unprojected run needs 1 / this many shots.
    double retained_norm2 = 1.0;
    /// Lower edge of the unprojected window.
    double full_range_min = 0.0;
    /// Step count of the comparison step-size rule; 0 skips the row.
    long long baseline_r = 0;
    /// Normal-mode Hamiltonian for the localization row; null skips the row.
    const TaylorHamiltonian *normal_modes = nullptr;
    double sparsity_threshold = 1e-8;
};

[[nodiscard]] std::vector<LedgerRow> improvement_ledger(const TaylorHamiltonian &ham,
                                                        const TrotterPlan &plan,
                                                        const WindowConfig &window,
                                                        const CostModel &model,
                                                        const LedgerInputs &inputs);

} // namespace nirsim
