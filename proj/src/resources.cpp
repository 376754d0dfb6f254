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

#include "nirsim/resources.hpp"

#include <algorithm>
#include <cmath>

#include "nirsim/error.hpp"

namespace nirsim {

namespace {

double log_log_slope(const std::vector<double> &x, const std::vector<double> &y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

void CostModel::validate() const {
    if (qubits_per_mode < 1 || b_k < 1 || b_r < 2) {
        throw ConfigError("cost model register sizes must be positive");
    }
    if (!(blocks_per_tgate > 0.0) || !(zeta > 0.0) || !(double_phase_factor > 0.0) ||
        !(qft_rotation_t >= 0.0)) {
        throw ConfigError("cost model factors must be positive");
    }
}

long long mult_cost(long long a, long long b) {
    if (a < 1 || b < 1) {
        throw ConfigError("multiplier operands need at least one bit");
    }
    return 2 * a * b - std::max(a, b);
}

StepCost trotter_step_cost(const TaylorHamiltonian &ham, const CostModel &model) {
    model.validate();
    const long long n = model.qubits_per_mode;
    const ProductWalk walk = product_walk(ham, model.caching);
    StepCost c;
    double chain = 0.0;
    for (int d = 2; d <= 4; ++d) {
        chain += static_cast<double>(walk.by_degree[d]) * static_cast<double>(mult_cost((d - 1) * n, n));
    }
    double coef = 0.0;
    long long v_terms = 0;
    for (int d = 2; d <= 4; ++d) {
        const auto cnt = static_cast<long long>(ham.terms(d).size());
        v_terms += cnt;
        coef += static_cast<double>(cnt) * static_cast<double>(mult_cost(d * n, model.b_k));
    }
    const double add = model.adder_cost(model.b_r);
    // Products and coefficient loads are uncomputed after each phase kick.
    c.v_application_t = 2.0 * (chain + coef) + static_cast<double>(v_terms) * add;
    long long k_terms = 0;
    for (int i = 0; i < ham.num_modes; ++i) {
        for (int j = 0; j <= i; ++j) {
            if (ham.kinetic(i, j) != 0.0) {
                ++k_terms;
            }
        }
    }
    c.kinetic_t = static_cast<double>(k_terms) *
                  (2.0 * static_cast<double>(mult_cost(n, n) + mult_cost(2 * n, model.b_k)) + add);
    c.qft_t = 2.0 * ham.num_modes * (static_cast<double>(n * n) / 2.0) * model.qft_rotation_t;
    c.t_gates = 2.0 * c.v_application_t + c.kinetic_t + c.qft_t;
    c.v_products = walk.total();
    c.mults = 2 * walk.total() + k_terms;
    c.coefficient_mults = 2 * v_terms + k_terms;
    c.adds = 2 * v_terms + k_terms;
    return c;
}

ResourceEstimate workflow_cost(const StepCost &step, long long r, const WindowConfig &window,
                               const ShotLedger &ledger, const CostModel &model) {
    model.validate();
    if (r < 1) {
        throw ConfigError("Trotter step count must be at least 1");
    }
    const int kmax = window.k_max();
    if (static_cast<int>(ledger.n_k.size()) != kmax + 1) {
        throw ConfigError("shot ledger does not match the window's k_max");
    }
    const double f = model.double_phase ? model.double_phase_factor : 1.0;
    const double z = model.double_measurement ? model.zeta : 1.0;
    ResourceEstimate e;
    e.r = r;
    e.step_t = step.t_gates;
    e.max_t = step.t_gates * static_cast<double>(r) * kmax * f;
    double sum = 0.0;
    double shots = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        sum += 2.0 * static_cast<double>(ledger.n_k[k]) * k;
        shots += 2.0 * static_cast<double>(ledger.n_k[k]);
    }
    e.total_t = 3.0 * sum * step.t_gates * static_cast<double>(r) * f / z;
    e.total_shots = 3.0 * shots / z;
    return e;
}

double active_volume_runtime(double t_gates, int qubit_budget, double clock_hz,
                             int logical_qubits, const CostModel &model) {
    const int working = qubit_budget / 2;
    if (working < logical_qubits) {
        throw ConfigError("qubit budget gives " + std::to_string(working) +
                          " working qubits, fewer than the " + std::to_string(logical_qubits) +
                          " logical qubits required");
    }
    if (!(clock_hz > 0.0)) {
        throw ConfigError("clock rate must be positive");
    }
    const double blocks = t_gates * model.blocks_per_tgate;
    return blocks / static_cast<double>(working) / clock_hz;
}

QubitAccounting qubit_accounting(int num_modes, int max_degree, const CostModel &model) {
    QubitAccounting q;
    const int n = model.qubits_per_mode;
    q.system = num_modes * n;
    q.ancilla_registers = 5 * model.b_k + model.b_r;
    int inter = 0;
    for (int d = 2; d <= max_degree; ++d) {
        inter += n * d;
    }
    const int states = model.single_resource_state ? 1 : max_degree - 1;
    q.ancilla_itemized = inter + model.b_k + (max_degree * n + model.b_k) + states * model.b_r;
    q.total_registers = q.system + q.hadamard + q.ancilla_registers;
    q.total_itemized = q.system + q.hadamard + q.ancilla_itemized;
    return q;
}

double christiansen_term_count(int num_modes, int n_max, int n_mode) {
    double total = 0.0;
    for (int m = 1; m <= std::min(n_mode, num_modes); ++m) {
        double binom = 1.0;
        for (int i = 0; i < m; ++i) {
            binom = binom * (num_modes - i) / (i + 1);
        }
        total += binom * std::pow(static_cast<double>(n_max), 2 * m);
    }
    return total;
}

double chain_cost(int degree, int qubits_per_mode) {
    double c = 0.0;
    for (int d = 2; d <= degree; ++d) {
        c += static_cast<double>(mult_cost(static_cast<long long>(d - 1) * qubits_per_mode,
                                           qubits_per_mode));
    }
    return c;
}

ScalingTable scaling_table(int m_lo, int m_hi, int max_degree, int n_mode,
                           const CostModel &model) {
    if (m_lo < 2 || m_hi <= m_lo) {
        throw ConfigError("scaling table needs 2 <= M_lo < M_hi");
    }
    ScalingTable t;
    std::vector<double> xs;
    std::vector<double> ps;
    std::vector<double> ts;
    for (int m = m_lo; m <= m_hi; ++m) {
        const TaylorHamiltonian h = dense_stand_in(m, n_mode, max_degree);
        const StepCost c = trotter_step_cost(h, model);
        ScalingRow row;
        row.num_modes = m;
        row.products = c.v_products;
        row.step_t = c.t_gates;
        row.christiansen_terms =
            christiansen_term_count(m, 1 << model.qubits_per_mode, n_mode);
        t.rows.push_back(row);
        xs.push_back(m);
        ps.push_back(static_cast<double>(c.v_products));
        ts.push_back(c.t_gates);
    }
    t.product_exponent = log_log_slope(xs, ps);
    t.step_exponent = log_log_slope(xs, ts);
    return t;
}

double state_prep_cost(int num_modes, int qubits_per_mode, double terms) {
    if (!(terms >= 1.0)) {
        throw ConfigError("state preparation needs at least one term");
    }
    return 100.0 * std::ldexp(1.0, qubits_per_mode) * num_modes + 4.0 * terms * std::log2(terms);
}

std::vector<LedgerRow> improvement_ledger(const TaylorHamiltonian &ham, const TrotterPlan &plan,
                                          const WindowConfig &window, const CostModel &model,
                                          const LedgerInputs &inputs) {
    std::vector<LedgerRow> rows;
    const ShotLedger ledger = allocate_shots(window, 0);
    const long long r = plan.steps_per_unit;
    auto total = [&](const CostModel &m, long long steps, const WindowConfig &w,
                     const ShotLedger &l) {
        return workflow_cost(trotter_step_cost(ham, m), steps, w, l, m).total_t;
    };
    const double base_total = total(model, r, window, ledger);

    CostModel nocache = model;
    nocache.caching = false;
    CostModel cache = model;
    cache.caching = true;
    const StepCost sc = trotter_step_cost(ham, cache);
    const StepCost su = trotter_step_cost(ham, nocache);
    rows.push_back({"caching: register products", static_cast<double>(su.v_products),
                    static_cast<double>(sc.v_products)});
    rows.push_back({"caching: step T gates", su.t_gates, sc.t_gates});

    CostModel nodp = model;
    nodp.double_phase = false;
    CostModel dp = model;
    dp.double_phase = true;
    rows.push_back({"double phase", total(nodp, r, window, ledger), total(dp, r, window, ledger)});

    CostModel nodm = model;
    nodm.double_measurement = false;
    CostModel dm = model;
    dm.double_measurement = true;
    rows.push_back(
        {"double measurement", total(nodm, r, window, ledger), total(dm, r, window, ledger)});

    if (inputs.retained_norm2 > 0.0 && inputs.retained_norm2 <= 1.0) {
        WindowConfig full = window;
        full.omega_min = inputs.full_range_min;
        full.total_shots = window.total_shots / inputs.retained_norm2;
        long long r_full = 1;
        if (std::isfinite(plan.step_time)) {
            const double dt = 2.0 * std::acos(-1.0) / full.width();
            r_full = std::max(1LL, static_cast<long long>(std::ceil(dt / plan.step_time)));
        }
        rows.push_back({"initial state projection",
                        total(model, r_full, full, allocate_shots(full, 0)), base_total});
    }
    if (inputs.baseline_r > 0) {
        rows.push_back({"perturbative step", total(model, inputs.baseline_r, window, ledger),
                        base_total});
    }
    if (inputs.normal_modes != nullptr) {
        auto count = [&](const TaylorHamiltonian &h) {
            double mx = 0.0;
            for (int d = 2; d <= 4; ++d) {
                for (const auto &kv : h.terms(d)) {
                    mx = std::max(mx, std::abs(kv.second));
                }
            }
            long long c = 0;
            for (int d = 2; d <= 4; ++d) {
                for (const auto &kv : h.terms(d)) {
                    c += std::abs(kv.second) >= inputs.sparsity_threshold * mx ? 1 : 0;
                }
            }
            return static_cast<double>(c);
        };
        rows.push_back({"mode localization: potential terms", count(*inputs.normal_modes),
                        count(ham)});
    }
    return rows;
}

} // namespace nirsim
