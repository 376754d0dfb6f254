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

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "nirsim/error.hpp"
#include "nirsim/hamiltonian.hpp"
#include "nirsim/resources.hpp"

using namespace nirsim;

namespace {

TaylorHamiltonian single_square() {
    TaylorHamiltonian h = harmonic_hamiltonian({1000.0});
    h.kinetic.setZero();
    return h;
}

double n_choose_k(int n, int k) {
    double b = 1.0;
    for (int i = 0; i < k; ++i) {
        b = b * (n - i) / (i + 1);
    }
    return b;
}

} // namespace

TEST(MultCost, Formula) {
    EXPECT_EQ(mult_cost(4, 4), 28);
    EXPECT_EQ(mult_cost(8, 4), 56);
    EXPECT_EQ(mult_cost(1, 1), 1);
    EXPECT_EQ(mult_cost(3, 10), 50);
    EXPECT_THROW((void)mult_cost(0, 3), ConfigError);
}

TEST(ChainCost, FollowsMultiplierChain) {
    EXPECT_EQ(chain_cost(2, 4), 28.0);
    EXPECT_EQ(chain_cost(3, 4), 28.0 + 56.0);
    EXPECT_EQ(chain_cost(4, 4), 28.0 + 56.0 + 84.0);
    // D^2 law of the chain at large D.
    EXPECT_NEAR(chain_cost(32, 4) / chain_cost(16, 4), 4.0, 0.4);
}

TEST(StepCost, SingleSquareMonomial) {
    CostModel m;
    const StepCost c = trotter_step_cost(single_square(), m);
    EXPECT_EQ(c.v_products, 1);
    EXPECT_EQ(c.mults, 2);
    EXPECT_EQ(c.coefficient_mults, 2);
    EXPECT_EQ(c.adds, 2);
    const double v = 2.0 * static_cast<double>(mult_cost(4, 4) + mult_cost(8, 10)) + m.adder_cost(25);
    EXPECT_DOUBLE_EQ(c.v_application_t, v);
    EXPECT_DOUBLE_EQ(c.kinetic_t, 0.0);
    EXPECT_DOUBLE_EQ(c.qft_t, 2.0 * 1 * 8.0 * 50.0);
    EXPECT_DOUBLE_EQ(c.t_gates, 2.0 * v + c.qft_t);
}

TEST(StepCost, AdditionCountOracle) {
    for (int m = 2; m <= 6; ++m) {
        const TaylorHamiltonian h = dense_stand_in(m, 2, 4);
        long long v = 0;
        for (int d = 2; d <= 4; ++d) {
            v += static_cast<long long>(h.terms(d).size());
        }
        long long k = 0;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j <= i; ++j) {
                k += h.kinetic(i, j) != 0.0 ? 1 : 0;
            }
        }
        CostModel on;
        CostModel off;
        off.caching = false;
        EXPECT_EQ(trotter_step_cost(h, on).adds, 2 * v + k);
        EXPECT_EQ(trotter_step_cost(h, off).adds, 2 * v + k);
    }
}

TEST(StepCost, CachingReductionOnDenseQuartic) {
    for (int m = 6; m <= 12; ++m) {
        const TaylorHamiltonian h = dense_stand_in(m, 2, 4);
        CostModel on;
        CostModel off;
        off.caching = false;
        const double a = static_cast<double>(trotter_step_cost(h, off).v_products);
        const double b = static_cast<double>(trotter_step_cost(h, on).v_products);
        const double reduction = 1.0 - b / a;
        EXPECT_GE(reduction, 0.5) << m;
        EXPECT_LE(reduction, 0.7) << m;
    }
}

TEST(StepCost, MonotoneInTermsAndBits) {
    std::mt19937 rng(21);
    std::bernoulli_distribution keep(0.5);
    const TaylorHamiltonian dense = dense_stand_in(5, 2, 4);
    TaylorHamiltonian h = harmonic_hamiltonian({900.0, 1200.0, 1500.0, 1800.0, 2100.0});
    h.n_mode = 2;
    h.max_degree = 4;
    CostModel m;
    double prev = trotter_step_cost(h, m).t_gates;
    for (int d = 3; d <= 4; ++d) {
        for (const auto &kv : dense.terms(d)) {
            if (!keep(rng)) {
                continue;
            }
            h.add_term(kv.first, kv.second);
            const double now = trotter_step_cost(h, m).t_gates;
            EXPECT_GE(now, prev);
            prev = now;
        }
    }
    CostModel wide = m;
    wide.qubits_per_mode = 5;
    EXPECT_GT(trotter_step_cost(h, wide).t_gates, trotter_step_cost(h, m).t_gates);
}

TEST(Workflow, LinearInShotsAndSteps) {
    const TaylorHamiltonian h = dense_stand_in(4, 2, 4);
    CostModel m;
    const StepCost step = trotter_step_cost(h, m);
    WindowConfig w = window_defaults();
    const ResourceEstimate a = workflow_cost(step, 3, w, allocate_shots(w, 0), m);
    w.total_shots *= 2.0;
    const ResourceEstimate b = workflow_cost(step, 3, w, allocate_shots(w, 0), m);
    EXPECT_NEAR(b.total_t / a.total_t, 2.0, 1e-3);
    EXPECT_EQ(b.max_t, a.max_t);
    EXPECT_GE(a.total_t, a.max_t);
    const ResourceEstimate c = workflow_cost(step, 6, window_defaults(), allocate_shots(window_defaults(), 0), m);
    EXPECT_NEAR(c.total_t, 2.0 * a.total_t, 1e-9 * a.total_t);
    EXPECT_DOUBLE_EQ(a.max_t, step.t_gates * 3 * 201 * 0.5);
    EXPECT_THROW((void)workflow_cost(step, 0, w, allocate_shots(w, 0), m), ConfigError);
}

TEST(Workflow, DoubleTricksAreExactFactors) {
    const TaylorHamiltonian h = dense_stand_in(4, 2, 4);
    const WindowConfig w = window_defaults();
    const ShotLedger l = allocate_shots(w, 0);
    CostModel on;
    CostModel nodp = on;
    nodp.double_phase = false;
    CostModel nodm = on;
    nodm.double_measurement = false;
    const ResourceEstimate a = workflow_cost(trotter_step_cost(h, on), 2, w, l, on);
    const ResourceEstimate b = workflow_cost(trotter_step_cost(h, nodp), 2, w, l, nodp);
    const ResourceEstimate c = workflow_cost(trotter_step_cost(h, nodm), 2, w, l, nodm);
    EXPECT_DOUBLE_EQ(b.total_t / a.total_t, 2.0);
    EXPECT_DOUBLE_EQ(b.max_t / a.max_t, 2.0);
    EXPECT_NEAR(c.total_t / a.total_t, 1.49, 1e-12);
    EXPECT_NEAR(c.total_shots / a.total_shots, 1.49, 1e-12);
}

TEST(Runtime, FourStepProcedure) {
    CostModel m;
    const double s = active_volume_runtime(1.70e13, 500, 1e6, 100, m);
    EXPECT_NEAR(s / 3600.0, 189.0, 0.5);
    EXPECT_NEAR(active_volume_runtime(1.70e13, 500, 0.5e6, 100, m), 2.0 * s, 1e-6 * s);
    const double s2 = active_volume_runtime(1.70e13, 1000, 1e6, 100, m);
    EXPECT_NEAR(s2, 0.5 * s, 1e-6 * s);
    EXPECT_THROW((void)active_volume_runtime(1e6, 300, 1e6, 151, m), ConfigError);
    EXPECT_NO_THROW((void)active_volume_runtime(1e6, 300, 1e6, 150, m));
}

TEST(Qubits, Accounting) {
    CostModel m;
    const QubitAccounting q = qubit_accounting(12, 4, m);
    EXPECT_EQ(q.system, 48);
    EXPECT_EQ(q.ancilla_registers, 5 * 10 + 25);
    EXPECT_EQ(q.total_registers, 48 + 1 + 75);
    // Intermediates 4 (2 + 3 + 4), coefficient 10, product 16 + 10, three resource states.
    EXPECT_EQ(q.ancilla_itemized, 36 + 10 + 26 + 75);
    EXPECT_EQ(q.total_itemized, 48 + 1 + 147);
    EXPECT_EQ(q.paper_total, 173);
    CostModel wide = m;
    wide.qubits_per_mode = 5;
    const QubitAccounting w = qubit_accounting(12, 4, wide);
    EXPECT_GT(w.system, q.system);
    EXPECT_GT(w.ancilla_itemized, q.ancilla_itemized);
    EXPECT_EQ(w.ancilla_registers, q.ancilla_registers);
    EXPECT_EQ(w.hadamard, q.hadamard);
    CostModel one = m;
    one.single_resource_state = true;
    EXPECT_EQ(qubit_accounting(12, 4, one).ancilla_itemized, q.ancilla_itemized - 50);
}

TEST(Scaling, QuadraticInModesForTwoModeCoupling) {
    CostModel m;
    const ScalingTable t = scaling_table(4, 12, 4, 2, m);
    EXPECT_NEAR(t.product_exponent, 2.0, 0.15);
    EXPECT_NEAR(t.step_exponent, 2.0, 0.15);
    EXPECT_EQ(t.rows.size(), 9U);
}

TEST(Scaling, ChristiansenCountMatchesEnumeration) {
    // One- and two-mode operator strings over N_max^2 modal pairs per mode.
    const int modes = 6;
    const int nmax = 4;
    double enumerated = 0.0;
    std::function<void(int, int, int)> rec = [&](int start, int depth, int limit) {
        if (depth > 0) {
            enumerated += std::pow(nmax * nmax, depth);
        }
        if (depth == limit) {
            return;
        }
        for (int i = start; i < modes; ++i) {
            rec(i + 1, depth + 1, limit);
        }
    };
    rec(0, 0, 2);
    EXPECT_EQ(christiansen_term_count(modes, nmax, 2), enumerated);
    EXPECT_EQ(christiansen_term_count(modes, nmax, 2), 6.0 * 16.0 + n_choose_k(6, 2) * 256.0);
}

TEST(StatePrep, Formula) {
    EXPECT_DOUBLE_EQ(state_prep_cost(12, 5, 1.0), 100.0 * 32 * 12);
    for (int n = 5; n <= 10; ++n) {
        const double c = state_prep_cost(12, n, 1000.0);
        EXPECT_GE(std::lround(std::log10(c)), 4);
        EXPECT_LE(std::lround(std::log10(c)), 6);
    }
    EXPECT_LT(state_prep_cost(12, 4, 1000.0) / 8.47e8, 1e-2);
    EXPECT_THROW((void)state_prep_cost(12, 4, 0.0), ConfigError);
}

TEST(Ledger, RowsAndFactors) {
    const ModelSystem s = build_model_system("triatomic-toy");
    const Localization loc = localize_modes(s.ham, s.disp);
    TrotterPlan plan;
    plan.steps_per_unit = 4;
    plan.delta_t = 2.0 * std::acos(-1.0) / 9000.0;
    plan.step_time = plan.delta_t / 4.0;
    CostModel m;
    LedgerInputs in;
    in.retained_norm2 = 0.05;
    in.baseline_r = 40;
    in.normal_modes = &s.ham;
    const auto rows = improvement_ledger(loc.ham, plan, window_defaults(), m, in);
    ASSERT_EQ(rows.size(), 7U);
    EXPECT_DOUBLE_EQ(rows[2].ratio(), 2.0);
    EXPECT_NEAR(rows[3].ratio(), 1.49, 1e-12);
    EXPECT_NEAR(rows[5].ratio(), 10.0, 1e-9);
    EXPECT_GT(rows[4].ratio(), 1.0);
    for (const auto &r : rows) {
        EXPECT_GT(r.optimized, 0.0) << r.name;
    }
}

TEST(Ledger, CachingFactorOnModelSystems) {
    for (int m = 6; m <= 12; m += 2) {
        const TaylorHamiltonian h = dense_stand_in(m, 2, 4);
        TrotterPlan plan;
        plan.steps_per_unit = 1;
        const auto rows = improvement_ledger(h, plan, window_defaults(), CostModel{}, LedgerInputs{});
        EXPECT_GE(rows[0].ratio(), 1.5);
        EXPECT_LE(rows[0].ratio(), 3.3);
    }
}
