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

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "nirsim/dynamics.hpp"
#include "nirsim/error.hpp"
#include "nirsim/hamiltonian.hpp"
#include "nirsim/spectroscopy.hpp"
#include "nirsim/vscf.hpp"

using namespace nirsim;

namespace {

const double kPi = std::acos(-1.0);

StateVector random_state(const GridBasis &b, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    StateVector s;
    s.basis = b;
    s.amps.resize(static_cast<Eigen::Index>(b.dim()));
    for (auto &a : s.amps) {
        a = cplx(g(rng), g(rng));
    }
    s.amps.normalize();
    return s;
}

// Dense T and V from the grid fragments, with T carried to the position basis.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> dense_fragments(const GridOperators &ops) {
    const auto dim = ops.v.size();
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Identity(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        Eigen::VectorXcd col = f.col(j);
        shifted_dft_all(col, ops.basis, false);
        f.col(j) = col;
    }
    const Eigen::MatrixXcd t = f.adjoint() * ops.t.cast<cplx>().asDiagonal() * f;
    const Eigen::MatrixXcd v = ops.v.cast<cplx>().asDiagonal();
    return {t, v};
}

} // namespace

TEST(DenseHamiltonian, HarmonicLadder) {
    const DenseSpectrum s = exact_diagonalize(harmonic_hamiltonian({1000.0}), GridBasis::make(5, 1));
    EXPECT_NEAR(s.values(0), 500.0, 0.1);
    EXPECT_NEAR(s.values(1), 1500.0, 0.1);
    EXPECT_NEAR(s.values(2), 2500.0, 0.1);
}

TEST(DenseHamiltonian, Hermitian) {
    const ModelSystem m = build_model_system("triatomic-toy");
    const Localization loc = localize_modes(m.ham, m.disp);
    const Eigen::MatrixXcd h = dense_hamiltonian(loc.ham, GridBasis::make(3, 3));
    EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DenseHamiltonian, SeparableLadders) {
    const GridBasis b1 = GridBasis::make(4, 1);
    const Eigen::VectorXd e0 = exact_diagonalize(harmonic_hamiltonian({1000.0}), b1).values;
    const Eigen::VectorXd e1 = exact_diagonalize(harmonic_hamiltonian({1700.0}), b1).values;
    std::vector<double> sums;
    for (Eigen::Index i = 0; i < e0.size(); ++i) {
        for (Eigen::Index j = 0; j < e1.size(); ++j) {
            sums.push_back(e0(i) + e1(j));
        }
    }
    std::sort(sums.begin(), sums.end());
    const Eigen::VectorXd e = exact_diagonalize(harmonic_hamiltonian({1000.0, 1700.0}), GridBasis::make(4, 2)).values;
    for (Eigen::Index k = 0; k < e.size(); ++k) {
        EXPECT_NEAR(e(k), sums[static_cast<std::size_t>(k)], 1e-8);
    }
}

TEST(DenseHamiltonian, SizeGuard) {
    EXPECT_THROW((void)dense_hamiltonian(harmonic_hamiltonian({1000.0, 1000.0, 1000.0}), GridBasis::make(5, 3)), SizeGuardError);
}

TEST(DensePropagate, MatchesMatrixExponential) {
    const ModelSystem m = build_model_system("coupled-quartic-pair");
    const GridBasis b = GridBasis::make(3, 2);
    const DenseSpectrum s = exact_diagonalize(m.ham, b);
    const StateVector psi = random_state(b, 2);
    const double t = 1e-4;
    // Taylor series of exp(-i H t) as oracle.
    const Eigen::MatrixXcd h = dense_hamiltonian(m.ham, b);
    Eigen::VectorXcd term = psi.amps;
    Eigen::VectorXcd sum = psi.amps;
    for (int n = 1; n < 40; ++n) {
        term = (cplx(0.0, -t) / static_cast<double>(n)) * (h * term);
        sum += term;
    }
    EXPECT_LT((dense_propagate(s, psi.amps, t) - sum).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(TrotterOracle, ZeroTimeIsIdentity) {
    const ModelSystem m = build_model_system("triatomic-toy");
    const StateVector psi = random_state(GridBasis::make(3, 3), 3);
    const StateVector out = trotter_oracle(psi, quantize(m.ham, 10, 25), 0.0, 4);
    EXPECT_EQ(out.amps, psi.amps);
    EXPECT_THROW((void)trotter_oracle(psi, unquantized(m.ham), 1.0, 0), ConfigError);
}

TEST(TrotterOracle, CommutingFragmentsExactAtOneStep) {
    TaylorHamiltonian h = harmonic_hamiltonian({1000.0, 1300.0});
    h.kinetic.setZero();
    h.add_term({1, 0, 0}, 7.0);
    const GridBasis b = GridBasis::make(3, 2);
    const StateVector psi = random_state(b, 4);
    const double t = 3e-3;
    const StateVector out = trotter_oracle(psi, unquantized(h), t, 1);
    const Eigen::VectorXd v = potential_diagonal(h, b);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        EXPECT_NEAR(std::abs(out.amps(i) - std::polar(1.0, -v(i) * t) * psi.amps(i)), 0.0, 1e-12);
    }
}

TEST(TrotterOracle, NormPreserved) {
    const ModelSystem m = build_model_system("triatomic-toy");
    const StateVector psi = random_state(GridBasis::make(3, 3), 5);
    const QuantizedCoefficients q = quantize(m.ham, 10, 25);
    for (long long r : {1LL, 3LL, 17LL}) {
        for (double t : {1e-5, 1e-3, 0.05}) {
            EXPECT_NEAR(trotter_oracle(psi, q, t, r).norm(), 1.0, 1e-10);
        }
    }
}

TEST(TrotterOracle, SecondOrderConvergenceOnEigenstate) {
    const ModelSystem m = build_model_system("triatomic-toy");
    const GridBasis b = GridBasis::make(3, 3);
    const DenseSpectrum s = exact_diagonalize(m.ham, b);
    StateVector psi;
    psi.basis = b;
    psi.amps = s.vectors.col(4);
    const double e = s.values(4);
    const double t = 2.0 * kPi / 9000.0;
    std::vector<double> lr;
    std::vector<double> le;
    for (long long r : {1LL, 2LL, 4LL, 8LL}) {
        const StateVector out = trotter_oracle(psi, unquantized(m.ham), t, r);
        const double err = std::abs(psi.amps.dot(out.amps) * std::polar(1.0, e * t) - 1.0);
        lr.push_back(std::log(static_cast<double>(r)));
        le.push_back(std::log(err));
    }
    const double slope = (le.back() - le.front()) / (lr.back() - lr.front());
    EXPECT_NEAR(slope, -2.0, 0.2);
}

TEST(ErrorOperator, VanishesForCommutingFragments) {
    TaylorHamiltonian h = harmonic_hamiltonian({1000.0});
    h.kinetic.setZero();
    const GridOperators ops = GridOperators::build(h, GridBasis::make(4, 1));
    EXPECT_EQ(error_operator_expectation(ops, random_state(ops.basis, 6)), 0.0);
}

TEST(ErrorOperator, MatchesDenseNestedCommutators) {
    for (const char *name : {"single-morse-expansion", "coupled-quartic-pair"}) {
        const ModelSystem m = build_model_system(name);
        const GridBasis b = GridBasis::make(4, m.ham.num_modes);
        const GridOperators ops = GridOperators::build(m.ham, b);
        const auto [t, v] = dense_fragments(ops);
        const Eigen::MatrixXcd tv = t * v - v * t;
        const Eigen::MatrixXcd e2 = (2.0 * (t * tv - tv * t) + (v * tv - tv * v)) / 24.0;
        StateVector g;
        g.basis = b;
        g.amps = exact_diagonalize(m.ham, b).vectors.col(0);
        const cplx want = g.amps.dot(e2 * g.amps);
        const double got = error_operator_expectation(ops, g);
        EXPECT_NEAR(got, want.real(), 1e-8 * std::max(1.0, std::abs(want)));
        EXPECT_LT(std::abs(want.imag()), 1e-10 * std::max(1.0, std::abs(want)));
        const StateVector r = random_state(b, 9);
        const cplx zr = error_operator_expectation_complex(ops, r.amps);
        EXPECT_LT(std::abs(zr.imag()), 1e-10 * std::max(1.0, std::abs(zr)));
        EXPECT_NEAR(zr.real(), r.amps.dot(e2 * r.amps).real(), 1e-8 * std::max(1.0, std::abs(zr)));
    }
}

TEST(ErrorOperator, PredictsSplitStepPhase) {
    // exp(-i s (H - s^2 E2)) on an eigenstate: the phase error per step is s^3 <E2>.
    const ModelSystem m = build_model_system("single-morse-expansion");
    const GridBasis b = GridBasis::make(5, 1);
    const DenseSpectrum s = exact_diagonalize(m.ham, b);
    StateVector g;
    g.basis = b;
    g.amps = s.vectors.col(0);
    const GridOperators ops = GridOperators::build(m.ham, b);
    const double e2 = error_operator_expectation(ops, g);
    const double step = 1e-5;
    const StateVector out = trotter_oracle(g, unquantized(m.ham), step, 1);
    const double phase = std::arg(g.amps.dot(out.amps) * std::polar(1.0, s.values(0) * step));
    EXPECT_NEAR(phase / (step * step * step), e2, 1e-3 * std::abs(e2));
}

class PlanFixture : public ::testing::Test {
  protected:
    void SetUp() override {
        model = build_model_system("triatomic-toy");
        basis = GridBasis::make(3, 3);
        ops = GridOperators::build(model.ham, basis);
        sol = solve_vscf(model.ham, basis);
        const StateVector ground = product_state_vector(sol, {0, 0, 0});
        const auto comps = dipole_excite(model.dipole, ground);
        for (int r = 0; r < 3; ++r) {
            active[r] = comps[r].active;
            states[r] = active[r] ? project_window(comps[r].state, sol, 3750.0).state
                                  : comps[r].state;
        }
    }
    ModelSystem model;
    GridBasis basis;
    GridOperators ops;
    VscfSolution sol;
    std::array<StateVector, 3> states;
    std::array<bool, 3> active{};
};

TEST_F(PlanFixture, SquareRootLaw) {
    const TrotterPlan a = trotter_plan(ops, sol, states, active, 1.0, 9000.0);
    const TrotterPlan b = trotter_plan(ops, sol, states, active, 4.0, 9000.0);
    ASSERT_EQ(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        if (std::isfinite(a.entries[i].tau)) {
            EXPECT_NEAR(b.entries[i].tau, 2.0 * a.entries[i].tau, 1e-9 * a.entries[i].tau);
        }
    }
    EXPECT_NEAR(b.step_time, 2.0 * a.step_time, 1e-9 * a.step_time);
    EXPECT_EQ(a.steps_per_unit, static_cast<long long>(std::ceil(a.delta_t / a.step_time)));
    EXPECT_LE(b.steps_per_unit, (a.steps_per_unit + 1) / 2 + 1);
    EXPECT_GE(b.steps_per_unit, a.steps_per_unit / 2);
    EXPECT_NEAR(a.delta_t, 2.0 * kPi / 9000.0, 1e-15);
}

TEST_F(PlanFixture, CoverageOfRetainedWeights) {
    const TrotterPlan p = trotter_plan(ops, sol, states, active, 10.0, 9000.0);
    std::array<double, 3> w{};
    for (const auto &e : p.entries) {
        w[e.component] += e.weight;
    }
    for (int r = 0; r < 3; ++r) {
        if (active[r]) {
            EXPECT_GE(w[r], 0.99 - 1e-12);
        }
    }
    EXPECT_GE(p.steps_per_unit, 1);
    EXPECT_THROW((void)trotter_plan(ops, sol, states, active, 0.0, 9000.0), ConfigError);
}

TEST(TrotterPlan, CommutingFragmentsGiveOneStep) {
    TaylorHamiltonian h = harmonic_hamiltonian({4000.0});
    h.kinetic.setZero();
    TaylorHamiltonian ref = harmonic_hamiltonian({4000.0});
    const GridBasis b = GridBasis::make(4, 1);
    const VscfSolution sol = solve_vscf(ref, b);
    std::array<StateVector, 3> st;
    st.fill(product_state_vector(sol, {1}));
    const TrotterPlan p = trotter_plan(GridOperators::build(h, b), sol, st, {true, false, false}, 1.0, 9000.0);
    EXPECT_TRUE(std::isinf(p.step_time));
    EXPECT_EQ(p.steps_per_unit, 1);
}

TEST(Quantize, ScaleEndpointIsExact) {
    const ModelSystem m = build_model_system("triatomic-toy");
    const QuantizedCoefficients q = quantize(m.ham, 10, 25);
    for (int d = 2; d <= 4; ++d) {
        for (const auto &[idx, v] : m.ham.terms(d)) {
            if (std::abs(v) == q.scale[d]) {
                EXPECT_EQ(q.ham.term(idx), v);
            }
        }
    }
}

TEST(Quantize, FixedPointBound) {
    for (const char *name : {"single-morse-expansion", "coupled-quartic-pair", "triatomic-toy"}) {
        const ModelSystem m = build_model_system(name);
        const QuantizedCoefficients q = quantize(m.ham, 10, 25);
        EXPECT_LE(q.max_relative_error, std::ldexp(1.0, -10) + 1e-15);
        for (int d = 2; d <= 4; ++d) {
            for (const auto &[idx, v] : m.ham.terms(d)) {
                EXPECT_LE(std::abs(q.ham.term(idx) - v), std::ldexp(q.scale[d], -10) * (1 + 1e-12));
            }
        }
    }
    EXPECT_THROW((void)quantize(harmonic_hamiltonian({1.0}), 1, 25), ConfigError);
}

TEST(Quantize, PhaseResolution) {
    const QuantizedCoefficients q = quantize(harmonic_hamiltonian({1000.0}), 10, 25);
    EXPECT_LE(q.max_phase_error(), 3.0e-8);
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double th = u(rng);
        const double r = round_phase(th, q.phase_step());
        const double diff = std::remainder(r - th, 2.0 * kPi);
        EXPECT_LE(std::abs(diff), q.max_phase_error() + 1e-14);
    }
    EXPECT_EQ(round_phase(1.25, 0.0), 1.25);
}

TEST(Quantize, SpectrumShiftOnTriatomicToy) {
    const ModelSystem m = build_model_system("triatomic-toy");
    const Localization loc = localize_modes(m.ham, m.disp);
    const GridBasis b = GridBasis::make(3, 3);
    const DenseSpectrum exact = exact_diagonalize(loc.ham, b);
    const DenseSpectrum quant = exact_diagonalize(quantize(loc.ham, 10, 25).ham, b);
    // Bright lines: dipole intensity from the localized ground state.
    Eigen::MatrixXd mu(3, 3);
    for (int r = 0; r < 3; ++r) {
        for (int i = 0; i < 3; ++i) {
            mu(r, i) = m.dipole.components[r][i];
        }
    }
    mu = mu * loc.rotation;
    const Eigen::VectorXcd g = exact.vectors.col(0);
    std::vector<double> inten(static_cast<std::size_t>(exact.values.size()), 0.0);
    for (int r = 0; r < 3; ++r) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(g.size());
        for (int i = 0; i < 3; ++i) {
            v += mu(r, i) * position_diagonal(b, i).cwiseProduct(g);
        }
        const Eigen::VectorXcd c = exact.vectors.adjoint() * v;
        for (Eigen::Index k = 0; k < c.size(); ++k) {
            inten[k] += std::norm(c(k));
        }
    }
    double top = 0.0;
    for (Eigen::Index k = 1; k < exact.values.size(); ++k) {
        const double w = exact.values(k) - exact.values(0);
        if (w >= 3500.0 && w <= 12500.0) {
            top = std::max(top, inten[k]);
        }
    }
    double worst = 0.0;
    int bright = 0;
    for (Eigen::Index k = 1; k < exact.values.size(); ++k) {
        const double w = exact.values(k) - exact.values(0);
        if (w >= 3500.0 && w <= 12500.0 && inten[k] >= 0.01 * top) {
            ++bright;
            worst = std::max(worst, std::abs((quant.values(k) - quant.values(0)) - w));
        }
    }
    EXPECT_GT(bright, 0);
    EXPECT_LT(worst, 0.5);
}
