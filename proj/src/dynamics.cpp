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

#include "nirsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "nirsim/error.hpp"

namespace nirsim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

} // namespace

Eigen::MatrixXcd dense_hamiltonian(const TaylorHamiltonian &ham, const GridBasis &basis) {
    require_size(basis, kMaxDenseQubits, "dense_hamiltonian");
    const GridOperators ops = GridOperators::build(ham, basis);
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    Eigen::MatrixXcd h(dim, dim);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        e(j) = 1.0;
        h.col(j) = ops.apply_h(e);
        e(j) = 0.0;
    }
    return h;
}

DenseSpectrum exact_diagonalize(const TaylorHamiltonian &ham, const GridBasis &basis) {
    Eigen::MatrixXcd h = dense_hamiltonian(ham, basis);
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) {
        throw NumericalError("dense diagonalization failed");
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::VectorXcd dense_propagate(const DenseSpectrum &spec, const Eigen::VectorXcd &psi,
                                 double t) {
    Eigen::VectorXcd c = spec.vectors.adjoint() * psi;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        c(i) *= std::polar(1.0, -spec.values(i) * t);
    }
    return spec.vectors * c;
}

double QuantizedCoefficients::phase_step() const {
    return b_r > 0 ? std::ldexp(1.0, 1 - b_r) : 0.0;
}

double round_phase(double theta, double step) {
    if (step <= 0.0) {
        return theta;
    }
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    return std::nearbyint(r / step) * step;
}

QuantizedCoefficients quantize(const TaylorHamiltonian &ham, int b_k, int b_r) {
    if (b_k < 2 || b_r < 2) {
        throw ConfigError("quantization needs b_k >= 2 and b_r >= 2");
    }
    QuantizedCoefficients q;
    q.ham = ham;
    q.b_k = b_k;
    q.b_r = b_r;
    auto round_to = [&](double v, double scale) {
        if (scale == 0.0) {
            return v;
        }
        const double step = scale * std::ldexp(1.0, 1 - b_k);
        const double r = std::nearbyint(v / step) * step;
        q.max_relative_error = std::max(q.max_relative_error, std::abs(r - v) / scale);
        return r;
    };
    for (int d = 2; d <= 4; ++d) {
        double s = 0.0;
        for (const auto &kv : ham.terms(d)) {
            s = std::max(s, std::abs(kv.second));
        }
        q.scale[d] = s;
        TermMap &out = q.ham.terms(d);
        out.clear();
        for (const auto &[idx, v] : ham.terms(d)) {
            const double r = round_to(v, s);
            if (r != 0.0) {
                out[idx] = r;
            }
        }
    }
    q.kinetic_scale = ham.kinetic.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < ham.kinetic.rows(); ++i) {
        for (Eigen::Index j = 0; j < ham.kinetic.cols(); ++j) {
            q.ham.kinetic(i, j) = round_to(ham.kinetic(i, j), q.kinetic_scale);
        }
    }
    return q;
}

QuantizedCoefficients unquantized(const TaylorHamiltonian &ham) {
    QuantizedCoefficients q;
    q.ham = ham;
    return q;
}

TrotterPropagator::TrotterPropagator(const GridOperators &ops, double step, double phase_step,
                                     double energy_offset)
    : basis_(ops.basis), step_(step) {
    half_v_.resize(ops.v.size());
    full_t_.resize(ops.t.size());
    for (Eigen::Index i = 0; i < ops.v.size(); ++i) {
        half_v_(i) = std::polar(1.0, -round_phase(0.5 * step * (ops.v(i) - energy_offset),
                                                  phase_step));
        full_t_(i) = std::polar(1.0, -round_phase(step * ops.t(i), phase_step));
    }
}

void TrotterPropagator::apply(Eigen::VectorXcd &amps, long long steps) const {
    if (steps <= 0) {
        return;
    }
    // Adjacent half V steps merge into full ones.
    const Eigen::VectorXcd full_v = half_v_.cwiseProduct(half_v_);
    amps = amps.cwiseProduct(half_v_);
    for (long long s = 0; s < steps; ++s) {
        shifted_dft_all(amps, basis_, false);
        amps = amps.cwiseProduct(full_t_);
        shifted_dft_all(amps, basis_, true);
        amps = amps.cwiseProduct(s + 1 < steps ? full_v : half_v_);
    }
}

StateVector trotter_oracle(const StateVector &state, const QuantizedCoefficients &quantized,
                           double t, long long r) {
    if (r < 1) {
        throw ConfigError("Trotter step count must be at least 1");
    }
    StateVector out = state;
    if (t == 0.0) {
        return out;
    }
    const GridOperators ops = GridOperators::build(quantized.ham, state.basis);
    const TrotterPropagator prop(ops, t / static_cast<double>(r), quantized.phase_step());
    prop.apply(out.amps, r);
    return out;
}

cplx error_operator_expectation_complex(const GridOperators &ops, const Eigen::VectorXcd &psi) {
    Eigen::VectorXcd a;
    Eigen::VectorXcd b;
    Eigen::VectorXcd tb;
    Eigen::VectorXcd vb;
    ops.apply_t(psi, a);
    ops.apply_v(psi, b);
    ops.apply_t(b, tb);
    ops.apply_v(b, vb);
    const Eigen::VectorXcd va = ops.v.cwiseProduct(a);
    const cplx ttv = a.dot(tb);
    const cplx vtt = std::conj(ttv);
    const cplx tvt = a.dot(va);
    const cplx vtv = b.dot(tb);
    const cplx vvt = b.dot(va);
    const cplx tvv = a.dot(vb);
    return (2.0 * (ttv + vtt) - 4.0 * tvt + 2.0 * vtv - vvt - tvv) / 24.0;
}

double error_operator_expectation(const GridOperators &ops, const StateVector &state) {
    const cplx z = error_operator_expectation_complex(ops, state.amps);
    const double scale = std::max(1.0, std::abs(z));
    if (std::abs(z.imag()) > 1e-8 * scale) {
        throw NumericalError("error operator expectation has an imaginary part");
    }
    return z.real();
}

TrotterPlan trotter_plan(const GridOperators &ops, const VscfSolution &sol,
                         const std::array<StateVector, 3> &components,
                         const std::array<bool, 3> &active, double epsilon_nu, double omega,
                         const PlanOptions &opts) {
    if (!(epsilon_nu > 0.0)) {
        throw ConfigError("epsilon_nu must be positive");
    }
    if (!(omega > 0.0)) {
        throw ConfigError("window width must be positive");
    }
    TrotterPlan plan;
    plan.epsilon_nu = epsilon_nu;
    plan.delta_t = kTwoPi / omega;
    plan.component_tau.fill(std::numeric_limits<double>::infinity());
    std::map<std::size_t, double> e2_cache;
    double tau_sum = 0.0;
    int tau_count = 0;
    bool any = false;
    for (int rho = 0; rho < 3; ++rho) {
        if (!active[rho]) {
            continue;
        }
        const Eigen::VectorXcd c = to_modal_basis(sol, components[rho].amps);
        const double total = c.squaredNorm();
        if (!(total > 1e-300)) {
            continue;
        }
        std::vector<std::size_t> order(static_cast<std::size_t>(c.size()));
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return std::norm(c(static_cast<Eigen::Index>(x))) >
                   std::norm(c(static_cast<Eigen::Index>(y)));
        });
        double covered = 0.0;
        double wsum = 0.0;
        double wtau = 0.0;
        for (std::size_t i : order) {
            if (covered >= opts.coverage) {
                break;
            }
            const double w = std::norm(c(static_cast<Eigen::Index>(i))) / total;
            covered += w;
            PlanEntry e;
            e.component = rho;
            e.indices = modal_indices(sol.basis, i);
            e.weight = w;
            auto it = e2_cache.find(i);
            if (it == e2_cache.end()) {
                const StateVector ps = product_state_vector(sol, e.indices);
                it = e2_cache.emplace(i, error_operator_expectation(ops, ps)).first;
            }
            e.e2 = it->second;
            if (e.e2 != 0.0) {
                e.tau = std::sqrt(epsilon_nu / std::abs(e.e2));
                wsum += w;
                wtau += w * e.tau;
            }
            plan.entries.push_back(std::move(e));
        }
        any = true;
        if (wsum > 0.0) {
            plan.component_tau[rho] = wtau / wsum;
            tau_sum += plan.component_tau[rho];
            ++tau_count;
        }
    }
    if (!any) {
        throw NumericalError("no active component overlaps the VSCF product basis");
    }
    if (tau_count == 0) {
        return plan;
    }
    plan.step_time = tau_sum / tau_count;
    const double r = std::ceil(plan.delta_t / plan.step_time);
    if (!(r < 1e12)) {
        throw NumericalError("Trotter step count overflows");
    }
    plan.steps_per_unit = std::max(1LL, static_cast<long long>(r));
    return plan;
}

} // namespace nirsim
