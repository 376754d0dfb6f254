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

#include "nirsim/vscf.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "nirsim/error.hpp"

namespace nirsim {

namespace {

struct Factor {
    double coef;
    std::map<int, int> powers;
};

std::vector<Factor> factor_terms(const TaylorHamiltonian &ham) {
    std::vector<Factor> out;
    for (int d = 2; d <= 4; ++d) {
        for (const auto &[idx, c] : ham.terms(d)) {
            Factor f{c, {}};
            for (int a : idx) {
                ++f.powers[a];
            }
            out.push_back(std::move(f));
        }
    }
    return out;
}

// Rotates each eigenvector so its largest component is real and positive.
void fix_phases(Eigen::MatrixXcd &v) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        Eigen::Index best = 0;
        v.col(j).cwiseAbs().maxCoeff(&best);
        const cplx z = v(best, j);
        v.col(j) *= std::conj(z) / std::abs(z);
    }
}

struct ModeMoments {
    std::array<double, 5> q{};
    double p = 0.0;
    double p2 = 0.0;
};

ModeMoments moments(const Eigen::VectorXcd &phi, const std::vector<double> &pts,
                    const Eigen::MatrixXcd &p, const Eigen::MatrixXcd &p2) {
    ModeMoments mm;
    for (Eigen::Index n = 0; n < phi.size(); ++n) {
        const double w = std::norm(phi(n));
        double x = 1.0;
        for (int a = 0; a <= 4; ++a) {
            mm.q[a] += w * x;
            x *= pts[n];
        }
    }
    mm.p = phi.dot(p * phi).real();
    mm.p2 = phi.dot(p2 * phi).real();
    return mm;
}

} // namespace

double VscfSolution::excitation_energy(const std::vector<int> &indices) const {
    double w = 0.0;
    for (std::size_t m = 0; m < indices.size(); ++m) {
        w += energies[m](indices[m]) - energies[m](0);
    }
    return w;
}

VscfSolution solve_vscf(const TaylorHamiltonian &ham, const GridBasis &basis,
                        const VscfOptions &opts) {
    if (ham.max_degree > 4) {
        throw ConfigError("VSCF supports Taylor degree up to 4");
    }
    if (ham.num_modes != basis.num_modes) {
        throw ConfigError("grid and Hamiltonian disagree on the mode count");
    }
    const int nm = ham.num_modes;
    const auto g = static_cast<Eigen::Index>(basis.mode_dim());
    const Eigen::MatrixXcd p = momentum_matrix(basis.qubits_per_mode);
    const Eigen::MatrixXcd p2 = p * p;
    const std::vector<Factor> terms = factor_terms(ham);

    VscfSolution sol;
    sol.basis = basis;
    sol.modals.assign(nm, Eigen::MatrixXcd());
    sol.energies.assign(nm, Eigen::VectorXd());

    std::vector<ModeMoments> mom(nm);
    auto diagonalize = [&](bool mean_field) {
        for (int m = 0; m < nm; ++m) {
            Eigen::MatrixXcd h = ham.kinetic(m, m) * p2;
            if (mean_field) {
                double drift = 0.0;
                for (int l = 0; l < nm; ++l) {
                    if (l != m) {
                        drift += 2.0 * ham.kinetic(m, l) * mom[l].p;
                    }
                }
                h += drift * p;
            }
            Eigen::VectorXd veff = Eigen::VectorXd::Zero(g);
            for (const auto &f : terms) {
                auto it = f.powers.find(m);
                if (it == f.powers.end()) {
                    continue;
                }
                if (!mean_field && f.powers.size() > 1) {
                    continue;
                }
                double c = f.coef;
                for (const auto &[l, a] : f.powers) {
                    if (l != m) {
                        c *= mom[l].q[a];
                    }
                }
                for (Eigen::Index n = 0; n < g; ++n) {
                    veff(n) += c * std::pow(basis.points[n], it->second);
                }
            }
            h.diagonal() += veff.cast<cplx>();
            h = 0.5 * (h + h.adjoint()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
            if (es.info() != Eigen::Success) {
                throw NumericalError("modal diagonalization failed", sol.trace);
            }
            sol.modals[m] = es.eigenvectors();
            fix_phases(sol.modals[m]);
            sol.energies[m] = es.eigenvalues();
        }
        for (int m = 0; m < nm; ++m) {
            mom[m] = moments(sol.modals[m].col(0), basis.points, p, p2);
        }
    };
    auto energy = [&]() {
        double e = 0.0;
        for (int m = 0; m < nm; ++m) {
            e += ham.kinetic(m, m) * mom[m].p2;
            for (int l = 0; l < nm; ++l) {
                if (l != m) {
                    e += ham.kinetic(m, l) * mom[m].p * mom[l].p;
                }
            }
        }
        for (const auto &f : terms) {
            double c = f.coef;
            for (const auto &[l, a] : f.powers) {
                c *= mom[l].q[a];
            }
            e += c;
        }
        return e;
    };

    diagonalize(false);
    sol.trace.push_back(energy());
    for (int it = 1; it <= opts.max_iterations; ++it) {
        diagonalize(true);
        const double e = energy();
        const double prev = sol.trace.back();
        sol.trace.push_back(e);
        sol.iterations = it;
        if (e > prev + 1e-9) {
            sol.monotonic = false;
        }
        if (std::abs(e - prev) < opts.tolerance) {
            sol.e0 = e;
            return sol;
        }
    }
    throw NumericalError("VSCF did not converge in " + std::to_string(opts.max_iterations) +
                             " iterations",
                         sol.trace);
}

std::vector<ProductState> vscf_excitations(const VscfSolution &sol, double lo, double hi,
                                           int max_quanta) {
    std::vector<ProductState> out;
    const int nm = sol.basis.num_modes;
    const int g = static_cast<int>(sol.basis.mode_dim());
    std::vector<int> idx(nm, 0);
    std::function<void(int, int)> rec = [&](int m, int left) {
        if (m == nm) {
            const double w = sol.excitation_energy(idx);
            if (w >= lo && w <= hi) {
                out.push_back({idx, {1.0, 0.0}, w});
            }
            return;
        }
        for (int n = 0; n <= std::min(left, g - 1); ++n) {
            idx[m] = n;
            rec(m + 1, left - n);
        }
        idx[m] = 0;
    };
    rec(0, max_quanta);
    return out;
}

StateVector product_state_vector(const VscfSolution &sol, const std::vector<int> &indices) {
    const GridBasis &b = sol.basis;
    require_size(b, kMaxStateQubits, "product_state_vector");
    StateVector s;
    s.basis = b;
    s.amps.resize(static_cast<Eigen::Index>(b.dim()));
    for (std::size_t i = 0; i < b.dim(); ++i) {
        cplx a = 1.0;
        for (int m = 0; m < b.num_modes; ++m) {
            a *= sol.modals[m](static_cast<Eigen::Index>(b.digit(i, m)), indices[m]);
        }
        s.amps(static_cast<Eigen::Index>(i)) = a;
    }
    return s;
}

Eigen::VectorXcd to_modal_basis(const VscfSolution &sol, const Eigen::VectorXcd &amps) {
    Eigen::VectorXcd c = amps;
    for (int m = 0; m < sol.basis.num_modes; ++m) {
        apply_mode_matrix(c, sol.basis, m, sol.modals[m].adjoint());
    }
    return c;
}

Eigen::VectorXcd from_modal_basis(const VscfSolution &sol, const Eigen::VectorXcd &coeffs) {
    Eigen::VectorXcd a = coeffs;
    for (int m = 0; m < sol.basis.num_modes; ++m) {
        apply_mode_matrix(a, sol.basis, m, sol.modals[m]);
    }
    return a;
}

std::vector<int> modal_indices(const GridBasis &basis, std::size_t index) {
    std::vector<int> idx(basis.num_modes);
    for (int m = 0; m < basis.num_modes; ++m) {
        idx[m] = static_cast<int>(basis.digit(index, m));
    }
    return idx;
}

} // namespace nirsim
