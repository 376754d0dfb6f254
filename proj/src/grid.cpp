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

#include "nirsim/grid.hpp"

#include <cmath>
#include <set>
#include <string>

#include "nirsim/error.hpp"

namespace nirsim {

GridBasis GridBasis::make(int qubits_per_mode, int num_modes) {
    if (qubits_per_mode < 1 || qubits_per_mode > 12) {
        throw ConfigError("qubits per mode must lie in 1..12");
    }
    if (num_modes < 1) {
        throw ConfigError("grid needs at least one mode");
    }
    GridBasis b;
    b.qubits_per_mode = qubits_per_mode;
    b.num_modes = num_modes;
    const double g = std::ldexp(1.0, qubits_per_mode);
    b.delta = std::sqrt(2.0 * std::acos(-1.0) / g);
    const auto half = static_cast<long>(b.mode_dim() / 2);
    for (long n = 0; n < static_cast<long>(b.mode_dim()); ++n) {
        b.points.push_back(b.delta * static_cast<double>(n - half));
    }
    return b;
}

void require_size(const GridBasis &basis, int max_qubits, const char *what) {
    const int q = basis.qubits_per_mode * basis.num_modes;
    if (q > max_qubits) {
        throw SizeGuardError(std::string(what) + ": " + std::to_string(q) +
                             " qubits exceed the limit of " + std::to_string(max_qubits) +
                             "; use the matrix-free path or fewer qubits per mode");
    }
}

Eigen::VectorXd position_diagonal(const GridBasis &basis, int mode) {
    if (mode < 0 || mode >= basis.num_modes) {
        throw ConfigError("mode " + std::to_string(mode) + " out of range");
    }
    require_size(basis, kMaxStateQubits, "position_diagonal");
    Eigen::VectorXd d(static_cast<Eigen::Index>(basis.dim()));
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        d(static_cast<Eigen::Index>(i)) = basis.points[basis.digit(i, mode)];
    }
    return d;
}

Eigen::MatrixXcd centered_dft_matrix(int qubits) {
    const long g = 1L << qubits;
    const double pi = std::acos(-1.0);
    Eigen::MatrixXcd f(g, g);
    const double s = 1.0 / std::sqrt(static_cast<double>(g));
    for (long j = 0; j < g; ++j) {
        for (long n = 0; n < g; ++n) {
            // Reduce the phase integer modulo g before the trig call.
            const long ph = ((j - g / 2) * (n - g / 2)) % g;
            const double a = -2.0 * pi * static_cast<double>(ph) / static_cast<double>(g);
            f(j, n) = std::polar(s, a);
        }
    }
    return f;
}

Eigen::MatrixXcd momentum_matrix(int qubits) {
    const GridBasis b = GridBasis::make(qubits, 1);
    const Eigen::MatrixXcd f = centered_dft_matrix(qubits);
    Eigen::VectorXd k = Eigen::Map<const Eigen::VectorXd>(b.points.data(),
                                                          static_cast<Eigen::Index>(b.points.size()));
    return f.adjoint() * k.asDiagonal() * f;
}

void apply_mode_matrix(Eigen::VectorXcd &amps, const GridBasis &basis, int mode,
                       const Eigen::MatrixXcd &op) {
    const std::size_t g = basis.mode_dim();
    const std::size_t stride = std::size_t{1} << (basis.qubits_per_mode * mode);
    const std::size_t block = stride * g;
    Eigen::VectorXcd buf(static_cast<Eigen::Index>(g));
    Eigen::VectorXcd res(static_cast<Eigen::Index>(g));
    for (std::size_t hi = 0; hi < basis.dim(); hi += block) {
        for (std::size_t lo = 0; lo < stride; ++lo) {
            const std::size_t base = hi + lo;
            for (std::size_t n = 0; n < g; ++n) {
                buf(static_cast<Eigen::Index>(n)) =
                    amps(static_cast<Eigen::Index>(base + n * stride));
            }
            res.noalias() = op * buf;
            for (std::size_t n = 0; n < g; ++n) {
                amps(static_cast<Eigen::Index>(base + n * stride)) =
                    res(static_cast<Eigen::Index>(n));
            }
        }
    }
}

void shifted_dft_all(Eigen::VectorXcd &amps, const GridBasis &basis, bool inverse) {
    Eigen::MatrixXcd f = centered_dft_matrix(basis.qubits_per_mode);
    if (inverse) {
        f.adjointInPlace();
    }
    for (int m = 0; m < basis.num_modes; ++m) {
        apply_mode_matrix(amps, basis, m, f);
    }
}

StateVector shifted_dft(const StateVector &state, const std::vector<int> &modes, bool inverse) {
    Eigen::MatrixXcd f = centered_dft_matrix(state.basis.qubits_per_mode);
    if (inverse) {
        f.adjointInPlace();
    }
    StateVector out = state;
    for (int m : modes) {
        if (m < 0 || m >= state.basis.num_modes) {
            throw ConfigError("mode " + std::to_string(m) + " out of range");
        }
        apply_mode_matrix(out.amps, out.basis, m, f);
    }
    return out;
}

cplx operator_moment(const StateVector &state, const Monomial &modes, bool momentum) {
    const GridBasis &b = state.basis;
    for (int m : modes) {
        if (m < 0 || m >= b.num_modes) {
            throw ConfigError("mode " + std::to_string(m) + " out of range");
        }
    }
    StateVector work = state;
    if (momentum) {
        std::set<int> uniq(modes.begin(), modes.end());
        work = shifted_dft(state, std::vector<int>(uniq.begin(), uniq.end()));
    }
    cplx acc = 0.0;
    for (std::size_t i = 0; i < b.dim(); ++i) {
        double w = 1.0;
        for (int m : modes) {
            w *= b.points[b.digit(i, m)];
        }
        acc += std::norm(work.amps(static_cast<Eigen::Index>(i))) * w;
    }
    return acc;
}

Eigen::VectorXd potential_diagonal(const TaylorHamiltonian &ham, const GridBasis &basis) {
    require_size(basis, kMaxStateQubits, "potential_diagonal");
    if (ham.num_modes != basis.num_modes) {
        throw ConfigError("grid and Hamiltonian disagree on the mode count");
    }
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    for (int d = 2; d <= 4; ++d) {
        for (const auto &[idx, c] : ham.terms(d)) {
            for (Eigen::Index i = 0; i < dim; ++i) {
                double w = c;
                for (int m : idx) {
                    w *= basis.points[basis.digit(static_cast<std::size_t>(i), m)];
                }
                v(i) += w;
            }
        }
    }
    return v;
}

Eigen::VectorXd kinetic_diagonal(const TaylorHamiltonian &ham, const GridBasis &basis) {
    require_size(basis, kMaxStateQubits, "kinetic_diagonal");
    if (ham.num_modes != basis.num_modes) {
        throw ConfigError("grid and Hamiltonian disagree on the mode count");
    }
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    Eigen::VectorXd t = Eigen::VectorXd::Zero(dim);
    const int m = ham.num_modes;
    std::vector<double> k(m);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (int a = 0; a < m; ++a) {
            k[a] = basis.points[basis.digit(static_cast<std::size_t>(i), a)];
        }
        double s = 0.0;
        for (int a = 0; a < m; ++a) {
            for (int c = 0; c < m; ++c) {
                s += ham.kinetic(a, c) * k[a] * k[c];
            }
        }
        t(i) = s;
    }
    return t;
}

GridOperators GridOperators::build(const TaylorHamiltonian &ham, const GridBasis &basis) {
    GridOperators ops;
    ops.basis = basis;
    ops.v = potential_diagonal(ham, basis);
    ops.t = kinetic_diagonal(ham, basis);
    return ops;
}

void GridOperators::apply_v(const Eigen::VectorXcd &in, Eigen::VectorXcd &out) const {
    out = v.cwiseProduct(in);
}

void GridOperators::apply_t(const Eigen::VectorXcd &in, Eigen::VectorXcd &out) const {
    out = in;
    shifted_dft_all(out, basis, false);
    out = t.cwiseProduct(out);
    shifted_dft_all(out, basis, true);
}

Eigen::VectorXcd GridOperators::apply_h(const Eigen::VectorXcd &in) const {
    Eigen::VectorXcd a;
    Eigen::VectorXcd b;
    apply_t(in, a);
    apply_v(in, b);
    return a + b;
}

} // namespace nirsim
