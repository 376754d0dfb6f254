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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nirsim {

/**
 * @brief Mode-index tuple of a monomial, sorted non-increasing.
 *
 * (2, 0, 0) denotes q_2 q_0 q_0.
 */
using Monomial = std::vector<int>;
using TermMap = std::map<Monomial, double>;

/// Coefficients with magnitude below this are dropped after any transform.
inline constexpr double kDropThreshold = 1e-10;

[[nodiscard]] Monomial canonical(Monomial idx);
[[nodiscard]] int distinct_modes(const Monomial &idx);

/**
 * @brief Taylor-form vibrational Hamiltonian.
 *
 * H = sum_{i,j} K_ij p_i p_j + sum_d sum_{t in phi_d} Phi_t prod_{a in t} q_a.
 *
 * The kinetic sum runs over all ordered pairs (K symmetric), so an
 * off-diagonal pair contributes 2 K_ij p_i p_j. Energies are in cm^-1 and
 * q, p are dimensionless. An unlocalized Hamiltonian has K_jj = w_j / 2 and
 * phi2[(j, j)] = w_j / 2.
 */
struct TaylorHamiltonian {
    int num_modes = 0;
    std::vector<double> harmonic_freqs;
    Eigen::MatrixXd kinetic;
    TermMap phi2;
    TermMap phi3;
    TermMap phi4;
    int n_mode = 0;
    int max_degree = 0;

    [[nodiscard]] const TermMap &terms(int degree) const;
    [[nodiscard]] TermMap &terms(int degree);
    /// Adds value to the canonical tuple; removes it if the sum vanishes.
    void add_term(Monomial idx, double value);
    [[nodiscard]] double term(Monomial idx) const;
    /// Number of stored potential monomials over all degrees.
    [[nodiscard]] std::size_t potential_term_count() const;
    /// Throws ConfigError when an invariant is violated.
    void validate() const;
    /// Smallest n_mode and max_degree consistent with the stored terms.
    void refresh_shape();
};

/// Builds a harmonic Hamiltonian with the given frequencies.
[[nodiscard]] TaylorHamiltonian harmonic_hamiltonian(const std::vector<double> &freqs);

/// Linear dipole expansion mu_rho = sum_i m_i^rho q_i for rho in {x, y, z}.
struct DipoleExpansion {
    std::array<std::vector<double>, 3> components;
    void validate(int num_modes) const;
};

/// Cartesian displacement per normal coordinate, 3 N_atoms rows by M columns.
struct DisplacementMatrix {
    Eigen::MatrixXd b;
    [[nodiscard]] int num_atoms() const { return static_cast<int>(b.rows() / 3); }
};

struct PesSample {
    std::vector<int> modes;
    std::vector<double> offsets;
    double energy = 0.0;
};

struct PesSampleSet {
    std::vector<PesSample> records;
    std::string quadrature;
};

struct PesFit {
    TaylorHamiltonian ham;
    double residual_rms = 0.0;
};

/**
 * @brief Fits Taylor tensors to n-mode increments of sampled energies.
 *
 * One- and two-mode increments are fitted independently by least squares
 * over monomials of degree 2..max_degree; the linear terms are fixed at zero.
 */
[[nodiscard]] PesFit fit_taylor_from_pes(const PesSampleSet &samples, int max_degree,
                                         int n_mode);

using ModelParams = std::map<std::string, double>;

struct ModelSystem {
    std::string name;
    TaylorHamiltonian ham;
    DipoleExpansion dipole;
    DisplacementMatrix disp;
};

[[nodiscard]] std::vector<std::string> model_catalog();
[[nodiscard]] ModelSystem build_model_system(std::string_view name,
                                             const ModelParams &params = {});

/**
 * @brief Dense n-mode stand-in with every allowed monomial present.
 *
 * Coefficients are deterministic and decay with degree; used for cost
 * model studies at sizes no model file provides.
 */
[[nodiscard]] TaylorHamiltonian dense_stand_in(int num_modes, int n_mode, int max_degree);

struct Localization {
    TaylorHamiltonian ham;
    /// Old coordinates in terms of new ones: q = U q_localized.
    Eigen::MatrixXd rotation;
    std::vector<double> objective_trace;
};

[[nodiscard]] Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd &b);
[[nodiscard]] double localization_objective(const Eigen::MatrixXd &u,
                                            const Eigen::MatrixXd &b_normalized);
/// Rotates all tensors to coordinates q = U q_new.
[[nodiscard]] TaylorHamiltonian rotate_hamiltonian(const TaylorHamiltonian &ham,
                                                   const Eigen::MatrixXd &u);
[[nodiscard]] Localization localize_modes(const TaylorHamiltonian &ham,
                                          const DisplacementMatrix &disp);

[[nodiscard]] TaylorHamiltonian n_mode_truncate(const TaylorHamiltonian &ham, int n);

/// Drops monomials below rel * max|Phi| of their degree.
[[nodiscard]] TaylorHamiltonian sparsify(const TaylorHamiltonian &ham, double rel);

/**
 * @brief Register multiplications needed to evaluate every monomial once.
 *
 * by_degree[d] counts products whose output register holds a degree-d
 * monomial, i.e. a ((d - 1) N x N) multiplier. Coefficient loads are not
 * included.
 */
struct ProductWalk {
    std::array<long long, 5> by_degree{};
    [[nodiscard]] long long total() const;
};

/// Walks the potential monomials; caching reuses q^2, q^3 and q_m^2 q_l.
[[nodiscard]] ProductWalk product_walk(const TaylorHamiltonian &ham, bool caching);

struct TermCount {
    std::array<long long, 5> per_degree{};
    long long kinetic = 0;
    long long n_taylor = 0;
    long long mults_cached = 0;
    long long mults_uncached = 0;
};

[[nodiscard]] TermCount count_terms(const TaylorHamiltonian &ham);

// JSON text I/O.
[[nodiscard]] std::string to_json(const TaylorHamiltonian &ham);
[[nodiscard]] TaylorHamiltonian hamiltonian_from_json(std::string_view text);
[[nodiscard]] std::string to_json(const DipoleExpansion &dip);
[[nodiscard]] DipoleExpansion dipole_from_json(std::string_view text);
[[nodiscard]] std::string to_json(const DisplacementMatrix &disp);
[[nodiscard]] DisplacementMatrix displacement_from_json(std::string_view text);
[[nodiscard]] std::string to_json(const PesSampleSet &set);
[[nodiscard]] PesSampleSet pes_from_json(std::string_view text);
[[nodiscard]] std::string rotation_to_json(const Eigen::MatrixXd &u);

} // namespace nirsim
