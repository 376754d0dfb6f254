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
#include <cstdint>
#include <string>
#include <vector>

#include "nirsim/dynamics.hpp"
#include "nirsim/grid.hpp"
#include "nirsim/hamiltonian.hpp"
#include "nirsim/vscf.hpp"

namespace nirsim {

/// Spectral window and line-shape parameters, all in cm^-1 except epsilon.
struct WindowConfig {
    double omega_min = 3500.0;
    double omega_max = 12500.0;
    double cutoff = 3750.0;
    double padding = 250.0;
    double eta = 10.0;
    double epsilon = 0.8;
    double total_shots = 1e5;
    int grid_points = 2048;

    [[nodiscard]] double width() const { return omega_max - omega_min; }
    /// ln(1 / epsilon) / eta, in cm.
    [[nodiscard]] double t_max() const;
    [[nodiscard]] int k_max() const;
    /// Per-index damping exp(-2 pi eta / Omega).
    [[nodiscard]] double damping() const;
    /// Omega / (2 k_max + 1).
    [[nodiscard]] double resolution() const;
    void validate() const;
};

[[nodiscard]] WindowConfig window_defaults();

struct DipoleComponent {
    StateVector state;
    double mu_norm = 0.0;
    bool active = false;
};

/// mu_rho |ground> per Cartesian component, renormalized.
[[nodiscard]] std::array<DipoleComponent, 3> dipole_excite(const DipoleExpansion &dipole,
                                                           const StateVector &ground);

struct Projection {
    StateVector state;
    double retained = 1.0;
    double removed = 0.0;
};

/// Removes modal product components with excitation energy below the cutoff.
[[nodiscard]] Projection project_window(const StateVector &state, const VscfSolution &sol,
                                        double cutoff);

/// <psi| U^(k r) |psi> with a fresh evolution of k r split steps.
[[nodiscard]] cplx autocorrelation(const StateVector &state,
                                   const QuantizedCoefficients &quantized,
                                   const TrotterPlan &plan, int k, double omega,
                                   double energy_offset = 0.0);

/// All k in 0..k_max by repeated application of U^r.
[[nodiscard]] std::vector<cplx> autocorrelation_series(const StateVector &state,
                                                       const QuantizedCoefficients &quantized,
                                                       const TrotterPlan &plan, int k_max,
                                                       double omega,
                                                       double energy_offset = 0.0);

/// Exact propagation through the dense eigendecomposition.
[[nodiscard]] std::vector<cplx> exact_autocorrelation_series(const DenseSpectrum &spec,
                                                             const Eigen::VectorXcd &psi,
                                                             int k_max, double omega,
                                                             double energy_offset = 0.0);

struct ShotLedger {
    double total_shots = 0.0;
    double per_component = 0.0;
    double normalization = 0.0;
    std::vector<long long> n_k;
    std::uint64_t seed = 0;
    std::array<std::vector<double>, 3> x;
    std::array<std::vector<double>, 3> y;

    [[nodiscard]] long long allocated() const;
};

/// N_k = round(S N q^k) for k = 1..k_max, with n_k[0] = 0.
[[nodiscard]] ShotLedger allocate_shots(const WindowConfig &window, std::uint64_t seed);

struct HadamardSample {
    double x = 0.0;
    double y = 0.0;
};

/**
 * @brief Hadamard-test outcome means for Re and Im of an expectation.
 *
 * Each (component, k, part) draws from its own stream keyed by the master
 * seed, so the result does not depend on evaluation order.
 */
[[nodiscard]] HadamardSample sample_hadamard(cplx expectation, long long n_shots,
                                             std::uint64_t seed, int component = 0, int k = 0);

/// Fills ledger tallies for one component and returns the estimated p[k].
[[nodiscard]] std::vector<cplx> sampled_fourier(ShotLedger &ledger, int component,
                                                const std::vector<cplx> &expectations);

/// q^k times the expectations.
[[nodiscard]] std::vector<cplx> exact_fourier(const WindowConfig &window,
                                              const std::vector<cplx> &expectations);

struct Peak {
    double position = 0.0;
    double amplitude = 0.0;
};

struct SpectrumEstimate {
    WindowConfig window;
    int k_max = 0;
    std::array<std::vector<cplx>, 3> fourier;
    std::vector<double> omega;
    std::array<std::vector<double>, 3> p;
    std::vector<double> sigma;
    std::array<double, 3> mu_norm2{};
    std::array<double, 3> proj_norm2{1.0, 1.0, 1.0};
    std::array<bool, 3> active{};
    /// Fourier coefficients carry shot noise from window.total_shots.
    bool sampled = false;
    std::vector<Peak> peaks;
};

/**
 * @brief Fourier-series spectrum per component and the combined cross section.
 *
 * P_rho includes the factor ||Pi_W psi_rho||^2 and
 * sigma = omega sum_rho |mu_rho|^2 P_rho.
 */
[[nodiscard]] SpectrumEstimate reconstruct(const WindowConfig &window,
                                           const std::array<std::vector<cplx>, 3> &fourier,
                                           const std::array<double, 3> &mu_norm2,
                                           const std::array<double, 3> &proj_norm2,
                                           const std::array<bool, 3> &active);

/// Truncated-series line shape (1/Omega) sum_{k>=1} q^k cos(2 pi k (w - e) / Omega).
[[nodiscard]] double line_shape(const WindowConfig &window, double w, double e);

/**
 * @brief Greedy extraction of truncated Lorentzians from the combined series.
 *
 * Works on sum_rho |mu|^2 ||Pi||^2 p_rho[k] without the k = 0 term. Stops when
 * the next height drops below the mean absolute residual, below
 * rel_floor times the first height, or at max_peaks.
 */
[[nodiscard]] std::vector<Peak> matching_pursuit(const SpectrumEstimate &spec, int max_peaks,
                                                 double rel_floor = 1e-6);

/// Stick spectrum from dense eigenpairs: positions E_f - e_ref, weights.
struct Stick {
    double position = 0.0;
    double intensity = 0.0;
};

/**
 * @brief Sticks of the normalized components with positions inside [lo, hi].
 *
 * With fold set, every eigenstate contributes at its position reduced
 * modulo hi - lo into [lo, hi), which is where a Fourier series with that
 * period places it.
 */
[[nodiscard]] std::vector<Stick> dense_sticks(const DenseSpectrum &spec,
                                              const std::array<DipoleComponent, 3> &comps,
                                              const std::array<double, 3> &proj_norm2,
                                              double e_ref, double lo, double hi,
                                              bool fold = false);

[[nodiscard]] std::vector<Stick> as_sticks(const std::vector<Peak> &peaks);

struct PeakComparison {
    bool ok = true;
    double worst = 0.0;
    int matched = 0;
    std::vector<std::string> problems;
};

/**
 * @brief Two-sided match of significant peaks.
 *
 * Each reference stick and each pipeline peak above rel_threshold of its own
 * maximum must find a partner within tol.
 */
[[nodiscard]] PeakComparison compare_peaks(const std::vector<Peak> &peaks,
                                           const std::vector<Stick> &reference, double tol,
                                           double rel_threshold = 0.01);

// Export.
[[nodiscard]] std::string spectrum_csv(const SpectrumEstimate &spec);
[[nodiscard]] std::vector<std::array<double, 5>> parse_spectrum_csv(const std::string &text);

} // namespace nirsim
