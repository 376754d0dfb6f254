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

#include "nirsim/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "nirsim/error.hpp"

namespace nirsim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

} // namespace

double WindowConfig::t_max() const { return std::log(1.0 / epsilon) / eta; }

int WindowConfig::k_max() const {
    return static_cast<int>(std::ceil(width() * t_max() - 1e-9));
}

double WindowConfig::damping() const { return std::exp(-kTwoPi * eta / width()); }

double WindowConfig::resolution() const { return width() / (2.0 * k_max() + 1.0); }

void WindowConfig::validate() const {
    if (!(omega_max > omega_min)) {
        throw ConfigError("window needs omega_max > omega_min");
    }
    if (!(eta > 0.0)) {
        throw ConfigError("broadening eta must be positive");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ConfigError("truncation epsilon must lie in (0, 1)");
    }
    if (!(cutoff < omega_max)) {
        throw ConfigError("cutoff must lie below omega_max");
    }
    if (padding < 0.0) {
        throw ConfigError("padding must be non-negative");
    }
    if (grid_points < 2) {
        throw ConfigError("spectrum grid needs at least 2 points");
    }
    if (!(total_shots >= 0.0)) {
        throw ConfigError("shot count must be non-negative");
    }
    if (k_max() < 1) {
        throw ConfigError("window parameters give k_max = 0; decrease epsilon or eta");
    }
}

WindowConfig window_defaults() { return WindowConfig{}; }

std::array<DipoleComponent, 3> dipole_excite(const DipoleExpansion &dipole,
                                             const StateVector &ground) {
    const GridBasis &b = ground.basis;
    dipole.validate(b.num_modes);
    std::array<DipoleComponent, 3> out;
    for (int rho = 0; rho < 3; ++rho) {
        const auto &m = dipole.components[rho];
        DipoleComponent &c = out[rho];
        c.state = ground;
        const bool zero = std::all_of(m.begin(), m.end(), [](double v) { return v == 0.0; });
        if (zero) {
            c.state.amps.setZero();
            continue;
        }
        for (std::size_t i = 0; i < b.dim(); ++i) {
            double mu = 0.0;
            for (int a = 0; a < b.num_modes; ++a) {
                mu += m[a] * b.points[b.digit(i, a)];
            }
            c.state.amps(static_cast<Eigen::Index>(i)) *= mu;
        }
        c.mu_norm = c.state.amps.norm();
        if (c.mu_norm < 1e-14) {
            c.mu_norm = 0.0;
            c.state.amps.setZero();
            continue;
        }
        c.state.amps /= c.mu_norm;
        c.active = true;
    }
    return out;
}

Projection project_window(const StateVector &state, const VscfSolution &sol, double cutoff) {
    Eigen::VectorXcd c = to_modal_basis(sol, state.amps);
    const double before = c.squaredNorm();
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const auto idx = modal_indices(sol.basis, static_cast<std::size_t>(i));
        if (sol.excitation_energy(idx) < cutoff) {
            c(i) = 0.0;
        }
    }
    const double kept = c.squaredNorm();
    Projection p;
    p.retained = before > 0.0 ? kept / before : 0.0;
    p.removed = 1.0 - p.retained;
    if (p.retained < 1e-12) {
        throw NumericalError("window projection leaves no intensity above the cutoff");
    }
    p.state = state;
    p.state.amps = from_modal_basis(sol, c) / std::sqrt(kept);
    return p;
}

cplx autocorrelation(const StateVector &state, const QuantizedCoefficients &quantized,
                     const TrotterPlan &plan, int k, double omega, double energy_offset) {
    if (k < 0) {
        throw ConfigError("Fourier index must be non-negative");
    }
    if (k == 0) {
        return state.amps.squaredNorm();
    }
    const GridOperators ops = GridOperators::build(quantized.ham, state.basis);
    const double dt = kTwoPi / omega;
    const long long r = plan.steps_per_unit;
    const TrotterPropagator prop(ops, dt / static_cast<double>(r), quantized.phase_step(),
                                 energy_offset);
    Eigen::VectorXcd phi = state.amps;
    prop.apply(phi, static_cast<long long>(k) * r);
    return state.amps.dot(phi);
}

std::vector<cplx> autocorrelation_series(const StateVector &state,
                                         const QuantizedCoefficients &quantized,
                                         const TrotterPlan &plan, int k_max, double omega,
                                         double energy_offset) {
    const GridOperators ops = GridOperators::build(quantized.ham, state.basis);
    const double dt = kTwoPi / omega;
    const long long r = plan.steps_per_unit;
    const TrotterPropagator prop(ops, dt / static_cast<double>(r), quantized.phase_step(),
                                 energy_offset);
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(k_max) + 1);
    Eigen::VectorXcd phi = state.amps;
    out.push_back(state.amps.squaredNorm());
    for (int k = 1; k <= k_max; ++k) {
        prop.apply(phi, r);
        out.push_back(state.amps.dot(phi));
    }
    return out;
}

std::vector<cplx> exact_autocorrelation_series(const DenseSpectrum &spec,
                                               const Eigen::VectorXcd &psi, int k_max,
                                               double omega, double energy_offset) {
    const Eigen::VectorXcd c = spec.vectors.adjoint() * psi;
    std::vector<cplx> out(static_cast<std::size_t>(k_max) + 1, 0.0);
    const double dt = kTwoPi / omega;
    for (Eigen::Index f = 0; f < c.size(); ++f) {
        const double w = std::norm(c(f));
        if (w == 0.0) {
            continue;
        }
        const double e = spec.values(f) - energy_offset;
        for (int k = 0; k <= k_max; ++k) {
            out[k] += w * std::polar(1.0, -e * dt * k);
        }
    }
    return out;
}

long long ShotLedger::allocated() const {
    long long s = 0;
    for (long long n : n_k) {
        s += 2 * n;
    }
    return s;
}

ShotLedger allocate_shots(const WindowConfig &window, std::uint64_t seed) {
    window.validate();
    const int kmax = window.k_max();
    const double q = window.damping();
    ShotLedger l;
    l.total_shots = window.total_shots;
    l.per_component = window.total_shots / 3.0;
    l.seed = seed;
    double sum = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        sum += std::pow(q, k);
    }
    l.normalization = 1.0 / (2.0 * sum);
    l.n_k.assign(static_cast<std::size_t>(kmax) + 1, 0);
    for (int k = 1; k <= kmax; ++k) {
        l.n_k[k] = std::llround(l.per_component * l.normalization * std::pow(q, k));
    }
    for (auto &v : l.x) {
        v.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    }
    for (auto &v : l.y) {
        v.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    }
    return l;
}

namespace {

double bernoulli_mean(double mean, long long n, std::uint64_t seed, int component, int k,
                      int part) {
    if (n <= 0) {
        return 0.0;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffU),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(component), static_cast<std::uint32_t>(k),
                      static_cast<std::uint32_t>(part)};
    std::mt19937_64 rng(seq);
    const double p_plus = 0.5 * (1.0 + mean);
    long long plus = 0;
    for (long long s = 0; s < n; ++s) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        plus += u < p_plus ? 1 : 0;
    }
    return static_cast<double>(2 * plus - n) / static_cast<double>(n);
}

} // namespace

HadamardSample sample_hadamard(cplx expectation, long long n_shots, std::uint64_t seed,
                               int component, int k) {
    if (std::abs(expectation.real()) > 1.0 + 1e-9 || std::abs(expectation.imag()) > 1.0 + 1e-9 ||
        std::abs(expectation) > 1.0 + 1e-9) {
        throw NumericalError("Hadamard-test expectation exceeds unit modulus");
    }
    if (n_shots < 0) {
        throw ConfigError("shot count must be non-negative");
    }
    return {bernoulli_mean(expectation.real(), n_shots, seed, component, k, 0),
            bernoulli_mean(expectation.imag(), n_shots, seed, component, k, 1)};
}

std::vector<cplx> sampled_fourier(ShotLedger &ledger, int component,
                                  const std::vector<cplx> &expectations) {
    const std::size_t kmax = ledger.n_k.size() - 1;
    if (expectations.size() < kmax + 1) {
        throw ConfigError("expectation series shorter than k_max");
    }
    std::vector<cplx> p(kmax + 1, 0.0);
    p[0] = 1.0;
    const double s_norm = ledger.per_component * ledger.normalization;
    for (std::size_t k = 1; k <= kmax; ++k) {
        const HadamardSample h = sample_hadamard(expectations[k], ledger.n_k[k], ledger.seed,
                                                 component, static_cast<int>(k));
        ledger.x[component][k] = h.x;
        ledger.y[component][k] = h.y;
        p[k] = static_cast<double>(ledger.n_k[k]) * cplx(h.x, h.y) / s_norm;
    }
    return p;
}

std::vector<cplx> exact_fourier(const WindowConfig &window,
                                const std::vector<cplx> &expectations) {
    const double q = window.damping();
    std::vector<cplx> p(expectations.size());
    double w = 1.0;
    for (std::size_t k = 0; k < expectations.size(); ++k) {
        p[k] = w * expectations[k];
        w *= q;
    }
    return p;
}

SpectrumEstimate reconstruct(const WindowConfig &window,
                             const std::array<std::vector<cplx>, 3> &fourier,
                             const std::array<double, 3> &mu_norm2,
                             const std::array<double, 3> &proj_norm2,
                             const std::array<bool, 3> &active) {
    window.validate();
    SpectrumEstimate s;
    s.window = window;
    s.k_max = window.k_max();
    s.fourier = fourier;
    s.mu_norm2 = mu_norm2;
    s.proj_norm2 = proj_norm2;
    s.active = active;
    const int g = window.grid_points;
    const double om = window.width();
    s.omega.resize(g);
    for (int i = 0; i < g; ++i) {
        s.omega[i] = window.omega_min + (window.omega_max - window.omega_min) * i / (g - 1);
    }
    s.sigma.assign(g, 0.0);
    for (int rho = 0; rho < 3; ++rho) {
        s.p[rho].assign(g, 0.0);
        if (!active[rho]) {
            continue;
        }
        const auto &f = fourier[rho];
        if (static_cast<int>(f.size()) < s.k_max + 1) {
            throw ConfigError("Fourier series shorter than k_max");
        }
        for (int i = 0; i < g; ++i) {
            double acc = 0.5 * f[0].real();
            const double th = kTwoPi * s.omega[i] / om;
            for (int k = 1; k <= s.k_max; ++k) {
                acc += (f[k] * std::polar(1.0, th * k)).real();
            }
            s.p[rho][i] = proj_norm2[rho] * acc / om;
            s.sigma[i] += s.omega[i] * mu_norm2[rho] * s.p[rho][i];
        }
    }
    return s;
}

double line_shape(const WindowConfig &window, double w, double e) {
    const double q = window.damping();
    const double om = window.width();
    double acc = 0.0;
    double qk = 1.0;
    for (int k = 1; k <= window.k_max(); ++k) {
        qk *= q;
        acc += qk * std::cos(kTwoPi * k * (w - e) / om);
    }
    return acc / om;
}

std::vector<Peak> matching_pursuit(const SpectrumEstimate &spec, int max_peaks,
                                   double rel_floor) {
    const int kmax = spec.k_max;
    const double om = spec.window.width();
    const double q = spec.window.damping();
    std::vector<cplx> r(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (int rho = 0; rho < 3; ++rho) {
        if (!spec.active[rho]) {
            continue;
        }
        const double w = spec.mu_norm2[rho] * spec.proj_norm2[rho];
        for (int k = 1; k <= kmax; ++k) {
            r[k] += w * spec.fourier[rho][k];
        }
    }
    std::vector<double> qk(static_cast<std::size_t>(kmax) + 1, 1.0);
    double atom_norm = 0.0;
    double qsum = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        qk[k] = qk[k - 1] * q;
        atom_norm += qk[k] * qk[k];
        qsum += qk[k];
    }
    // Standard deviation of a fitted height under shot noise, from the allocation.
    double noise_height = 0.0;
    if (spec.sampled) {
        const double sn = spec.window.total_shots / 3.0 * 0.5 / qsum;
        double w2 = 0.0;
        for (int rho = 0; rho < 3; ++rho) {
            if (spec.active[rho]) {
                const double w = spec.mu_norm2[rho] * spec.proj_norm2[rho];
                w2 += w * w;
            }
        }
        double var = 0.0;
        for (int k = 1; k <= kmax; ++k) {
            const double nk = static_cast<double>(std::llround(spec.window.total_shots / 3.0 *
                                                               (0.5 / qsum) * qk[k]));
            var += qk[k] * qk[k] * w2 * nk / (sn * sn);
        }
        noise_height = std::sqrt(var) / atom_norm * qsum / om;
    }
    const auto &grid = spec.omega;
    const std::size_t g = grid.size();
    std::vector<std::vector<cplx>> phase(g, std::vector<cplx>(static_cast<std::size_t>(kmax) + 1));
    for (std::size_t i = 0; i < g; ++i) {
        for (int k = 0; k <= kmax; ++k) {
            phase[i][k] = std::polar(1.0, kTwoPi * k * grid[i] / om);
        }
    }
    auto corr_at = [&](double e) {
        double c = 0.0;
        for (int k = 1; k <= kmax; ++k) {
            c += qk[k] * (r[k] * std::polar(1.0, kTwoPi * k * e / om)).real();
        }
        return c;
    };
    std::vector<Peak> peaks;
    double first = 0.0;
    std::vector<double> corr(g);
    const std::vector<cplx> data = r;
    std::vector<double> pos;
    std::vector<double> amp;
    double best_e = 0.0;
    // Golden-section maximum of the correlation on [lo, hi]; returns the amplitude.
    auto refine = [&](double lo, double hi) {
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo);
        double x2 = lo + gr * (hi - lo);
        double f1 = corr_at(x1);
        double f2 = corr_at(x2);
        for (int i = 0; i < 60; ++i) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = corr_at(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = corr_at(x1);
            }
        }
        best_e = 0.5 * (lo + hi);
        return corr_at(best_e) / atom_norm;
    };
    auto add_atom = [&](double a, double e) {
        for (int k = 1; k <= kmax; ++k) {
            r[k] += a * qk[k] * std::polar(1.0, -kTwoPi * k * e / om);
        }
    };
    // Joint least squares of all amplitudes against the original coefficients.
    auto fit_amplitudes = [&]() {
        const auto n = static_cast<Eigen::Index>(pos.size());
        Eigen::MatrixXd gram(n, n);
        Eigen::VectorXd rhs(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double b = 0.0;
            for (int k = 1; k <= kmax; ++k) {
                b += qk[k] * (data[k] * std::polar(1.0, kTwoPi * k * pos[i] / om)).real();
            }
            rhs(i) = b;
            for (Eigen::Index j = 0; j <= i; ++j) {
                double gij = 0.0;
                for (int k = 1; k <= kmax; ++k) {
                    gij += qk[k] * qk[k] * std::cos(kTwoPi * k * (pos[i] - pos[j]) / om);
                }
                gram(i, j) = gij;
                gram(j, i) = gij;
            }
        }
        const Eigen::VectorXd a = gram.ldlt().solve(rhs);
        amp.assign(a.data(), a.data() + n);
        r = data;
        for (Eigen::Index i = 0; i < n; ++i) {
            add_atom(-amp[i], pos[i]);
        }
    };
    for (int it = 0; it < max_peaks; ++it) {
        double floor = 0.0;
        std::size_t best = 0;
        for (std::size_t i = 0; i < g; ++i) {
            double c = 0.0;
            double sres = 0.0;
            for (int k = 1; k <= kmax; ++k) {
                const double re = (r[k] * phase[i][k]).real();
                c += qk[k] * re;
                sres += re;
            }
            corr[i] = c;
            floor += std::abs(sres / om);
            if (c > corr[best]) {
                best = i;
            }
        }
        floor /= static_cast<double>(g);
        if (!(corr[best] > 0.0)) {
            break;
        }
        const double cell = grid[1] - grid[0];
        const double height = refine(grid[best] - cell, grid[best] + cell) * qsum / om;
        if (it == 0) {
            first = height;
        }
        if (height < floor || height < rel_floor * first || height < 4.0 * noise_height ||
            !(height > 0.0)) {
            break;
        }
        pos.push_back(best_e);
        for (int sweep = 0; sweep < 4; ++sweep) {
            fit_amplitudes();
            // Re-centre each atom against the residual with its own line added back.
            for (std::size_t j = 0; j < pos.size(); ++j) {
                add_atom(amp[j], pos[j]);
                (void)refine(pos[j] - 0.5 * cell, pos[j] + 0.5 * cell);
                pos[j] = best_e;
                add_atom(-amp[j], pos[j]);
            }
        }
        fit_amplitudes();
    }
    for (std::size_t j = 0; j < pos.size(); ++j) {
        if (amp[j] > 0.0) {
            peaks.push_back({pos[j], amp[j] * qsum / om});
        }
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak &x, const Peak &y) { return x.position < y.position; });
    return peaks;
}

std::vector<Stick> dense_sticks(const DenseSpectrum &spec,
                                const std::array<DipoleComponent, 3> &comps,
                                const std::array<double, 3> &proj_norm2, double e_ref,
                                double lo, double hi, bool fold) {
    std::vector<Stick> out;
    std::vector<double> inten(static_cast<std::size_t>(spec.values.size()), 0.0);
    for (int rho = 0; rho < 3; ++rho) {
        if (!comps[rho].active) {
            continue;
        }
        const Eigen::VectorXcd c = spec.vectors.adjoint() * comps[rho].state.amps;
        const double w = comps[rho].mu_norm * comps[rho].mu_norm * proj_norm2[rho];
        for (Eigen::Index f = 0; f < c.size(); ++f) {
            inten[f] += w * std::norm(c(f));
        }
    }
    for (Eigen::Index f = 0; f < spec.values.size(); ++f) {
        double pos = spec.values(f) - e_ref;
        if (fold) {
            const double period = hi - lo;
            pos = lo + std::fmod(std::fmod(pos - lo, period) + period, period);
        }
        if (pos >= lo && pos <= hi) {
            out.push_back({pos, inten[f]});
        }
    }
    return out;
}

std::vector<Stick> as_sticks(const std::vector<Peak> &peaks) {
    std::vector<Stick> s;
    for (const auto &p : peaks) {
        s.push_back({p.position, p.amplitude});
    }
    return s;
}

PeakComparison compare_peaks(const std::vector<Peak> &peaks, const std::vector<Stick> &reference,
                             double tol, double rel_threshold) {
    PeakComparison cmp;
    double pmax = 0.0;
    double rmax = 0.0;
    for (const auto &p : peaks) {
        pmax = std::max(pmax, p.amplitude);
    }
    for (const auto &s : reference) {
        rmax = std::max(rmax, s.intensity);
    }
    char buf[160];
    // Partners may be weaker than the threshold by this factor.
    constexpr double kSlack = 0.25;
    for (const auto &s : reference) {
        if (s.intensity < rel_threshold * rmax) {
            continue;
        }
        double best = 1e300;
        for (const auto &p : peaks) {
            if (p.amplitude >= kSlack * rel_threshold * pmax) {
                best = std::min(best, std::abs(p.position - s.position));
            }
        }
        if (best > tol) {
            cmp.ok = false;
            std::snprintf(buf, sizeof buf, "reference line at %.3f has no peak within %.3f",
                          s.position, tol);
            cmp.problems.emplace_back(buf);
        } else {
            cmp.worst = std::max(cmp.worst, best);
            ++cmp.matched;
        }
    }
    for (const auto &p : peaks) {
        if (p.amplitude < rel_threshold * pmax) {
            continue;
        }
        double best = 1e300;
        for (const auto &s : reference) {
            if (s.intensity >= kSlack * rel_threshold * rmax) {
                best = std::min(best, std::abs(p.position - s.position));
            }
        }
        if (best > tol) {
            cmp.ok = false;
            std::snprintf(buf, sizeof buf, "peak at %.3f has no reference line within %.3f",
                          p.position, tol);
            cmp.problems.emplace_back(buf);
        } else {
            cmp.worst = std::max(cmp.worst, best);
        }
    }
    return cmp;
}

std::string spectrum_csv(const SpectrumEstimate &spec) {
    std::string out = "omega_cm1,P_x,P_y,P_z,sigma_A\n";
    char buf[256];
    for (std::size_t i = 0; i < spec.omega.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.15g,%.12e,%.12e,%.12e,%.12e\n", spec.omega[i],
                      spec.p[0][i], spec.p[1][i], spec.p[2][i], spec.sigma[i]);
        out += buf;
    }
    return out;
}

std::vector<std::array<double, 5>> parse_spectrum_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "omega_cm1,P_x,P_y,P_z,sigma_A") {
        throw ConfigError("spectrum CSV has an unexpected header");
    }
    std::vector<std::array<double, 5>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::array<double, 5> row{};
        std::istringstream ls(line);
        std::string cell;
        for (int c = 0; c < 5; ++c) {
            if (!std::getline(ls, cell, ',')) {
                throw ConfigError("spectrum CSV row has fewer than 5 columns");
            }
            row[c] = std::stod(cell);
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace nirsim
