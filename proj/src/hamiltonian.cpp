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

#include "nirsim/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include "nirsim/error.hpp"

namespace nirsim {

namespace {

std::string tuple_str(const Monomial &idx) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < idx.size(); ++i) {
        os << (i ? "," : "") << idx[i];
    }
    os << ')';
    return os.str();
}

// Exponent pattern of a monomial: (mode, power) with the highest power first
// and ties broken by the larger mode index.
std::vector<std::pair<int, int>> exponents(const Monomial &idx) {
    std::map<int, int> pw;
    for (int a : idx) {
        ++pw[a];
    }
    std::vector<std::pair<int, int>> out(pw.begin(), pw.end());
    std::sort(out.begin(), out.end(), [](const auto &x, const auto &y) {
        return x.second != y.second ? x.second > y.second : x.first > y.first;
    });
    return out;
}

} // namespace

Monomial canonical(Monomial idx) {
    std::sort(idx.begin(), idx.end(), std::greater<>());
    return idx;
}

int distinct_modes(const Monomial &idx) {
    std::set<int> s(idx.begin(), idx.end());
    return static_cast<int>(s.size());
}

const TermMap &TaylorHamiltonian::terms(int degree) const {
    switch (degree) {
    case 2:
        return phi2;
    case 3:
        return phi3;
    case 4:
        return phi4;
    default:
        throw ConfigError("Taylor degree " + std::to_string(degree) +
                          " is outside the supported range 2..4");
    }
}

TermMap &TaylorHamiltonian::terms(int degree) {
    return const_cast<TermMap &>(std::as_const(*this).terms(degree));
}

void TaylorHamiltonian::add_term(Monomial idx, double value) {
    idx = canonical(std::move(idx));
    if (idx.size() == 1) {
        if (value != 0.0) {
            throw ConfigError("linear Taylor terms must vanish at equilibrium");
        }
        return;
    }
    auto &map = terms(static_cast<int>(idx.size()));
    double &v = map[idx];
    v += value;
    if (std::abs(v) < kDropThreshold) {
        map.erase(idx);
    }
}

double TaylorHamiltonian::term(Monomial idx) const {
    idx = canonical(std::move(idx));
    const auto &map = terms(static_cast<int>(idx.size()));
    auto it = map.find(idx);
    return it == map.end() ? 0.0 : it->second;
}

std::size_t TaylorHamiltonian::potential_term_count() const {
    return phi2.size() + phi3.size() + phi4.size();
}

void TaylorHamiltonian::validate() const {
    if (num_modes < 1) {
        throw ConfigError("Hamiltonian needs at least one mode");
    }
    if (static_cast<int>(harmonic_freqs.size()) != num_modes) {
        throw ConfigError("harmonic_freqs length differs from num_modes");
    }
    if (kinetic.rows() != num_modes || kinetic.cols() != num_modes) {
        throw ConfigError("kinetic matrix must be num_modes x num_modes");
    }
    const double kscale = std::max(1.0, kinetic.cwiseAbs().maxCoeff());
    if ((kinetic - kinetic.transpose()).cwiseAbs().maxCoeff() > 1e-12 * kscale) {
        throw ConfigError("kinetic matrix is not symmetric");
    }
    if (max_degree < 2 || max_degree > 4) {
        throw ConfigError("max_degree must lie in 2..4");
    }
    for (int d = 2; d <= 4; ++d) {
        for (const auto &[idx, v] : terms(d)) {
            (void)v;
            if (!std::is_sorted(idx.begin(), idx.end(), std::greater<>())) {
                throw ConfigError("tuple " + tuple_str(idx) + " is not sorted non-increasing");
            }
            if (idx.front() >= num_modes || idx.back() < 0) {
                throw ConfigError("tuple " + tuple_str(idx) + " references an unknown mode");
            }
            if (d > max_degree) {
                throw ConfigError("tuple " + tuple_str(idx) + " exceeds max_degree");
            }
            if (distinct_modes(idx) > n_mode) {
                throw ConfigError("tuple " + tuple_str(idx) + " exceeds n_mode");
            }
        }
    }
}

void TaylorHamiltonian::refresh_shape() {
    int n = 1;
    int dmax = 2;
    for (int d = 2; d <= 4; ++d) {
        for (const auto &kv : terms(d)) {
            n = std::max(n, distinct_modes(kv.first));
            dmax = std::max(dmax, d);
        }
    }
    n_mode = std::min(n, num_modes);
    max_degree = dmax;
}

TaylorHamiltonian harmonic_hamiltonian(const std::vector<double> &freqs) {
    TaylorHamiltonian h;
    h.num_modes = static_cast<int>(freqs.size());
    h.harmonic_freqs = freqs;
    h.kinetic = Eigen::MatrixXd::Zero(h.num_modes, h.num_modes);
    for (int j = 0; j < h.num_modes; ++j) {
        h.kinetic(j, j) = freqs[j] / 2.0;
        h.add_term({j, j}, freqs[j] / 2.0);
    }
    h.n_mode = 1;
    h.max_degree = 2;
    return h;
}

void DipoleExpansion::validate(int num_modes) const {
    for (const auto &c : components) {
        if (static_cast<int>(c.size()) != num_modes) {
            throw ConfigError("dipole component length differs from num_modes");
        }
    }
}

// ---------------------------------------------------------------- fitting

PesFit fit_taylor_from_pes(const PesSampleSet &samples, int max_degree, int n_mode) {
    if (max_degree < 2 || max_degree > 4) {
        throw ConfigError("max_degree must lie in 2..4");
    }
    if (n_mode < 1 || n_mode > 2) {
        throw ConfigError("PES fitting supports 1- and 2-mode expansions only");
    }
    std::optional<double> v0;
    int num_modes = 0;
    // surface key (sorted modes) -> list of (offsets aligned with key, energy)
    std::map<std::vector<int>, std::vector<std::pair<std::vector<double>, double>>> surf;
    for (const auto &r : samples.records) {
        if (r.modes.size() != r.offsets.size()) {
            throw ConfigError("PES record has mismatched modes and offsets");
        }
        for (int m : r.modes) {
            num_modes = std::max(num_modes, m + 1);
        }
        const bool zero = std::all_of(r.offsets.begin(), r.offsets.end(),
                                      [](double x) { return x == 0.0; });
        if (zero) {
            v0 = r.energy;
            continue;
        }
        std::vector<std::pair<int, double>> mo;
        for (std::size_t i = 0; i < r.modes.size(); ++i) {
            mo.emplace_back(r.modes[i], r.offsets[i]);
        }
        std::sort(mo.begin(), mo.end(), std::greater<>());
        std::vector<int> key;
        std::vector<double> off;
        for (const auto &[m, x] : mo) {
            key.push_back(m);
            off.push_back(x);
        }
        if (static_cast<int>(key.size()) > n_mode) {
            continue;
        }
        surf[key].emplace_back(off, r.energy);
    }
    if (!v0) {
        throw ConfigError("PES sample set lacks the zero-offset reference energy");
    }

    TaylorHamiltonian h;
    h.num_modes = num_modes;
    h.max_degree = max_degree;
    h.n_mode = n_mode;
    h.harmonic_freqs.assign(num_modes, 0.0);
    h.kinetic = Eigen::MatrixXd::Zero(num_modes, num_modes);

    double sq_sum = 0.0;
    std::size_t n_fit = 0;
    std::vector<Eigen::VectorXd> one_mode(num_modes);

    auto solve = [&](const Eigen::MatrixXd &a, const Eigen::VectorXd &y,
                     const std::string &label) -> Eigen::VectorXd {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        if (qr.rank() < a.cols()) {
            throw ConfigError("underdetermined fit on " + label);
        }
        Eigen::VectorXd c = qr.solve(y);
        Eigen::VectorXd res = a * c - y;
        sq_sum += res.squaredNorm();
        n_fit += static_cast<std::size_t>(y.size());
        return c;
    };
    auto check_distinct = [&](const std::vector<std::pair<std::vector<double>, double>> &pts,
                              std::size_t axis, const std::string &label) {
        std::set<double> d;
        for (const auto &p : pts) {
            d.insert(p.first[axis]);
        }
        if (static_cast<int>(d.size()) < max_degree + 1) {
            throw ConfigError("underdetermined fit on " + label + ": " +
                              std::to_string(d.size()) + " distinct offsets, need " +
                              std::to_string(max_degree + 1));
        }
    };

    for (int i = 0; i < num_modes; ++i) {
        const std::string label = "1-mode surface (" + std::to_string(i) + ")";
        auto it = surf.find({i});
        if (it == surf.end()) {
            throw ConfigError("underdetermined fit on " + label + ": no samples");
        }
        const auto &pts = it->second;
        check_distinct(pts, 0, label);
        Eigen::MatrixXd a(pts.size(), max_degree - 1);
        Eigen::VectorXd y(pts.size());
        for (std::size_t r = 0; r < pts.size(); ++r) {
            const double x = pts[r].first[0];
            for (int d = 2; d <= max_degree; ++d) {
                a(r, d - 2) = std::pow(x, d);
            }
            y(r) = pts[r].second - *v0;
        }
        one_mode[i] = solve(a, y, label);
        for (int d = 2; d <= max_degree; ++d) {
            h.add_term(Monomial(d, i), one_mode[i](d - 2));
        }
    }
    auto v1 = [&](int i, double x) {
        double s = 0.0;
        for (int d = 2; d <= max_degree; ++d) {
            s += one_mode[i](d - 2) * std::pow(x, d);
        }
        return s;
    };

    if (n_mode >= 2) {
        for (const auto &[key, pts] : surf) {
            if (key.size() != 2) {
                continue;
            }
            const int i = key[0];
            const int j = key[1];
            const std::string label =
                "2-mode surface (" + std::to_string(i) + "," + std::to_string(j) + ")";
            check_distinct(pts, 0, label);
            check_distinct(pts, 1, label);
            std::vector<std::pair<int, int>> pw;
            for (int d = 2; d <= max_degree; ++d) {
                for (int a = d - 1; a >= 1; --a) {
                    pw.emplace_back(a, d - a);
                }
            }
            Eigen::MatrixXd a(pts.size(), pw.size());
            Eigen::VectorXd y(pts.size());
            for (std::size_t r = 0; r < pts.size(); ++r) {
                const double xi = pts[r].first[0];
                const double xj = pts[r].first[1];
                for (std::size_t c = 0; c < pw.size(); ++c) {
                    a(r, c) = std::pow(xi, pw[c].first) * std::pow(xj, pw[c].second);
                }
                y(r) = pts[r].second - v1(i, xi) - v1(j, xj) - *v0;
            }
            Eigen::VectorXd c = solve(a, y, label);
            for (std::size_t t = 0; t < pw.size(); ++t) {
                Monomial idx(pw[t].first, i);
                idx.insert(idx.end(), pw[t].second, j);
                h.add_term(idx, c(t));
            }
        }
    }

    for (int i = 0; i < num_modes; ++i) {
        const double w = 2.0 * h.term({i, i});
        if (!(w > 0.0)) {
            throw ConfigError("fitted curvature of mode " + std::to_string(i) +
                              " is not positive");
        }
        h.harmonic_freqs[i] = w;
        h.kinetic(i, i) = w / 2.0;
    }
    PesFit fit;
    fit.ham = std::move(h);
    fit.residual_rms = n_fit ? std::sqrt(sq_sum / static_cast<double>(n_fit)) : 0.0;
    return fit;
}

// ----------------------------------------------------------------- models

namespace {

double param(const ModelParams &p, const std::string &key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

DipoleExpansion unit_dipole(int m, const ModelParams &p) {
    DipoleExpansion dip;
    for (auto &c : dip.components) {
        c.assign(m, 0.0);
    }
    const char axes[3] = {'x', 'y', 'z'};
    for (int rho = 0; rho < 3; ++rho) {
        for (int i = 0; i < m; ++i) {
            const std::string key = std::string("m") + axes[rho] + std::to_string(i);
            dip.components[rho][i] = param(p, key, rho == 0 ? 1.0 : 0.0);
        }
    }
    return dip;
}

void set_atom(Eigen::MatrixXd &b, int atom, int col, double x, double y, double z) {
    b(3 * atom, col) += x;
    b(3 * atom + 1, col) += y;
    b(3 * atom + 2, col) += z;
}

std::vector<std::string> dipole_keys(int m) {
    std::vector<std::string> keys;
    for (char a : {'x', 'y', 'z'}) {
        for (int i = 0; i < m; ++i) {
            keys.push_back(std::string("m") + a + std::to_string(i));
        }
    }
    return keys;
}

void check_with_dipole(const ModelParams &p, std::vector<std::string> allowed, int m,
                       std::string_view model) {
    for (auto &k : dipole_keys(m)) {
        allowed.push_back(std::move(k));
    }
    for (const auto &kv : p) {
        if (std::find(allowed.begin(), allowed.end(), kv.first) == allowed.end()) {
            throw ConfigError("model " + std::string(model) + " has no parameter '" +
                              kv.first + "'");
        }
    }
}

ModelSystem single_morse(const ModelParams &p) {
    check_with_dipole(p, {"omega", "chi"}, 1, "single-morse-expansion");
    const double w = param(p, "omega", 3000.0);
    const double chi = param(p, "chi", 60.0);
    if (w <= 0.0 || chi <= 0.0) {
        throw ConfigError("single-morse-expansion needs omega > 0 and chi > 0");
    }
    // V = D (1 - exp(-a q))^2 with 2 D a^2 = omega and D = omega^2 / (4 chi).
    const double de = w * w / (4.0 * chi);
    const double a = std::sqrt(2.0 * chi / w);
    ModelSystem s;
    s.name = "single-morse-expansion";
    s.ham = harmonic_hamiltonian({w});
    s.ham.add_term({0, 0, 0}, -de * a * a * a);
    s.ham.add_term({0, 0, 0, 0}, 7.0 / 12.0 * de * a * a * a * a);
    s.ham.refresh_shape();
    s.ham.max_degree = 4;
    s.dipole = unit_dipole(1, p);
    s.disp.b = Eigen::MatrixXd::Zero(6, 1);
    set_atom(s.disp.b, 0, 0, -0.2, 0.0, 0.0);
    set_atom(s.disp.b, 1, 0, 0.98, 0.0, 0.0);
    return s;
}

ModelSystem coupled_quartic_pair(const ModelParams &p) {
    check_with_dipole(p, {"omega0", "omega1", "cubic0", "cubic1", "quartic0", "quartic1",
                          "coupling", "coupling3"},
                      2, "coupled-quartic-pair");
    const double w0 = param(p, "omega0", 2000.0);
    const double w1 = param(p, "omega1", 3000.0);
    ModelSystem s;
    s.name = "coupled-quartic-pair";
    s.ham = harmonic_hamiltonian({w0, w1});
    s.ham.add_term({0, 0, 0}, param(p, "cubic0", 0.0));
    s.ham.add_term({1, 1, 1}, param(p, "cubic1", 0.0));
    s.ham.add_term({0, 0, 0, 0}, param(p, "quartic0", 20.0));
    s.ham.add_term({1, 1, 1, 1}, param(p, "quartic1", 30.0));
    s.ham.add_term({1, 1, 0, 0}, param(p, "coupling", 2.5));
    s.ham.add_term({1, 0, 0}, param(p, "coupling3", 0.0));
    s.ham.refresh_shape();
    s.ham.n_mode = 2;
    s.ham.max_degree = 4;
    s.dipole = unit_dipole(2, p);
    // Two separate diatomic units, one per mode.
    s.disp.b = Eigen::MatrixXd::Zero(12, 2);
    set_atom(s.disp.b, 0, 0, -0.3, 0.0, 0.0);
    set_atom(s.disp.b, 1, 0, 0.95, 0.0, 0.0);
    set_atom(s.disp.b, 2, 1, 0.0, -0.25, 0.0);
    set_atom(s.disp.b, 3, 1, 0.0, 0.97, 0.0);
    return s;
}

ModelSystem triatomic_toy(const ModelParams &p) {
    check_with_dipole(p, {"omega_bend", "omega_sym", "omega_asym", "stretch_cubic",
                          "stretch_quartic", "bend_cubic", "bend_quartic", "bend_stretch"},
                      3, "triatomic-toy");
    const double wb = param(p, "omega_bend", 1180.0);
    const double ws = param(p, "omega_sym", 2610.0);
    const double wa = param(p, "omega_asym", 2750.0);
    const double a3 = param(p, "stretch_cubic", -150.0);
    const double a4 = param(p, "stretch_quartic", 15.0);
    const double b3 = param(p, "bend_cubic", -10.0);
    const double b4 = param(p, "bend_quartic", 2.0);
    const double bs = param(p, "bend_stretch", 20.0);
    ModelSystem s;
    s.name = "triatomic-toy";
    s.ham = harmonic_hamiltonian({wb, ws, wa});
    // Local stretches s1,2 = (q1 +- q2)/sqrt2 carry a3 s^3 + a4 s^4 each.
    const double r2 = std::sqrt(2.0);
    s.ham.add_term({1, 1, 1}, a3 * 2.0 / (2.0 * r2));
    s.ham.add_term({2, 2, 1}, a3 * 6.0 / (2.0 * r2));
    s.ham.add_term({1, 1, 1, 1}, a4 * 0.5);
    s.ham.add_term({2, 2, 1, 1}, a4 * 3.0);
    s.ham.add_term({2, 2, 2, 2}, a4 * 0.5);
    s.ham.add_term({0, 0, 0}, b3);
    s.ham.add_term({0, 0, 0, 0}, b4);
    s.ham.add_term({1, 0, 0}, bs);
    s.ham.add_term({1, 1, 0, 0}, -0.25 * bs);
    s.ham.add_term({2, 2, 0, 0}, -0.25 * bs);
    s.ham.refresh_shape();
    s.ham.n_mode = 2;
    s.ham.max_degree = 4;
    s.dipole = unit_dipole(3, p);
    // Bent X-H2: atom 0 heavy centre, atoms 1 and 2 light.
    const double th = 46.0 * std::acos(-1.0) / 180.0;
    const double sn = std::sin(th);
    const double cs = std::cos(th);
    const double recoil = 1.0 / 32.0;
    s.disp.b = Eigen::MatrixXd::Zero(9, 3);
    // bend
    set_atom(s.disp.b, 1, 0, cs, -sn, 0.0);
    set_atom(s.disp.b, 2, 0, -cs, -sn, 0.0);
    set_atom(s.disp.b, 0, 0, 0.0, 2.0 * sn * recoil, 0.0);
    // local stretches along each bond
    Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(9, 2);
    set_atom(loc, 1, 0, sn, cs, 0.0);
    set_atom(loc, 0, 0, -sn * recoil, -cs * recoil, 0.0);
    set_atom(loc, 2, 1, -sn, cs, 0.0);
    set_atom(loc, 0, 1, sn * recoil, -cs * recoil, 0.0);
    s.disp.b.col(1) = (loc.col(0) + loc.col(1)) / r2;
    s.disp.b.col(2) = (loc.col(0) - loc.col(1)) / r2;
    return s;
}

} // namespace

std::vector<std::string> model_catalog() {
    return {"single-morse-expansion", "coupled-quartic-pair", "triatomic-toy"};
}

ModelSystem build_model_system(std::string_view name, const ModelParams &params) {
    ModelSystem s;
    if (name == "single-morse-expansion") {
        s = single_morse(params);
    } else if (name == "coupled-quartic-pair") {
        s = coupled_quartic_pair(params);
    } else if (name == "triatomic-toy") {
        s = triatomic_toy(params);
    } else {
        std::string list;
        for (const auto &m : model_catalog()) {
            list += (list.empty() ? "" : ", ") + m;
        }
        throw ConfigError("unknown model '" + std::string(name) + "'; available: " + list);
    }
    s.ham.validate();
    s.dipole.validate(s.ham.num_modes);
    return s;
}

TaylorHamiltonian dense_stand_in(int num_modes, int n_mode, int max_degree) {
    if (num_modes < 1 || n_mode < 1 || max_degree < 2 || max_degree > 4) {
        throw ConfigError("dense stand-in needs M >= 1, n >= 1 and degree 2..4");
    }
    std::vector<double> w(num_modes);
    for (int j = 0; j < num_modes; ++j) {
        w[j] = num_modes == 1 ? 2000.0 : 800.0 + 2400.0 * j / (num_modes - 1);
    }
    TaylorHamiltonian h = harmonic_hamiltonian(w);
    for (int i = 0; i < num_modes; ++i) {
        for (int j = 0; j < i; ++j) {
            const double c = 4.0 / (1.0 + i - j);
            h.kinetic(i, j) = h.kinetic(j, i) = c;
        }
    }
    const double scale[5] = {0.0, 0.0, 6.0, -25.0, 3.0};
    for (int d = 2; d <= max_degree; ++d) {
        // Enumerate sorted tuples of length d.
        Monomial idx(d, 0);
        std::function<void(int, int)> rec = [&](int pos, int hi) {
            if (pos == d) {
                if (distinct_modes(idx) > n_mode) {
                    return;
                }
                if (d == 2 && idx[0] == idx[1]) {
                    return;
                }
                const double sum = std::accumulate(idx.begin(), idx.end(), 0.0);
                h.add_term(idx, scale[d] / (1.0 + 0.1 * sum) / distinct_modes(idx));
                return;
            }
            for (int a = hi; a >= 0; --a) {
                idx[pos] = a;
                rec(pos + 1, a);
            }
        };
        rec(0, num_modes - 1);
    }
    h.n_mode = std::min(n_mode, num_modes);
    h.max_degree = max_degree;
    return h;
}

// ----------------------------------------------------------- localization

Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd &b) {
    Eigen::MatrixXd out = b;
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
        const double n = b.col(j).norm();
        if (n == 0.0) {
            throw ConfigError("displacement column " + std::to_string(j) + " is zero");
        }
        out.col(j) /= n;
    }
    return out;
}

double localization_objective(const Eigen::MatrixXd &u, const Eigen::MatrixXd &bn) {
    const Eigen::MatrixXd v = bn * u;
    const Eigen::Index atoms = v.rows() / 3;
    double xi = 0.0;
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        for (Eigen::Index a = 0; a < atoms; ++a) {
            const double p = v.block(3 * a, j, 3, 1).squaredNorm();
            xi += p * p;
        }
    }
    return xi;
}

TaylorHamiltonian rotate_hamiltonian(const TaylorHamiltonian &ham, const Eigen::MatrixXd &u) {
    const int m = ham.num_modes;
    TaylorHamiltonian out;
    out.num_modes = m;
    out.harmonic_freqs = ham.harmonic_freqs;
    out.kinetic = u.transpose() * ham.kinetic * u;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (std::abs(out.kinetic(i, j)) < kDropThreshold) {
                out.kinetic(i, j) = 0.0;
            }
        }
    }
    out.kinetic = 0.5 * (out.kinetic + out.kinetic.transpose()).eval();
    std::map<Monomial, double> acc;
    for (int d = 2; d <= 4; ++d) {
        for (const auto &[idx, c] : ham.terms(d)) {
            std::vector<int> seq(d, 0);
            // Expand prod_a sum_i U(idx_a, i) q_i over all index sequences.
            std::function<void(int, double)> rec = [&](int pos, double w) {
                if (pos == d) {
                    acc[canonical(seq)] += c * w;
                    return;
                }
                for (int i = 0; i < m; ++i) {
                    const double f = u(idx[pos], i);
                    if (f == 0.0) {
                        continue;
                    }
                    seq[pos] = i;
                    rec(pos + 1, w * f);
                }
            };
            rec(0, 1.0);
        }
    }
    for (const auto &[idx, v] : acc) {
        if (std::abs(v) >= kDropThreshold) {
            out.terms(static_cast<int>(idx.size()))[idx] = v;
        }
    }
    out.refresh_shape();
    out.max_degree = std::max(out.max_degree, ham.max_degree);
    return out;
}

Localization localize_modes(const TaylorHamiltonian &ham, const DisplacementMatrix &disp) {
    const int m = ham.num_modes;
    if (disp.b.cols() != m) {
        throw ConfigError("displacement matrix column count differs from num_modes");
    }
    if (disp.b.rows() % 3 != 0 || disp.b.rows() == 0) {
        throw ConfigError("displacement matrix needs 3 rows per atom");
    }
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i != j && ham.kinetic(i, j) != 0.0) {
                throw ConfigError("localization expects a normal-mode Hamiltonian");
            }
        }
    }
    Localization loc;
    loc.rotation = Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd bn = normalize_columns(disp.b);
    loc.objective_trace.push_back(localization_objective(loc.rotation, bn));
    if (m == 1) {
        loc.ham = ham;
        return loc;
    }
    Eigen::MatrixXd v = bn;
    const Eigen::Index atoms = v.rows() / 3;
    for (int sweep = 0; sweep < 1000; ++sweep) {
        for (int a = 0; a < m; ++a) {
            for (int b = a + 1; b < m; ++b) {
                double saa = 0.0;
                double sbb = 0.0;
                double sab = 0.0;
                for (Eigen::Index at = 0; at < atoms; ++at) {
                    const Eigen::Vector3d x = v.col(a).segment<3>(3 * at);
                    const Eigen::Vector3d y = v.col(b).segment<3>(3 * at);
                    const double ca = 0.5 * (x.squaredNorm() - y.squaredNorm());
                    const double cb = x.dot(y);
                    saa += ca * ca;
                    sbb += cb * cb;
                    sab += ca * cb;
                }
                const double bp = 0.5 * (saa - sbb);
                const double gain = 2.0 * (std::hypot(bp, sab) - bp);
                if (gain <= 1e-15) {
                    continue;
                }
                const double th = 0.25 * std::atan2(sab, bp);
                const double c = std::cos(th);
                const double s = std::sin(th);
                const Eigen::VectorXd va = v.col(a);
                v.col(a) = c * va + s * v.col(b);
                v.col(b) = -s * va + c * v.col(b);
                const Eigen::VectorXd ua = loc.rotation.col(a);
                loc.rotation.col(a) = c * ua + s * loc.rotation.col(b);
                loc.rotation.col(b) = -s * ua + c * loc.rotation.col(b);
            }
        }
        const double xi = localization_objective(loc.rotation, bn);
        const double prev = loc.objective_trace.back();
        loc.objective_trace.push_back(xi);
        if (xi - prev < 1e-10) {
            break;
        }
    }
    const double dev =
        (loc.rotation.transpose() * loc.rotation - Eigen::MatrixXd::Identity(m, m))
            .cwiseAbs()
            .maxCoeff();
    if (dev > 1e-8) {
        throw NumericalError("localization produced a non-orthogonal rotation");
    }
    loc.ham = rotate_hamiltonian(ham, loc.rotation);
    return loc;
}

TaylorHamiltonian n_mode_truncate(const TaylorHamiltonian &ham, int n) {
    if (n < 1) {
        throw ConfigError("n_mode truncation needs n >= 1");
    }
    TaylorHamiltonian out = ham;
    for (int d = 2; d <= 4; ++d) {
        auto &map = out.terms(d);
        for (auto it = map.begin(); it != map.end();) {
            it = distinct_modes(it->first) > n ? map.erase(it) : std::next(it);
        }
    }
    out.n_mode = std::min(n, ham.n_mode);
    return out;
}

TaylorHamiltonian sparsify(const TaylorHamiltonian &ham, double rel) {
    TaylorHamiltonian out = ham;
    for (int d = 2; d <= 4; ++d) {
        auto &map = out.terms(d);
        double mx = 0.0;
        for (const auto &kv : map) {
            mx = std::max(mx, std::abs(kv.second));
        }
        for (auto it = map.begin(); it != map.end();) {
            it = std::abs(it->second) < rel * mx ? map.erase(it) : std::next(it);
        }
    }
    return out;
}

// --------------------------------------------------------------- counting

long long ProductWalk::total() const {
    return std::accumulate(by_degree.begin(), by_degree.end(), 0LL);
}

ProductWalk product_walk(const TaylorHamiltonian &ham, bool caching) {
    ProductWalk w;
    std::set<int> squares;
    std::set<int> cubes;
    std::set<std::pair<int, int>> m2l;
    std::vector<std::pair<int, int>> m2l2;                 // (m, l) of q_m^2 q_l^2
    std::vector<std::array<int, 3>> m2lk;                  // (m, l, k) of q_m^2 q_l q_k
    for (int d = 2; d <= 4; ++d) {
        for (const auto &kv : ham.terms(d)) {
            const Monomial &idx = kv.first;
            if (!caching) {
                for (int e = 2; e <= d; ++e) {
                    ++w.by_degree[e];
                }
                continue;
            }
            const auto ex = exponents(idx);
            const int top = ex[0].second;
            const int m = ex[0].first;
            if (d == 2) {
                if (top == 2) {
                    squares.insert(m);
                } else {
                    ++w.by_degree[2];
                }
            } else if (d == 3) {
                if (top == 3) {
                    squares.insert(m);
                    cubes.insert(m);
                } else if (top == 2) {
                    squares.insert(m);
                    m2l.insert({m, ex[1].first});
                } else {
                    ++w.by_degree[2];
                    ++w.by_degree[3];
                }
            } else {
                if (top == 4 || top == 3) {
                    squares.insert(m);
                    cubes.insert(m);
                    ++w.by_degree[4];
                } else if (top == 2 && ex[1].second == 2) {
                    m2l2.push_back({m, ex[1].first});
                    ++w.by_degree[4];
                } else if (top == 2) {
                    m2lk.push_back({m, ex[1].first, ex[2].first});
                    ++w.by_degree[4];
                } else {
                    ++w.by_degree[2];
                    ++w.by_degree[3];
                    ++w.by_degree[4];
                }
            }
        }
    }
    if (caching) {
        for (const auto &[m, l] : m2l2) {
            if (m2l.count({m, l}) == 0 && m2l.count({l, m}) == 0) {
                squares.insert(m);
                m2l.insert({m, l});
            }
        }
        for (const auto &t : m2lk) {
            if (m2l.count({t[0], t[1]}) == 0 && m2l.count({t[0], t[2]}) == 0) {
                squares.insert(t[0]);
                m2l.insert({t[0], t[1]});
            }
        }
        w.by_degree[2] += static_cast<long long>(squares.size());
        w.by_degree[3] += static_cast<long long>(cubes.size() + m2l.size());
    }
    return w;
}

TermCount count_terms(const TaylorHamiltonian &ham) {
    TermCount tc;
    for (int d = 2; d <= 4; ++d) {
        tc.per_degree[d] = static_cast<long long>(ham.terms(d).size());
    }
    for (int i = 0; i < ham.num_modes; ++i) {
        for (int j = 0; j <= i; ++j) {
            if (ham.kinetic(i, j) != 0.0) {
                ++tc.kinetic;
            }
        }
    }
    tc.n_taylor = tc.per_degree[2] + tc.per_degree[3] + tc.per_degree[4] + tc.kinetic;
    tc.mults_cached = product_walk(ham, true).total();
    tc.mults_uncached = product_walk(ham, false).total();
    return tc;
}

} // namespace nirsim
