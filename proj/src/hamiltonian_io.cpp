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

#include <json.hpp>

#include "nirsim/error.hpp"
#include "nirsim/hamiltonian.hpp"

namespace nirsim {

using nlohmann::json;

namespace {

json parse(std::string_view text, const char *what) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::exception &e) {
        throw ConfigError(std::string("malformed ") + what + " document: " + e.what());
    }
}

template <typename F> auto guarded(const char *what, F &&f) {
    try {
        return f();
    } catch (const json::exception &e) {
        throw ConfigError(std::string("invalid ") + what + " document: " + e.what());
    }
}

json matrix_json(const Eigen::MatrixXd &m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from(const json &rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = r ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(rows.at(i).size()) != c) {
            throw ConfigError("ragged matrix rows");
        }
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = rows.at(i).at(j).get<double>();
        }
    }
    return m;
}

json terms_json(const TermMap &map) {
    json arr = json::array();
    for (const auto &[idx, v] : map) {
        arr.push_back({{"indices", idx}, {"value", v}});
    }
    return arr;
}

} // namespace

std::string to_json(const TaylorHamiltonian &ham) {
    json j;
    j["num_modes"] = ham.num_modes;
    j["harmonic_freqs"] = ham.harmonic_freqs;
    j["kinetic"] = matrix_json(ham.kinetic);
    j["phi2"] = terms_json(ham.phi2);
    j["phi3"] = terms_json(ham.phi3);
    j["phi4"] = terms_json(ham.phi4);
    j["n_mode"] = ham.n_mode;
    j["max_degree"] = ham.max_degree;
    return j.dump(2);
}

TaylorHamiltonian hamiltonian_from_json(std::string_view text) {
    const json j = parse(text, "Hamiltonian");
    TaylorHamiltonian ham = guarded("Hamiltonian", [&] {
        TaylorHamiltonian h;
        h.num_modes = j.at("num_modes").get<int>();
        h.harmonic_freqs = j.at("harmonic_freqs").get<std::vector<double>>();
        h.kinetic = matrix_from(j.at("kinetic"));
        for (int d = 2; d <= 4; ++d) {
            const std::string key = "phi" + std::to_string(d);
            if (!j.contains(key)) {
                continue;
            }
            for (const auto &t : j.at(key)) {
                Monomial idx = t.at("indices").get<Monomial>();
                if (static_cast<int>(idx.size()) != d) {
                    throw ConfigError(key + " entry has " + std::to_string(idx.size()) +
                                      " indices");
                }
                if (!std::is_sorted(idx.begin(), idx.end(), std::greater<>())) {
                    throw ConfigError(key + " entry indices are not sorted non-increasing");
                }
                if (h.terms(d).count(idx)) {
                    throw ConfigError(key + " has a duplicate tuple");
                }
                const double v = t.at("value").get<double>();
                if (std::abs(v) >= kDropThreshold) {
                    h.terms(d)[idx] = v;
                }
            }
        }
        h.n_mode = j.at("n_mode").get<int>();
        h.max_degree = j.at("max_degree").get<int>();
        return h;
    });
    ham.validate();
    return ham;
}

std::string to_json(const DipoleExpansion &dip) {
    json j;
    j["x"] = dip.components[0];
    j["y"] = dip.components[1];
    j["z"] = dip.components[2];
    return j.dump(2);
}

DipoleExpansion dipole_from_json(std::string_view text) {
    const json j = parse(text, "dipole");
    return guarded("dipole", [&] {
        DipoleExpansion d;
        d.components[0] = j.at("x").get<std::vector<double>>();
        d.components[1] = j.at("y").get<std::vector<double>>();
        d.components[2] = j.at("z").get<std::vector<double>>();
        return d;
    });
}

std::string to_json(const DisplacementMatrix &disp) {
    json j;
    j["b"] = matrix_json(disp.b);
    return j.dump(2);
}

DisplacementMatrix displacement_from_json(std::string_view text) {
    const json j = parse(text, "displacement");
    return guarded("displacement", [&] {
        DisplacementMatrix d;
        d.b = matrix_from(j.at("b"));
        return d;
    });
}

std::string to_json(const PesSampleSet &set) {
    json j;
    j["quadrature"] = set.quadrature;
    json recs = json::array();
    for (const auto &r : set.records) {
        recs.push_back({{"modes", r.modes}, {"offsets", r.offsets}, {"energy", r.energy}});
    }
    j["records"] = std::move(recs);
    return j.dump(2);
}

PesSampleSet pes_from_json(std::string_view text) {
    const json j = parse(text, "PES");
    return guarded("PES", [&] {
        PesSampleSet s;
        s.quadrature = j.value("quadrature", std::string());
        for (const auto &r : j.at("records")) {
            PesSample p;
            p.modes = r.at("modes").get<std::vector<int>>();
            p.offsets = r.at("offsets").get<std::vector<double>>();
            p.energy = r.at("energy").get<double>();
            s.records.push_back(std::move(p));
        }
        return s;
    });
}

std::string rotation_to_json(const Eigen::MatrixXd &u) {
    json j;
    j["convention"] = "q_old = U q_localized";
    j["rotation"] = matrix_json(u);
    return j.dump(2);
}

} // namespace nirsim
