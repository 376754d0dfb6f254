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
#include <limits>

#include "nirsim/error.hpp"
#include "nirsim/json_io.hpp"

namespace nirsim {

using nlohmann::json;

namespace {

json complex_list(const std::vector<cplx> &v) {
    json re = json::array();
    json im = json::array();
    for (const auto &z : v) {
        re.push_back(z.real());
        im.push_back(z.imag());
    }
    return {{"re", re}, {"im", im}};
}

std::vector<cplx> complex_from(const json &j) {
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != im.size()) {
        throw ConfigError("complex series has mismatched parts");
    }
    std::vector<cplx> v(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) {
        v[i] = {re[i], im[i]};
    }
    return v;
}

// JSON has no infinity; store it as null.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double from_nullable(const json &j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

template <typename F> auto guarded(const char *what, F &&f) {
    try {
        return f();
    } catch (const json::exception &e) {
        throw ConfigError(std::string("invalid ") + what + " document: " + e.what());
    }
}

constexpr const char *kAxes[3] = {"x", "y", "z"};

} // namespace

json window_to_json(const WindowConfig &w) {
    return {{"omega_min", w.omega_min}, {"omega_max", w.omega_max},
            {"cutoff", w.cutoff},       {"padding", w.padding},
            {"eta", w.eta},             {"epsilon", w.epsilon},
            {"total_shots", w.total_shots}, {"grid_points", w.grid_points},
            {"t_max", w.t_max()},       {"k_max", w.k_max()}};
}

WindowConfig window_from_json(const json &j) {
    return guarded("window", [&] {
        WindowConfig w;
        w.omega_min = j.at("omega_min").get<double>();
        w.omega_max = j.at("omega_max").get<double>();
        w.cutoff = j.at("cutoff").get<double>();
        w.padding = j.at("padding").get<double>();
        w.eta = j.at("eta").get<double>();
        w.epsilon = j.at("epsilon").get<double>();
        w.total_shots = j.at("total_shots").get<double>();
        w.grid_points = j.at("grid_points").get<int>();
        return w;
    });
}

json ledger_to_json(const ShotLedger &l) {
    json j = {{"total_shots", l.total_shots},
              {"per_component", l.per_component},
              {"normalization", l.normalization},
              {"n_k", l.n_k},
              {"seed", l.seed},
              {"allocated", l.allocated()}};
    for (int r = 0; r < 3; ++r) {
        j["x"][kAxes[r]] = l.x[r];
        j["y"][kAxes[r]] = l.y[r];
    }
    return j;
}

ShotLedger ledger_from_json(const json &j) {
    return guarded("shot ledger", [&] {
        ShotLedger l;
        l.total_shots = j.at("total_shots").get<double>();
        l.per_component = j.at("per_component").get<double>();
        l.normalization = j.at("normalization").get<double>();
        l.n_k = j.at("n_k").get<std::vector<long long>>();
        l.seed = j.at("seed").get<std::uint64_t>();
        for (int r = 0; r < 3; ++r) {
            l.x[r] = j.at("x").at(kAxes[r]).get<std::vector<double>>();
            l.y[r] = j.at("y").at(kAxes[r]).get<std::vector<double>>();
        }
        return l;
    });
}

json plan_to_json(const TrotterPlan &p) {
    json entries = json::array();
    for (const auto &e : p.entries) {
        entries.push_back({{"component", kAxes[e.component]},
                           {"indices", e.indices},
                           {"weight", e.weight},
                           {"e2", e.e2},
                           {"tau", finite_or_null(e.tau)}});
    }
    json tau = json::object();
    for (int r = 0; r < 3; ++r) {
        tau[kAxes[r]] = finite_or_null(p.component_tau[r]);
    }
    return {{"step_time", finite_or_null(p.step_time)},
            {"steps_per_unit", p.steps_per_unit},
            {"epsilon_nu", p.epsilon_nu},
            {"delta_t", p.delta_t},
            {"component_tau", tau},
            {"entries", entries}};
}

TrotterPlan plan_from_json(const json &j) {
    return guarded("Trotter plan", [&] {
        TrotterPlan p;
        p.step_time = from_nullable(j.at("step_time"));
        p.steps_per_unit = j.at("steps_per_unit").get<long long>();
        p.epsilon_nu = j.at("epsilon_nu").get<double>();
        p.delta_t = j.at("delta_t").get<double>();
        for (int r = 0; r < 3; ++r) {
            p.component_tau[r] = from_nullable(j.at("component_tau").at(kAxes[r]));
        }
        for (const auto &e : j.at("entries")) {
            PlanEntry pe;
            const auto axis = e.at("component").get<std::string>();
            pe.component = axis == "x" ? 0 : axis == "y" ? 1 : 2;
            pe.indices = e.at("indices").get<std::vector<int>>();
            pe.weight = e.at("weight").get<double>();
            pe.e2 = e.at("e2").get<double>();
            pe.tau = from_nullable(e.at("tau"));
            p.entries.push_back(std::move(pe));
        }
        return p;
    });
}

json peaks_to_json(const std::vector<Peak> &peaks) {
    json a = json::array();
    for (const auto &p : peaks) {
        a.push_back({{"position", p.position}, {"amplitude", p.amplitude}});
    }
    return a;
}

std::vector<Peak> peaks_from_json(const json &j) {
    return guarded("peaks", [&] {
        std::vector<Peak> v;
        for (const auto &p : j) {
            v.push_back({p.at("position").get<double>(), p.at("amplitude").get<double>()});
        }
        return v;
    });
}

json sticks_to_json(const std::vector<Stick> &sticks) {
    json a = json::array();
    for (const auto &s : sticks) {
        a.push_back({{"position", s.position}, {"intensity", s.intensity}});
    }
    return a;
}

std::vector<Stick> sticks_from_json(const json &j) {
    return guarded("sticks", [&] {
        std::vector<Stick> v;
        for (const auto &s : j) {
            v.push_back({s.at("position").get<double>(), s.at("intensity").get<double>()});
        }
        return v;
    });
}

json spectrum_to_json(const SpectrumEstimate &s) {
    json j;
    j["window"] = window_to_json(s.window);
    j["k_max"] = s.k_max;
    j["sampled"] = s.sampled;
    j["omega"] = s.omega;
    j["sigma_A"] = s.sigma;
    for (int r = 0; r < 3; ++r) {
        json c;
        c["active"] = s.active[r];
        c["mu_norm2"] = s.mu_norm2[r];
        c["proj_norm2"] = s.proj_norm2[r];
        c["fourier"] = complex_list(s.fourier[r]);
        c["P"] = s.p[r];
        j["components"][kAxes[r]] = std::move(c);
    }
    j["peaks"] = peaks_to_json(s.peaks);
    return j;
}

SpectrumEstimate spectrum_from_json(const json &j) {
    return guarded("spectrum", [&] {
        SpectrumEstimate s;
        s.window = window_from_json(j.at("window"));
        s.k_max = j.at("k_max").get<int>();
        s.sampled = j.at("sampled").get<bool>();
        s.omega = j.at("omega").get<std::vector<double>>();
        s.sigma = j.at("sigma_A").get<std::vector<double>>();
        for (int r = 0; r < 3; ++r) {
            const json &c = j.at("components").at(kAxes[r]);
            s.active[r] = c.at("active").get<bool>();
            s.mu_norm2[r] = c.at("mu_norm2").get<double>();
            s.proj_norm2[r] = c.at("proj_norm2").get<double>();
            s.fourier[r] = complex_from(c.at("fourier"));
            s.p[r] = c.at("P").get<std::vector<double>>();
        }
        s.peaks = peaks_from_json(j.at("peaks"));
        return s;
    });
}

} // namespace nirsim
