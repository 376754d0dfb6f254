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

#include "nirsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nirsim/dynamics.hpp"
#include "nirsim/error.hpp"
#include "nirsim/grid.hpp"
#include "nirsim/json_io.hpp"
#include "nirsim/vscf.hpp"

namespace nirsim {

using nlohmann::json;

namespace {

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path &path, const std::string &text) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << text;
}

struct System {
    ModelSystem model;
    TaylorHamiltonian ham;
    Eigen::MatrixXd rotation;
    bool localized = false;
};

System load_system(const RunConfig &cfg, std::ostream &err) {
    System s;
    if (!cfg.hamiltonian_path.empty()) {
        s.model.name = cfg.hamiltonian_path;
        s.model.ham = hamiltonian_from_json(read_file(cfg.hamiltonian_path));
        const int m = s.model.ham.num_modes;
        if (!cfg.dipole_path.empty()) {
            s.model.dipole = dipole_from_json(read_file(cfg.dipole_path));
        } else {
            for (auto &c : s.model.dipole.components) {
                c.assign(m, 0.0);
            }
            s.model.dipole.components[0].assign(m, 1.0);
        }
        if (!cfg.displacement_path.empty()) {
            s.model.disp = displacement_from_json(read_file(cfg.displacement_path));
        }
        s.model.dipole.validate(m);
    } else {
        s.model = build_model_system(cfg.model, cfg.params);
    }
    s.ham = s.model.ham;
    s.rotation = Eigen::MatrixXd::Identity(s.ham.num_modes, s.ham.num_modes);
    if (cfg.localize && s.model.disp.b.size() > 0 && s.ham.num_modes > 1) {
        const Localization loc = localize_modes(s.model.ham, s.model.disp);
        s.ham = loc.ham;
        s.rotation = loc.rotation;
        s.localized = true;
        // Dipole derivatives follow the coordinates: mu = m^T q = (U^T m)^T q_new.
        for (auto &c : s.model.dipole.components) {
            Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
            const Eigen::VectorXd w = loc.rotation.transpose() * v;
            c.assign(w.data(), w.data() + w.size());
        }
        err << "localized " << s.ham.num_modes << " modes in " << loc.objective_trace.size() - 1
            << " sweeps\n";
    }
    return s;
}

struct InitialStates {
    VscfSolution sol;
    std::array<DipoleComponent, 3> comps;
    std::array<StateVector, 3> projected;
    std::array<double, 3> retained{1.0, 1.0, 1.0};
    std::array<double, 3> mu2{};
    std::array<bool, 3> active{};
};

// VSCF ground, dipole excitation and window projection per component.
InitialStates prepare_states(const System &sys, const GridBasis &basis, double cutoff,
                             std::ostream &err) {
    InitialStates s;
    s.sol = solve_vscf(sys.ham, basis);
    err << "vscf: E0 = " << s.sol.e0 << " cm-1 after " << s.sol.iterations << " iterations\n";
    const StateVector ground =
        product_state_vector(s.sol, std::vector<int>(sys.ham.num_modes, 0));
    s.comps = dipole_excite(sys.model.dipole, ground);
    for (int r = 0; r < 3; ++r) {
        s.active[r] = s.comps[r].active;
        s.mu2[r] = s.comps[r].mu_norm * s.comps[r].mu_norm;
        s.projected[r] = s.comps[r].state;
        if (s.active[r]) {
            const Projection p = project_window(s.comps[r].state, s.sol, cutoff);
            s.projected[r] = p.state;
            s.retained[r] = p.retained;
        }
    }
    if (!(s.active[0] || s.active[1] || s.active[2])) {
        throw NumericalError("dipole expansion has no active component");
    }
    return s;
}

json vec_json(const Eigen::VectorXd &v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

int worker_count(int requested, int tasks) {
    int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, std::min(w, tasks));
}

template <typename F> void parallel_for(int n, int workers, F &&f) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) {
            f(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += workers) {
                    f(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

constexpr const char *kAxes[3] = {"x", "y", "z"};

} // namespace

void RunConfig::validate() {
    if (qubits_per_mode < 1 || qubits_per_mode > 12) {
        throw ConfigError("--qubits-per-mode must lie in 1..12");
    }
    if (!(epsilon_nu > 0.0)) {
        throw ConfigError("--epsilon-nu must be positive");
    }
    if (!cutoff_set) {
        window.cutoff = window.omega_min + window.padding;
    }
    window.validate();
    if (max_peaks < 1) {
        throw ConfigError("--max-peaks must be at least 1");
    }
    if (b_k < 2 || b_r < 2) {
        throw ConfigError("--bk and --br must be at least 2");
    }
    if (!(clock_hz > 0.0)) {
        throw ConfigError("--clock must be positive");
    }
    if (workers < 0) {
        throw ConfigError("--workers must be non-negative");
    }
}

std::pair<double, double> parse_window(const std::string &text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("window must be given as lo:hi");
    }
    try {
        std::size_t a = 0;
        std::size_t b = 0;
        const std::string lo_s = text.substr(0, colon);
        const std::string hi_s = text.substr(colon + 1);
        const double lo = std::stod(lo_s, &a);
        const double hi = std::stod(hi_s, &b);
        if (a != lo_s.size() || b != hi_s.size()) {
            throw std::invalid_argument("trailing");
        }
        return {lo, hi};
    } catch (const std::logic_error &) {
        throw ConfigError("window bounds are not numbers: " + text);
    }
}

void parse_param(const std::string &text, ModelParams &params) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("model parameter must be given as key=value");
    }
    try {
        std::size_t used = 0;
        const std::string v = text.substr(eq + 1);
        params[text.substr(0, eq)] = std::stod(v, &used);
        if (used != v.size()) {
            throw std::invalid_argument("trailing");
        }
    } catch (const std::logic_error &) {
        throw ConfigError("model parameter value is not a number: " + text);
    }
}

int cmd_spectrum(RunConfig cfg, std::ostream &out, std::ostream &err) {
    cfg.validate();
    const System sys = load_system(cfg, err);
    const TaylorHamiltonian &ham = sys.ham;
    const GridBasis basis = GridBasis::make(cfg.qubits_per_mode, ham.num_modes);
    require_size(basis, kMaxStateQubits, "spectrum");
    const WindowConfig &win = cfg.window;
    const int kmax = win.k_max();

    const InitialStates init = prepare_states(sys, basis, win.cutoff, err);
    const VscfSolution &sol = init.sol;
    const auto &projected = init.projected;
    const auto &retained = init.retained;
    const auto &mu2 = init.mu2;
    const auto &active = init.active;

    const QuantizedCoefficients quant = quantize(ham, cfg.b_k, cfg.b_r);
    const GridOperators qops = GridOperators::build(quant.ham, basis);
    double e_ref = sol.e0;
    std::string e_ref_source = "vscf";
    if (basis.qubits_per_mode * basis.num_modes <= kMaxDenseQubits) {
        const DenseSpectrum dense = exact_diagonalize(ham, basis);
        const Eigen::VectorXcd g0 = dense.vectors.col(0);
        e_ref = g0.dot(qops.apply_h(g0)).real();
        e_ref_source = "dense";
    }
    const GridOperators ops = GridOperators::build(ham, basis);
    const TrotterPlan plan =
        trotter_plan(ops, sol, projected, active, cfg.epsilon_nu, win.width());
    err << "trotter: r = " << plan.steps_per_unit << "\n";

    std::array<std::vector<cplx>, 3> series;
    parallel_for(3, worker_count(cfg.workers, 3), [&](int r) {
        if (active[r]) {
            series[r] = autocorrelation_series(projected[r], quant, plan, kmax, win.width(), e_ref);
        } else {
            series[r].assign(static_cast<std::size_t>(kmax) + 1, 0.0);
        }
    });

    ShotLedger ledger = allocate_shots(win, cfg.seed);
    std::array<std::vector<cplx>, 3> fourier;
    for (int r = 0; r < 3; ++r) {
        if (!active[r]) {
            fourier[r].assign(static_cast<std::size_t>(kmax) + 1, 0.0);
        } else if (cfg.exact) {
            fourier[r] = exact_fourier(win, series[r]);
        } else {
            fourier[r] = sampled_fourier(ledger, r, series[r]);
        }
    }
    SpectrumEstimate spec = reconstruct(win, fourier, mu2, retained, active);
    spec.sampled = !cfg.exact;
    spec.peaks = matching_pursuit(spec, cfg.max_peaks);

    const std::filesystem::path dir(cfg.out_dir);
    write_file(dir / "spectrum.csv", spectrum_csv(spec));
    write_file(dir / "spectrum.json", spectrum_to_json(spec).dump(2));
    write_file(dir / "peaks.json", peaks_to_json(spec.peaks).dump(2));
    if (sys.localized) {
        write_file(dir / "rotation.json", rotation_to_json(sys.rotation));
    }
    json rep;
    rep["model"] = sys.model.name;
    rep["mode"] = cfg.exact ? "exact-expectation" : "sampled";
    rep["qubits_per_mode"] = cfg.qubits_per_mode;
    rep["window"] = window_to_json(win);
    rep["seed"] = cfg.seed;
    rep["localized"] = sys.localized;
    rep["vscf"] = {{"e0", sol.e0},
                   {"iterations", sol.iterations},
                   {"monotonic", sol.monotonic},
                   {"trace", sol.trace}};
    rep["energy_reference"] = {{"value", e_ref}, {"source", e_ref_source}};
    rep["quantization"] = {{"b_k", quant.b_k},
                           {"b_r", quant.b_r},
                           {"max_relative_error", quant.max_relative_error},
                           {"max_phase_error", quant.max_phase_error()}};
    rep["plan"] = plan_to_json(plan);
    if (!cfg.exact) {
        rep["ledger"] = ledger_to_json(ledger);
    }
    for (int r = 0; r < 3; ++r) {
        rep["components"][kAxes[r]] = {{"active", active[r]},
                                       {"mu_norm2", mu2[r]},
                                       {"retained_norm2", retained[r]}};
    }
    rep["peaks"] = peaks_to_json(spec.peaks);
    write_file(dir / "report.json", rep.dump(2));

    char line[128];
    std::snprintf(line, sizeof line, "%-6s %14s %16s\n", "peak", "omega_cm1", "amplitude");
    out << line;
    for (std::size_t i = 0; i < spec.peaks.size(); ++i) {
        std::snprintf(line, sizeof line, "%-6zu %14.4f %16.6e\n", i, spec.peaks[i].position,
                      spec.peaks[i].amplitude);
        out << line;
    }
    return static_cast<int>(ExitCode::Ok);
}

int cmd_exact(RunConfig cfg, std::ostream &out, std::ostream &err) {
    cfg.validate();
    const System sys = load_system(cfg, err);
    const GridBasis basis = GridBasis::make(cfg.qubits_per_mode, sys.ham.num_modes);
    const DenseSpectrum dense = exact_diagonalize(sys.ham, basis);
    const WindowConfig &win = cfg.window;
    const double e0 = dense.values(0);
    StateVector ground;
    ground.basis = basis;
    ground.amps = dense.vectors.col(0);
    const std::vector<Stick> transitions =
        dense_sticks(dense, dipole_excite(sys.model.dipole, ground), {1.0, 1.0, 1.0}, e0,
                     win.omega_min, win.omega_max);
    // Same initial states as the spectrum pipeline, exact propagation.
    const InitialStates init = prepare_states(sys, basis, win.cutoff, err);
    std::array<DipoleComponent, 3> comps = init.comps;
    for (int r = 0; r < 3; ++r) {
        comps[r].state = init.projected[r];
    }
    const std::vector<Stick> sticks =
        dense_sticks(dense, comps, init.retained, e0, win.omega_min, win.omega_max, true);
    const std::vector<Stick> window_sticks =
        dense_sticks(dense, comps, init.retained, e0, win.omega_min, win.omega_max);

    std::string csv = "omega_cm1,sigma_ref\n";
    char buf[128];
    const double pi = std::acos(-1.0);
    for (int i = 0; i < win.grid_points; ++i) {
        const double w = win.omega_min + (win.omega_max - win.omega_min) * i / (win.grid_points - 1);
        double s = 0.0;
        for (const auto &st : sticks) {
            const double d = w - st.position;
            s += st.intensity * win.eta / pi / (d * d + win.eta * win.eta);
        }
        std::snprintf(buf, sizeof buf, "%.10g,%.12e\n", w, w * s);
        csv += buf;
    }
    const std::filesystem::path dir(cfg.out_dir);
    write_file(dir / "exact_reference.csv", csv);
    json j;
    j["model"] = sys.model.name;
    j["qubits_per_mode"] = cfg.qubits_per_mode;
    j["window"] = window_to_json(win);
    j["ground_energy"] = e0;
    j["eigenvalues"] = vec_json(dense.values.head(std::min<Eigen::Index>(dense.values.size(), 64)));
    j["sticks"] = sticks_to_json(sticks);
    j["window_sticks"] = sticks_to_json(window_sticks);
    j["ground_state_transitions"] = sticks_to_json(transitions);
    write_file(dir / "exact.json", j.dump(2));

    double imax = 0.0;
    for (const auto &st : sticks) {
        imax = std::max(imax, st.intensity);
    }
    std::snprintf(buf, sizeof buf, "%-6s %14s %16s\n", "line", "omega_cm1", "intensity");
    out << buf;
    int n = 0;
    for (const auto &st : sticks) {
        if (st.intensity >= 1e-3 * imax) {
            std::snprintf(buf, sizeof buf, "%-6d %14.4f %16.6e\n", n++, st.position,
                          st.intensity);
            out << buf;
        }
    }
    return static_cast<int>(ExitCode::Ok);
}

int cmd_resources(RunConfig cfg, std::ostream &out, std::ostream &err) {
    cfg.validate();
    CostModel model;
    model.qubits_per_mode = cfg.qubits_per_mode;
    model.b_k = cfg.b_k;
    model.b_r = cfg.b_r;
    model.caching = cfg.caching;
    model.double_phase = cfg.double_phase;
    model.double_measurement = cfg.double_measurement;
    model.single_resource_state = cfg.single_resource_state;
    model.validate();
    const WindowConfig &win = cfg.window;

    TaylorHamiltonian ham;
    std::optional<TaylorHamiltonian> normal;
    std::string name;
    TrotterPlan plan;
    double retained = 1.0;
    if (cfg.stand_in_modes > 0) {
        ham = dense_stand_in(cfg.stand_in_modes, cfg.stand_in_n_mode, cfg.stand_in_degree);
        name = "dense-stand-in";
        if (cfg.trotter_r <= 0) {
            throw ConfigError("stand-in estimates need --trotter-r");
        }
    } else {
        const System sys = load_system(cfg, err);
        ham = sys.ham;
        name = sys.model.name;
        if (sys.localized) {
            normal = sys.model.ham;
        }
        if (cfg.trotter_r <= 0) {
            const GridBasis basis = GridBasis::make(cfg.qubits_per_mode, ham.num_modes);
            const VscfSolution sol = solve_vscf(ham, basis);
            const StateVector ground =
                product_state_vector(sol, std::vector<int>(ham.num_modes, 0));
            const auto comps = dipole_excite(sys.model.dipole, ground);
            std::array<StateVector, 3> proj;
            std::array<bool, 3> active{};
            double rsum = 0.0;
            int nact = 0;
            for (int r = 0; r < 3; ++r) {
                active[r] = comps[r].active;
                proj[r] = comps[r].state;
                if (active[r]) {
                    const Projection p = project_window(comps[r].state, sol, win.cutoff);
                    proj[r] = p.state;
                    rsum += p.retained;
                    ++nact;
                }
            }
            retained = nact ? rsum / nact : 1.0;
            plan = trotter_plan(GridOperators::build(ham, basis), sol, proj, active,
                                cfg.epsilon_nu, win.width());
        }
    }
    if (cfg.trotter_r > 0) {
        plan.steps_per_unit = cfg.trotter_r;
        plan.epsilon_nu = cfg.epsilon_nu;
        plan.delta_t = 2.0 * std::acos(-1.0) / win.width();
        plan.step_time = plan.delta_t / static_cast<double>(cfg.trotter_r);
    }
    const StepCost step = trotter_step_cost(ham, model);
    const ShotLedger ledger = allocate_shots(win, cfg.seed);
    const ResourceEstimate est = workflow_cost(step, plan.steps_per_unit, win, ledger, model);
    const QubitAccounting qa = qubit_accounting(ham.num_modes, ham.max_degree, model);
    const TermCount tc = count_terms(ham);

    LedgerInputs li;
    li.retained_norm2 = retained;
    li.baseline_r = cfg.baseline_r;
    li.normal_modes = normal ? &*normal : nullptr;
    const auto rows = improvement_ledger(ham, plan, win, model, li);

    json j;
    j["system"] = name;
    j["num_modes"] = ham.num_modes;
    j["qubits_per_mode"] = model.qubits_per_mode;
    j["cost_model"] = {{"b_k", model.b_k},
                       {"b_r", model.b_r},
                       {"blocks_per_tgate", model.blocks_per_tgate},
                       {"zeta", model.zeta},
                       {"double_phase_factor", model.double_phase_factor},
                       {"qft_rotation_t", model.qft_rotation_t},
                       {"caching", model.caching},
                       {"double_phase", model.double_phase},
                       {"double_measurement", model.double_measurement},
                       {"single_resource_state", model.single_resource_state}};
    j["terms"] = {{"per_degree", {tc.per_degree[2], tc.per_degree[3], tc.per_degree[4]}},
                  {"kinetic", tc.kinetic},
                  {"n_taylor", tc.n_taylor},
                  {"mults_cached", tc.mults_cached},
                  {"mults_uncached", tc.mults_uncached}};
    j["step"] = {{"t_gates", step.t_gates},       {"v_products", step.v_products},
                 {"mults", step.mults},           {"coefficient_mults", step.coefficient_mults},
                 {"adds", step.adds},             {"v_application_t", step.v_application_t},
                 {"kinetic_t", step.kinetic_t},   {"qft_t", step.qft_t}};
    j["r"] = est.r;
    j["max_t"] = est.max_t;
    j["total_t"] = est.total_t;
    j["total_shots"] = est.total_shots;
    j["qubits"] = {{"system", qa.system},
                   {"hadamard", qa.hadamard},
                   {"ancilla_registers", qa.ancilla_registers},
                   {"ancilla_itemized", qa.ancilla_itemized},
                   {"total_registers", qa.total_registers},
                   {"total_itemized", qa.total_itemized},
                   {"paper_total", qa.paper_total}};
    j["state_prep_t"] = state_prep_cost(ham.num_modes, model.qubits_per_mode,
                                        static_cast<double>(std::max<long long>(1, tc.n_taylor)));
    json rt = json::array();
    char buf[256];
    out << "system           modes  r     max T (runtime)                total T (runtime)\n";
    for (int qb : cfg.qubit_budgets) {
        const double t_max =
            active_volume_runtime(est.max_t, qb, cfg.clock_hz, qa.total_itemized, model);
        const double t_tot =
            active_volume_runtime(est.total_t, qb, cfg.clock_hz, qa.total_itemized, model);
        rt.push_back({{"qubit_budget", qb},
                      {"clock_hz", cfg.clock_hz},
                      {"max_seconds", t_max},
                      {"total_seconds", t_tot}});
        std::snprintf(buf, sizeof buf, "%-16s %5d  %-4lld  %.3e (%.3g s)  %.3e (%.3g h)  Q_B=%d\n",
                      name.substr(0, 16).c_str(), ham.num_modes, est.r, est.max_t, t_max,
                      est.total_t, t_tot / 3600.0, qb);
        out << buf;
    }
    j["runtimes"] = rt;
    json lj = json::array();
    out << "\noptimization                          baseline       optimized      ratio\n";
    for (const auto &row : rows) {
        lj.push_back({{"name", row.name},
                      {"baseline", row.baseline},
                      {"optimized", row.optimized},
                      {"ratio", row.ratio()}});
        std::snprintf(buf, sizeof buf, "%-36s  %.4e  %.4e  x%.3f\n", row.name.c_str(),
                      row.baseline, row.optimized, row.ratio());
        out << buf;
    }
    j["improvements"] = lj;
    write_file(std::filesystem::path(cfg.out_dir) / "resources.json", j.dump(2));
    return static_cast<int>(ExitCode::Ok);
}

int report_failure(std::ostream &err) {
    try {
        throw;
    } catch (const ConfigError &e) {
        err << "error code=2 kind=config message=" << e.what() << "\n";
        return static_cast<int>(ExitCode::Config);
    } catch (const NumericalError &e) {
        err << "error code=3 kind=numerical message=" << e.what() << "\n";
        return static_cast<int>(ExitCode::Numerical);
    } catch (const SizeGuardError &e) {
        err << "error code=4 kind=size-guard message=" << e.what() << "\n";
        return static_cast<int>(ExitCode::SizeGuard);
    } catch (const std::exception &e) {
        err << "error code=3 kind=internal message=" << e.what() << "\n";
        return static_cast<int>(ExitCode::Numerical);
    }
}

} // namespace nirsim
