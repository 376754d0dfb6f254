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

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nirsim/cli.hpp"

namespace {

void add_common(CLI::App *app, nirsim::RunConfig &cfg, std::vector<std::string> &params,
                std::string &window) {
    app->add_option("--model", cfg.model, "built-in model name");
    app->add_option("--hamiltonian", cfg.hamiltonian_path, "Hamiltonian JSON file");
    app->add_option("--dipole", cfg.dipole_path, "dipole JSON file");
    app->add_option("--displacement", cfg.displacement_path, "displacement JSON file");
    app->add_option("--param", params, "model parameter key=value");
    app->add_option("--qubits-per-mode", cfg.qubits_per_mode, "grid qubits per mode");
    app->add_option("--epsilon-nu", cfg.epsilon_nu, "Trotter target error (cm^-1)");
    app->add_option("--eta", cfg.window.eta, "Lorentzian half width (cm^-1)");
    app->add_option("--epsilon", cfg.window.epsilon, "time truncation parameter");
    app->add_option("--shots", cfg.window.total_shots, "total shots over all components");
    app->add_option("--seed", cfg.seed, "master seed");
    app->add_flag("--exact", cfg.exact, "exact expectations instead of sampled shots");
    app->add_option("--window", window, "frequency window lo:hi (cm^-1)");
    app->add_option("--cutoff", cfg.window.cutoff, "projection cutoff W (cm^-1)");
    app->add_option("--padding", cfg.window.padding, "cutoff padding above omega_min (cm^-1)");
    app->add_option("--grid-points", cfg.window.grid_points, "spectrum grid points");
    app->add_option("--max-peaks", cfg.max_peaks, "matching pursuit peak limit");
    app->add_option("--bk", cfg.b_k, "coefficient register bits");
    app->add_option("--br", cfg.b_r, "phase register bits");
    app->add_flag("!--no-localize", cfg.localize, "skip mode localization");
    app->add_option("--workers", cfg.workers, "worker threads (0 = all cores)");
    app->add_option("--out", cfg.out_dir, "output directory");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"nirsim: near-infrared vibrational spectra via simulated quantum time evolution"};
    app.require_subcommand(1);
    nirsim::RunConfig cfg;
    std::vector<std::string> params;
    std::string window;

    auto *spectrum = app.add_subcommand("spectrum", "Trotterized spectrum pipeline");
    auto *exact = app.add_subcommand("exact", "dense diagonalization reference");
    auto *resources = app.add_subcommand("resources", "fault-tolerant resource estimate");
    for (auto *sc : {spectrum, exact, resources}) {
        add_common(sc, cfg, params, window);
    }
    resources->add_option("--stand-in-modes", cfg.stand_in_modes, "dense stand-in mode count");
    resources->add_option("--stand-in-n-mode", cfg.stand_in_n_mode, "stand-in coupling order");
    resources->add_option("--stand-in-degree", cfg.stand_in_degree, "stand-in Taylor degree");
    resources->add_option("--trotter-r", cfg.trotter_r, "fixed Trotter steps per interval");
    resources->add_option("--baseline-r", cfg.baseline_r, "comparison step count");
    resources->add_option("--qubit-budget", cfg.qubit_budgets, "logical qubit budgets");
    resources->add_option("--clock", cfg.clock_hz, "logical clock rate (Hz)");
    resources->add_flag("!--no-caching", cfg.caching, "disable coefficient caching");
    resources->add_flag("!--no-double-phase", cfg.double_phase, "disable double phase trick");
    resources->add_flag("!--no-double-measurement", cfg.double_measurement,
                        "disable double measurement trick");
    resources->add_flag("--single-resource-state", cfg.single_resource_state,
                        "share one resource state across degrees");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(nirsim::ExitCode::Config);
    }
    try {
        for (const auto &p : params) {
            nirsim::parse_param(p, cfg.params);
        }
        if (!window.empty()) {
            const auto [lo, hi] = nirsim::parse_window(window);
            cfg.window.omega_min = lo;
            cfg.window.omega_max = hi;
        }
        for (auto *sc : {spectrum, exact, resources}) {
            if (sc->count("--cutoff") > 0) {
                cfg.cutoff_set = true;
            }
        }
        if (spectrum->parsed()) {
            return nirsim::cmd_spectrum(cfg, std::cout, std::cerr);
        }
        if (exact->parsed()) {
            return nirsim::cmd_exact(cfg, std::cout, std::cerr);
        }
        return nirsim::cmd_resources(cfg, std::cout, std::cerr);
    } catch (...) {
        return nirsim::report_failure(std::cerr);
    }
}
