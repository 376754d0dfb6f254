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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nirsim/error.hpp"
#include "nirsim/hamiltonian.hpp"
#include "nirsim/resources.hpp"
#include "nirsim/spectroscopy.hpp"

namespace nirsim {

struct RunConfig {
    std::string model = "triatomic-toy";
    ModelParams params;
    std::string hamiltonian_path;
    std::string dipole_path;
    std::string displacement_path;
    int qubits_per_mode = 3;
    double epsilon_nu = 10.0;
    WindowConfig window = window_defaults();
    bool cutoff_set = false;
    std::uint64_t seed = 1;
    bool exact = false;
    bool localize = true;
    int workers = 0;
    int max_peaks = 40;
    int b_k = 10;
    int b_r = 25;
    std::string out_dir = "out";

    // resources
    int stand_in_modes = 0;
    int stand_in_n_mode = 2;
    int stand_in_degree = 4;
    long long trotter_r = 0;
    long long baseline_r = 0;
    std::vector<int> qubit_budgets{500, 2000};
    double clock_hz = 1e6;
    bool caching = true;
    bool double_phase = true;
    bool double_measurement = true;
    bool single_resource_state = false;

    /// Throws ConfigError on inconsistent settings and fills derived defaults.
    void validate();
};

/// Parses "lo:hi".
[[nodiscard]] std::pair<double, double> parse_window(const std::string &text);
/// Parses "key=value".
void parse_param(const std::string &text, ModelParams &params);

/// Returns the process exit status. Logs go to err, the summary table to out.
int cmd_spectrum(RunConfig config, std::ostream &out, std::ostream &err);
int cmd_exact(RunConfig config, std::ostream &out, std::ostream &err);
int cmd_resources(RunConfig config, std::ostream &out, std::ostream &err);

/// Maps the active exception to an exit status and prints one error line.
int report_failure(std::ostream &err);

} // namespace nirsim
