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

#include <stdexcept>
#include <string>
#include <vector>

namespace nirsim {

/// Process exit status used by the command line front end.
enum class ExitCode : int { Ok = 0, Config = 2, Numerical = 3, SizeGuard = 4 };

/// Invalid user input: bad parameters, malformed files, unknown names.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure such as non-convergence or a vanishing norm.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string &what,
                            std::vector<double> trace = {})
        : std::runtime_error(what), trace_(std::move(trace)) {}
    [[nodiscard]] const std::vector<double> &trace() const { return trace_; }

  private:
    std::vector<double> trace_;
};

/// Dense path requested for a problem that exceeds the dense size limit.
class SizeGuardError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace nirsim
