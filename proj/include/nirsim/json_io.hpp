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

#include <json.hpp>

#include "nirsim/dynamics.hpp"
#include "nirsim/spectroscopy.hpp"

namespace nirsim {

[[nodiscard]] nlohmann::json window_to_json(const WindowConfig &w);
[[nodiscard]] WindowConfig window_from_json(const nlohmann::json &j);
[[nodiscard]] nlohmann::json ledger_to_json(const ShotLedger &l);
[[nodiscard]] ShotLedger ledger_from_json(const nlohmann::json &j);
[[nodiscard]] nlohmann::json plan_to_json(const TrotterPlan &p);
[[nodiscard]] TrotterPlan plan_from_json(const nlohmann::json &j);
[[nodiscard]] nlohmann::json peaks_to_json(const std::vector<Peak> &peaks);
[[nodiscard]] std::vector<Peak> peaks_from_json(const nlohmann::json &j);
[[nodiscard]] nlohmann::json sticks_to_json(const std::vector<Stick> &sticks);
[[nodiscard]] std::vector<Stick> sticks_from_json(const nlohmann::json &j);
[[nodiscard]] nlohmann::json spectrum_to_json(const SpectrumEstimate &s);
[[nodiscard]] SpectrumEstimate spectrum_from_json(const nlohmann::json &j);

} // namespace nirsim
