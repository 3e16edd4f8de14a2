/*
   Copyright 2026 The otasync Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "otasync/budget.hpp"
#include "otasync/monte_carlo.hpp"
#include "otasync/ptp.hpp"

namespace otasync::cli {

/// Scenario validation failure; `field` is the dotted path of the culprit.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string field, const std::string& message)
        : std::runtime_error("scenario field '" + field + "': " + message), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct OtaSource {
    /// Use this value as the over-the-air error...
    std::optional<double> ota_ns;
    /// ...or run the scenario's radio experiment and take its p90.
    bool from_experiment = false;
};

struct Scenario {
    std::string name;
    std::uint64_t master_seed = 0;
    std::size_t trials = kDefaultTrials;
    TrialConfig trial;

    std::optional<ptp::FactoryTopology> topology;
    ptp::HopParams hop;
    ptp::OutOfBandParams out_of_band;
    std::size_t distribution_runs = 1000;
    double gateway_internal_ns = 0.0;
    int budget_level = 1;
    budget::Combination combination = budget::Combination::worst_case_sum;
    OtaSource ota;

    nlohmann::json raw;
    std::string hash;
};

/// FNV-1a 64 over the canonical (sorted-key, compact) JSON dump, as hex.
std::string content_hash(const nlohmann::json& j);

/// Validates and converts a scenario document. Relative file references
/// (profile_file, calibration_file) resolve against `base_dir`.
Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

Scenario load_scenario(const std::filesystem::path& file);

/// Reads the "calibration" object of a calibration file into link params.
LinkBudgetParams load_calibration(const std::filesystem::path& file);

LinkBudgetParams link_budget_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json link_budget_to_json(const LinkBudgetParams& p);

}  // namespace otasync::cli
