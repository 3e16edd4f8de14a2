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
#include <string>
#include <vector>

#include <json.hpp>

#include "otasync/budget.hpp"
#include "otasync/monte_carlo.hpp"
#include "scenario.hpp"

// Output documents. Every JSON file has the shape
//   { "schema": ..., "provenance": {scenario_hash, master_seed, ...},
//     "result": {...}, "run_info": {timestamp, workers, version} }
// and only run_info may differ between two runs with the same inputs.
namespace otasync::cli {

inline constexpr const char* kToolVersion = "0.1.0";

nlohmann::json provenance(const std::string& scenario_hash, std::uint64_t master_seed);
nlohmann::json run_info(unsigned workers);

nlohmann::json experiment_json(const ExperimentResult& r);

/// Wide layout: one row per SCS, one column per range; each cell is the p90
/// in ns (one decimal) or "synchronization_failure".
std::string table2_csv(const Table2Report& report, const std::string& scenario_hash);
nlohmann::json table2_json(const Table2Report& report);

/// Effective configuration of a table2 run, hashed for provenance.
nlohmann::json table2_config_json(const Table2Report& report, const Table2Options& opts);

nlohmann::json calibration_json(const CalibrationRequest& req, const CalibrationResult& res);

/// Sorted errors with their empirical CDF, as "error_ns,cdf" rows.
std::string cdf_csv(const std::vector<double>& errors_ns, const std::string& scenario_hash,
                    std::uint64_t master_seed);

struct NodeDistributionStats {
    std::string id;
    std::size_t hop = 0;
    double mean_ns = 0.0;
    double std_ns = 0.0;
    double p90_abs_ns = 0.0;
    double max_abs_ns = 0.0;
};

/// Runs the scenario's distribution mode `runs` times (run r seeded with
/// derive_seed(master_seed, r)) and summarizes each node.
std::vector<NodeDistributionStats> distribution_statistics(const Scenario& s);

struct DistributionReport {
    std::vector<NodeDistributionStats> nodes;
    double ota_ns = 0.0;
    std::vector<double> totals_ns;
    budget::SyncRequirement requirement;
    budget::Verdict verdict;
};

DistributionReport build_distribution_report(const Scenario& s, double ota_ns);
nlohmann::json distribution_json(const Scenario& s, const DistributionReport& r);

void write_text(const std::filesystem::path& file, const std::string& text);
void write_json(const std::filesystem::path& file, const nlohmann::json& j);

}  // namespace otasync::cli
