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

#include <span>
#include <string>
#include <vector>

#include "otasync/ptp.hpp"

namespace otasync::budget {

/// One row of the IIoT clock-synchronicity requirement table.
struct SyncRequirement {
    int level = 1;
    double budget_ns = 0.0;
    int max_devices = 0;
    std::string service_area_descriptor;
    /// Numeric reading of the descriptor, used for the advisory area check.
    double max_service_area_m2 = 0.0;
    std::string scenario;
};

/// Levels 1..4; throws InvalidArgument otherwise.
SyncRequirement requirement(int level);

const std::vector<SyncRequirement>& requirement_table();

enum class Combination { worst_case_sum, root_sum_square };

std::string to_string(Combination c);
Combination combination_from_string(const std::string& s);

/// Error contributions along gNB -> gateway -> factory node.
struct E2EError {
    double ota_ns = 0.0;
    double gateway_internal_ns = 0.0;
    /// Per-node distribution error magnitudes.
    std::vector<double> distribution_ns;
    Combination combination = Combination::worst_case_sum;

    void validate() const;
};

/// Per-node totals; a single total when distribution_ns is empty.
std::vector<double> end_to_end_error(const E2EError& e);

enum class Binding { none, time_budget, device_count, both };

std::string to_string(Binding b);

struct Verdict {
    bool pass = false;
    Binding binding = Binding::none;
    double max_total_ns = 0.0;
    std::size_t node_count = 0;
    /// budget_ns - total, per node.
    std::vector<double> margins_ns;
    /// Reported only, never fails the verdict.
    bool service_area_ok = true;
};

/// PASS iff every total is strictly below the budget and the node count is
/// within the device limit.
Verdict evaluate(std::span<const double> totals, const SyncRequirement& req, std::size_t node_count,
                 double service_area_m2);

Verdict evaluate(std::span<const double> totals, const SyncRequirement& req, const ptp::FactoryTopology& topo);

}  // namespace otasync::budget
