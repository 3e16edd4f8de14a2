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

#include "otasync/budget.hpp"

#include <algorithm>
#include <cmath>

namespace otasync::budget {

const std::vector<SyncRequirement>& requirement_table() {
    static const std::vector<SyncRequirement> table{
        {1, 900.0, 300, "<= 100 m x 100 m", 100.0 * 100.0,
         "Motion control; control-to-control communication for industrial controller"},
        {2, 10'000.0, 10, "<= 2500 m^2", 2500.0, "High data rate video streaming"},
        {3, 1'000.0, 100, "<= 10 km^2", 10e6, "AVProd synchronization and packet timing"},
        {4, 1'000.0, 100, "< 20 km^2", 20e6, "Smart grid: synchronicity between PMUs"},
    };
    return table;
}

SyncRequirement requirement(int level) {
    for (const auto& r : requirement_table()) {
        if (r.level == level) return r;
    }
    throw InvalidArgument("unknown synchronicity level " + std::to_string(level) + " (expected 1-4)");
}

std::string to_string(Combination c) {
    return c == Combination::worst_case_sum ? "worst_case_sum" : "root_sum_square";
}

Combination combination_from_string(const std::string& s) {
    if (s == "worst_case_sum") return Combination::worst_case_sum;
    if (s == "root_sum_square") return Combination::root_sum_square;
    throw InvalidArgument("unknown combination policy '" + s + "'");
}

void E2EError::validate() const {
    auto ok = [](double v) { return v >= 0.0 && std::isfinite(v); };
    if (!ok(ota_ns) || !ok(gateway_internal_ns)) throw InvalidArgument("error components must be >= 0");
    for (double d : distribution_ns) {
        if (!ok(d)) throw InvalidArgument("distribution errors must be >= 0");
    }
}

std::vector<double> end_to_end_error(const E2EError& e) {
    e.validate();
    auto combine = [&](double dist) {
        if (e.combination == Combination::worst_case_sum) return e.ota_ns + e.gateway_internal_ns + dist;
        return std::sqrt(e.ota_ns * e.ota_ns + e.gateway_internal_ns * e.gateway_internal_ns + dist * dist);
    };
    if (e.distribution_ns.empty()) return {combine(0.0)};
    std::vector<double> totals;
    totals.reserve(e.distribution_ns.size());
    for (double d : e.distribution_ns) totals.push_back(combine(d));
    return totals;
}

std::string to_string(Binding b) {
    switch (b) {
        case Binding::none: return "none";
        case Binding::time_budget: return "time_budget";
        case Binding::device_count: return "device_count";
        case Binding::both: return "both";
    }
    return "unknown";
}

Verdict evaluate(std::span<const double> totals, const SyncRequirement& req, std::size_t node_count,
                 double service_area_m2) {
    Verdict v;
    v.node_count = node_count;
    v.max_total_ns = totals.empty() ? 0.0 : *std::max_element(totals.begin(), totals.end());
    for (double t : totals) v.margins_ns.push_back(req.budget_ns - t);

    const bool time_ok = v.max_total_ns < req.budget_ns;
    const bool count_ok = node_count <= static_cast<std::size_t>(req.max_devices);
    v.pass = time_ok && count_ok;
    if (!time_ok && !count_ok) {
        v.binding = Binding::both;
    } else if (!time_ok) {
        v.binding = Binding::time_budget;
    } else if (!count_ok) {
        v.binding = Binding::device_count;
    }
    v.service_area_ok = service_area_m2 <= req.max_service_area_m2;
    return v;
}

Verdict evaluate(std::span<const double> totals, const SyncRequirement& req, const ptp::FactoryTopology& topo) {
    return evaluate(totals, req, topo.nodes.size(), topo.service_width_m * topo.service_depth_m);
}

}  // namespace otasync::budget
