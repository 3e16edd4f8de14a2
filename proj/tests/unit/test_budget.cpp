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

#include <doctest.h>

#include <cmath>
#include <random>

#include "otasync/budget.hpp"

using namespace otasync;
using namespace otasync::budget;

namespace {

ptp::FactoryTopology nodes(std::size_t n) {
    ptp::FactoryTopology t;
    for (std::size_t i = 0; i < n; ++i) t.nodes.push_back({"n" + std::to_string(i), {double(i), 0.0}});
    return t;
}

}  // namespace

TEST_CASE("requirements: bundled rows") {
    const auto r1 = requirement(1);
    CHECK(r1.budget_ns == 900.0);
    CHECK(r1.max_devices == 300);
    CHECK(r1.service_area_descriptor == "<= 100 m x 100 m");
    CHECK(r1.scenario.find("Motion control") != std::string::npos);
    const auto r2 = requirement(2);
    CHECK(r2.budget_ns == 10'000.0);
    CHECK(r2.max_devices == 10);
    CHECK(requirement(3).budget_ns == 1'000.0);
    CHECK(requirement(3).max_devices == 100);
    CHECK(requirement(4).budget_ns == 1'000.0);
    CHECK(requirement(4).max_devices == 100);
    CHECK(requirement_table().size() == 4);
}

TEST_CASE("requirements: unknown level") {
    CHECK_THROWS_AS(requirement(5), InvalidArgument);
    CHECK_THROWS_AS(requirement(0), InvalidArgument);
}

TEST_CASE("end-to-end: worked values") {
    CHECK(end_to_end_error({0.0, 0.0, {0.0}, Combination::worst_case_sum}) == std::vector<double>{0.0});
    CHECK(end_to_end_error({30.4, 50.0, {100.0}, Combination::worst_case_sum})[0] == doctest::Approx(180.4));
    CHECK(end_to_end_error({300.0, 400.0, {0.0}, Combination::root_sum_square})[0] == doctest::Approx(500.0));
    CHECK(end_to_end_error({300.0, 400.0, {}, Combination::root_sum_square}).size() == 1);
}

TEST_CASE("end-to-end: one total per node") {
    const auto t = end_to_end_error({10.0, 20.0, {1.0, 2.0, 3.0}, Combination::worst_case_sum});
    CHECK(t == std::vector<double>{31.0, 32.0, 33.0});
}

TEST_CASE("end-to-end: negative components are rejected") {
    CHECK_THROWS_AS(end_to_end_error({-1.0, 0.0, {}, Combination::worst_case_sum}), InvalidArgument);
    CHECK_THROWS_AS(end_to_end_error({0.0, -1.0, {}, Combination::worst_case_sum}), InvalidArgument);
    CHECK_THROWS_AS(end_to_end_error({0.0, 0.0, {-2.0}, Combination::worst_case_sum}), InvalidArgument);
    CHECK_THROWS_AS(end_to_end_error({NAN, 0.0, {}, Combination::worst_case_sum}), InvalidArgument);
}

TEST_CASE("end-to-end: worst-case sum dominates root-sum-square") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    for (int i = 0; i < 10'000; ++i) {
        E2EError e{u(rng), u(rng), {u(rng), u(rng)}, Combination::worst_case_sum};
        const auto wcs = end_to_end_error(e);
        e.combination = Combination::root_sum_square;
        const auto rss = end_to_end_error(e);
        for (std::size_t k = 0; k < wcs.size(); ++k) CHECK(wcs[k] >= rss[k]);
    }
}

TEST_CASE("evaluate: pass at 180.4 ns with 50 nodes") {
    const std::vector<double> totals(50, 180.4);
    const auto v = evaluate(totals, requirement(1), nodes(50));
    CHECK(v.pass);
    CHECK(v.binding == Binding::none);
    CHECK(v.max_total_ns == 180.4);
    CHECK(v.node_count == 50);
    REQUIRE(v.margins_ns.size() == 50);
    CHECK(v.margins_ns[0] == doctest::Approx(719.6));
    CHECK(v.service_area_ok);
}

TEST_CASE("evaluate: 301 nodes fail on device count") {
    const std::vector<double> totals(301, 180.4);
    const auto v = evaluate(totals, requirement(1), nodes(301));
    CHECK_FALSE(v.pass);
    CHECK(v.binding == Binding::device_count);
    CHECK(evaluate(std::vector<double>(300, 180.4), requirement(1), nodes(300)).pass);
}

TEST_CASE("evaluate: exactly at the budget fails") {
    const std::vector<double> totals{100.0, 900.0};
    const auto v = evaluate(totals, requirement(1), nodes(2));
    CHECK_FALSE(v.pass);
    CHECK(v.binding == Binding::time_budget);
    CHECK(v.margins_ns[1] == 0.0);
    CHECK(evaluate(std::vector<double>{std::nextafter(900.0, 0.0)}, requirement(1), nodes(1)).pass);
}

TEST_CASE("evaluate: both constraints binding") {
    const auto v = evaluate(std::vector<double>(11, 20'000.0), requirement(2), nodes(11));
    CHECK_FALSE(v.pass);
    CHECK(v.binding == Binding::both);
}

TEST_CASE("evaluate: service area is advisory") {
    auto topo = nodes(5);
    topo.service_width_m = 200.0;
    topo.service_depth_m = 200.0;
    const auto v = evaluate(std::vector<double>(5, 10.0), requirement(1), topo);
    CHECK(v.pass);
    CHECK_FALSE(v.service_area_ok);
}

TEST_CASE("evaluate: increasing any component never turns FAIL into PASS") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> level(1, 4), count(1, 400);
    for (int i = 0; i < 10'000; ++i) {
        const auto req = requirement(level(rng));
        const double scale = req.budget_ns;
        E2EError e{u(rng) * scale, u(rng) * scale, {u(rng) * scale, u(rng) * scale},
                   u(rng) < 0.5 ? Combination::worst_case_sum : Combination::root_sum_square};
        const std::size_t n = static_cast<std::size_t>(count(rng));
        const auto before = evaluate(end_to_end_error(e), req, n, 0.0);
        E2EError bumped = e;
        switch (i % 4) {
            case 0: bumped.ota_ns += u(rng) * scale; break;
            case 1: bumped.gateway_internal_ns += u(rng) * scale; break;
            case 2: bumped.distribution_ns[0] += u(rng) * scale; break;
            default: bumped.distribution_ns[1] += u(rng) * scale; break;
        }
        const auto after = evaluate(end_to_end_error(bumped), req, n + (i % 3 == 0 ? 1 : 0), 0.0);
        if (!before.pass) CHECK_FALSE(after.pass);
        CHECK(after.max_total_ns >= before.max_total_ns);
    }
}

TEST_CASE("names round trip") {
    CHECK(combination_from_string(to_string(Combination::worst_case_sum)) == Combination::worst_case_sum);
    CHECK(combination_from_string(to_string(Combination::root_sum_square)) == Combination::root_sum_square);
    CHECK_THROWS_AS(combination_from_string("max"), InvalidArgument);
    CHECK(to_string(Binding::device_count) == "device_count");
}
