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

#include "otasync/ptp.hpp"

#include <cmath>
#include <set>
#include <unordered_map>

namespace otasync::ptp {
namespace {

void check_finite_nonneg(double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite and >= 0");
}

}  // namespace

double SimClock::ideal_reading(double ideal_time_ns) const {
    return ideal_time_ns + offset_ns + drift_ppb * 1e-9 * (ideal_time_ns - epoch_ns);
}

void SimClock::validate() const {
    check_finite_nonneg(granularity_ns, "clock granularity_ns");
    check_finite_nonneg(jitter_sigma_ns, "clock jitter_sigma_ns");
    if (!std::isfinite(offset_ns) || !std::isfinite(drift_ppb) || !std::isfinite(epoch_ns)) {
        throw InvalidArgument("clock parameters must be finite");
    }
}

double timestamp(const SimClock& clock, double ideal_time_ns, Rng& rng) {
    clock.validate();
    double t = clock.ideal_reading(ideal_time_ns);
    if (clock.granularity_ns > 0.0) {
        // nearbyint under the default rounding mode: ties go to even.
        t = std::nearbyint(t / clock.granularity_ns) * clock.granularity_ns;
    }
    if (clock.jitter_sigma_ns > 0.0) {
        std::normal_distribution<double> jitter(0.0, clock.jitter_sigma_ns);
        t += jitter(rng);
    }
    return t;
}

double timestamp(const SimClock& clock, double ideal_time_ns, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return timestamp(clock, ideal_time_ns, rng);
}

void PtpLink::validate() const {
    check_finite_nonneg(delay_ms_to_slave_ns, "link delay_ms_to_slave_ns");
    check_finite_nonneg(delay_slave_to_ms_ns, "link delay_slave_to_ms_ns");
    check_finite_nonneg(turnaround_ns, "link turnaround_ns");
}

OffsetEstimate two_step_exchange(const SimClock& master, const SimClock& slave, const PtpLink& link,
                                 double ideal_time_ns, Rng& rng) {
    master.validate();
    slave.validate();
    link.validate();

    const double sync_sent = ideal_time_ns;
    const double sync_received = sync_sent + link.delay_ms_to_slave_ns;
    const double req_sent = sync_received + link.turnaround_ns;
    const double req_received = req_sent + link.delay_slave_to_ms_ns;

    OffsetEstimate est;
    est.stamps.t1 = timestamp(master, sync_sent, rng);
    est.stamps.t2 = timestamp(slave, sync_received, rng);
    est.stamps.t3 = timestamp(slave, req_sent, rng);
    est.stamps.t4 = timestamp(master, req_received, rng);

    const double ms = est.stamps.t2 - est.stamps.t1;
    const double sm = est.stamps.t4 - est.stamps.t3;
    est.offset_ns = (ms - sm) / 2.0;
    est.mean_path_delay_ns = (ms + sm) / 2.0;
    est.true_offset_ns = slave.ideal_reading(sync_received) - master.ideal_reading(sync_received);
    return est;
}

OffsetEstimate two_step_exchange(const SimClock& master, const SimClock& slave, const PtpLink& link,
                                 double ideal_time_ns, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return two_step_exchange(master, slave, link, ideal_time_ns, rng);
}

double distance_m(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void FactoryTopology::validate() const {
    std::set<std::string> ids;
    for (const auto& n : nodes) {
        if (n.id.empty()) throw InvalidArgument("topology: node id must be nonempty");
        if (!ids.insert(n.id).second) throw InvalidArgument("topology: duplicate node id '" + n.id + "'");
    }
    if (mode == DistributionMode::in_band && !chain_order.empty()) {
        std::set<std::string> order(chain_order.begin(), chain_order.end());
        if (order.size() != chain_order.size() || order != ids) {
            throw InvalidArgument("topology: chain_order must be a permutation of the node ids");
        }
    }
    if (!(service_width_m >= 0.0) || !(service_depth_m >= 0.0)) {
        throw InvalidArgument("topology: service area must be nonnegative");
    }
}

std::vector<std::size_t> FactoryTopology::chain_indices() const {
    std::vector<std::size_t> idx;
    if (chain_order.empty()) {
        for (std::size_t i = 0; i < nodes.size(); ++i) idx.push_back(i);
        return idx;
    }
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < nodes.size(); ++i) by_id.emplace(nodes[i].id, i);
    for (const auto& id : chain_order) idx.push_back(by_id.at(id));
    return idx;
}

void HopParams::validate() const {
    stamp_clock.validate();
    link.validate();
    check_finite_nonneg(initial_offset_spread_ns, "initial_offset_spread_ns");
}

void OutOfBandParams::validate() const {
    stamp_clock.validate();
    check_finite_nonneg(distance_error_sigma_m, "distance_error_sigma_m");
    if (!std::isfinite(distance_bias_m)) throw InvalidArgument("distance_bias_m must be finite");
}

std::vector<double> distribute_in_band(const FactoryTopology& topology, const HopParams& params,
                                       std::uint64_t seed) {
    topology.validate();
    params.validate();
    if (topology.mode != DistributionMode::in_band) throw InvalidArgument("distribute_in_band: topology is not in-band");
    if (topology.nodes.empty()) throw InvalidArgument("distribute_in_band: empty chain");

    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> initial(-params.initial_offset_spread_ns, params.initial_offset_spread_ns);

    std::vector<double> errors(topology.nodes.size(), 0.0);
    // Relay k-1 masters node k. The gateway is the time reference (offset 0).
    double upstream_offset = 0.0;
    double upstream_error = 0.0;
    Position upstream_pos = topology.gateway;
    for (std::size_t idx : topology.chain_indices()) {
        const auto& node = topology.nodes[idx];

        SimClock master = params.stamp_clock;
        master.offset_ns = upstream_offset;
        SimClock slave = params.stamp_clock;
        slave.offset_ns = params.initial_offset_spread_ns > 0.0 ? initial(rng) : 0.0;

        PtpLink link = params.link;
        const double geometric_ns = distance_m(upstream_pos, node.position) / kSpeedOfLight * 1e9;
        link.delay_ms_to_slave_ns += geometric_ns;
        link.delay_slave_to_ms_ns += geometric_ns;

        const auto est = two_step_exchange(master, slave, link, params.sync_time_ns, rng);
        // The node steers its clock by the estimated offset to its upstream.
        const double corrected_offset = slave.offset_ns - est.offset_ns;
        const double error = upstream_error + est.offset_error_ns();

        errors[idx] = error;
        upstream_offset = corrected_offset;
        upstream_error = error;
        upstream_pos = node.position;
    }
    return errors;
}

std::vector<double> distribute_out_of_band(const FactoryTopology& topology, const OutOfBandParams& params,
                                           std::uint64_t seed) {
    topology.validate();
    params.validate();
    if (topology.mode != DistributionMode::out_of_band) {
        throw InvalidArgument("distribute_out_of_band: topology is not out-of-band");
    }

    Rng rng = make_rng(seed);
    std::normal_distribution<double> distance_noise(0.0, 1.0);

    std::vector<double> errors(topology.nodes.size(), 0.0);
    for (std::size_t i = 0; i < topology.nodes.size(); ++i) {
        const double true_m = distance_m(topology.gateway, topology.nodes[i].position);
        const double true_ns = true_m / kSpeedOfLight * 1e9;

        double compensated_ns = 0.0;
        switch (params.compensation) {
            case Compensation::none:
                break;
            case Compensation::perfect:
                compensated_ns = true_ns;
                break;
            case Compensation::estimated: {
                const double est_m = true_m + params.distance_bias_m +
                                     params.distance_error_sigma_m * distance_noise(rng);
                compensated_ns = est_m / kSpeedOfLight * 1e9;
                break;
            }
        }

        // Gateway stamps the broadcast send; the node stamps the arrival with
        // its own clock and steps so that this stamp reads send + compensation.
        SimClock gw = params.stamp_clock;
        gw.offset_ns = 0.0;
        SimClock node = params.stamp_clock;
        node.offset_ns = 0.0;
        const double sent = params.sync_time_ns;
        const double arrived = sent + true_ns;
        const double send_error = timestamp(gw, sent, rng) - gw.ideal_reading(sent);
        const double recv_error = timestamp(node, arrived, rng) - node.ideal_reading(arrived);

        // gateway time - corrected node time
        errors[i] = (true_ns - compensated_ns) + recv_error - send_error;
    }
    return errors;
}

std::string to_string(DistributionMode m) { return m == DistributionMode::in_band ? "in_band" : "out_of_band"; }

std::string to_string(Compensation c) {
    switch (c) {
        case Compensation::none: return "none";
        case Compensation::perfect: return "perfect";
        case Compensation::estimated: return "estimated";
    }
    return "unknown";
}

}  // namespace otasync::ptp
