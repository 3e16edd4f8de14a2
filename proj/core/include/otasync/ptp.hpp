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
#include <string>
#include <vector>

#include "otasync/numerology.hpp"
#include "otasync/rng.hpp"

namespace otasync::ptp {

/** Imperfect local clock.
 *
 * Reading at ideal time T gives
 *   q(T + offset + drift * 1e-9 * (T - epoch)) + N(0, jitter^2)
 * where q rounds to the nearest multiple of the granularity (ties to even).
 */
struct SimClock {
    double offset_ns = 0.0;
    double drift_ppb = 0.0;
    double granularity_ns = 0.0;
    double jitter_sigma_ns = 0.0;
    double epoch_ns = 0.0;

    /// Clock value before quantization and jitter.
    double ideal_reading(double ideal_time_ns) const;
    void validate() const;
};

/// Reads the clock, drawing jitter from rng.
double timestamp(const SimClock& clock, double ideal_time_ns, Rng& rng);

/// Same, with a private generator seeded from `seed`.
double timestamp(const SimClock& clock, double ideal_time_ns, std::uint64_t seed);

struct PtpLink {
    double delay_ms_to_slave_ns = 0.0;
    double delay_slave_to_ms_ns = 0.0;
    /// Slave time between receiving Sync and sending Delay_Req.
    double turnaround_ns = 1000.0;

    void validate() const;
};

struct ExchangeTimestamps {
    double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
};

struct OffsetEstimate {
    ExchangeTimestamps stamps;
    /// ((t2 - t1) - (t4 - t3)) / 2: slave minus master.
    double offset_ns = 0.0;
    /// ((t2 - t1) + (t4 - t3)) / 2
    double mean_path_delay_ns = 0.0;
    /// Noise-free slave minus master at the Sync arrival instant.
    double true_offset_ns = 0.0;

    double offset_error_ns() const { return offset_ns - true_offset_ns; }
};

/// One Sync / Delay_Req round starting at ideal time `ideal_time_ns`, each
/// side stamping with its own clock.
OffsetEstimate two_step_exchange(const SimClock& master, const SimClock& slave, const PtpLink& link,
                                 double ideal_time_ns, Rng& rng);

OffsetEstimate two_step_exchange(const SimClock& master, const SimClock& slave, const PtpLink& link,
                                 double ideal_time_ns, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Factory distribution
// ---------------------------------------------------------------------------

struct Position {
    double x = 0.0;
    double y = 0.0;
};

double distance_m(const Position& a, const Position& b);

struct FactoryNode {
    std::string id;
    Position position;
};

enum class DistributionMode { in_band, out_of_band };

struct FactoryTopology {
    Position gateway;
    std::vector<FactoryNode> nodes;
    DistributionMode mode = DistributionMode::in_band;
    /// Relay order for in-band mode; empty means node order.
    std::vector<std::string> chain_order;
    double service_width_m = 100.0;
    double service_depth_m = 100.0;

    void validate() const;
    /// Node indices in relay order.
    std::vector<std::size_t> chain_indices() const;
};

/// Per-hop model shared by every node.
struct HopParams {
    /// Stamping model of every port (offset/drift of relays are set per hop).
    SimClock stamp_clock;
    /// Fixed link delays added to the geometric propagation delay.
    PtpLink link;
    /// Free-running nodes start with an offset uniform in +-this before sync.
    double initial_offset_spread_ns = 1e6;
    double sync_time_ns = 1e9;

    void validate() const;
};

enum class Compensation { none, perfect, estimated };

struct OutOfBandParams {
    SimClock stamp_clock;
    Compensation compensation = Compensation::perfect;
    /// Gateway's node-distance estimate error for Compensation::estimated.
    double distance_bias_m = 0.0;
    double distance_error_sigma_m = 0.0;
    double sync_time_ns = 1e9;

    void validate() const;
};

/** Link-by-link relay along the chain.
 *
 * Entry k is node k's accumulated offset-estimation error after its own
 * exchange with the previous relay: positive means the node believes it is
 * further ahead of the gateway than it is. Results are in topology.nodes
 * order.
 */
std::vector<double> distribute_in_band(const FactoryTopology& topology, const HopParams& params,
                                       std::uint64_t seed);

/** Gateway broadcasts directly to every node.
 *
 * Node error = (true propagation - compensated propagation) plus the
 * stamping error of the gateway's send stamp and the node's receive stamp.
 * Positive means the node lags the gateway. Results are in topology.nodes
 * order.
 */
std::vector<double> distribute_out_of_band(const FactoryTopology& topology, const OutOfBandParams& params,
                                           std::uint64_t seed);

std::string to_string(DistributionMode m);
std::string to_string(Compensation c);

}  // namespace otasync::ptp
