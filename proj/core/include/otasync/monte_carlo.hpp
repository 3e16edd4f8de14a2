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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "otasync/channel.hpp"
#include "otasync/numerology.hpp"
#include "otasync/sync_estimator.hpp"

namespace otasync {

inline constexpr std::size_t kDefaultTrials = 5000;

/// SNR source for a trial: a fixed per-sample value, or the log-distance
/// model evaluated at the trial distance and numerology.
using SnrModel = std::variant<double, LinkBudgetParams>;

struct TrialConfig {
    Numerology numerology;
    /// Direct gNB-to-gateway path length.
    double distance_m = 1000.0;
    int n_id2 = 0;
    SnrModel snr = 300.0;
    TapProfile profile = single_tap_profile();
    FailurePolicy policy;

    double snr_db() const;
    void validate() const;
};

struct TrialOutcome {
    double error_ns = 0.0;
    bool failed = false;
    std::size_t lag_samples = 0;
};

/** Reusable per-configuration state: transmitted symbol and matched filter.
 *
 * One trial is PSS -> OFDM symbol -> channel (fading + propagation delay) ->
 * AWGN -> correlation peak -> timing error against the arrival of the
 * CP-free part of the symbol.
 */
class TrialRunner {
public:
    explicit TrialRunner(TrialConfig cfg);

    TrialOutcome run(std::uint64_t seed) const;

    const TrialConfig& config() const { return cfg_; }
    double snr_db() const { return snr_db_; }
    /// Propagation delay plus CP duration, i.e. where the template should land.
    double reference_delay_s() const { return reference_delay_s_; }

private:
    TrialConfig cfg_;
    Waveform tx_;
    Waveform template_;
    double tx_power_ = 0.0;
    double snr_db_ = 0.0;
    double reference_delay_s_ = 0.0;
};

TrialOutcome run_trial(const TrialConfig& cfg, std::uint64_t seed);

enum class Verdict { value, synchronization_failure };

std::string to_string(Verdict v);

struct ExperimentResult {
    std::size_t n_trials = 0;
    std::uint64_t master_seed = 0;
    /// Per-trial absolute errors, in trial-index order.
    std::vector<double> errors_ns;
    double p50_ns = 0.0;
    double p90_ns = 0.0;
    std::size_t failures = 0;
    double failure_rate = 0.0;
    double failure_threshold_ns = 0.0;
    double snr_db = 0.0;
    Verdict verdict = Verdict::value;
};

/// Nearest-rank percentile: the ceil(q * n)-th smallest value (q in (0, 1]).
double nearest_rank_percentile(std::span<const double> values, double q);

/// Workers from $OTASYNC_WORKERS, else the hardware concurrency.
unsigned default_workers();

/// Trial i uses derive_seed(master_seed, i); the result does not depend on
/// the worker count.
ExperimentResult run_experiment(const TrialConfig& cfg, std::size_t n_trials, std::uint64_t master_seed,
                                unsigned workers = 0);

// ---------------------------------------------------------------------------
// Subcarrier spacing x range grid
// ---------------------------------------------------------------------------

struct Table2Cell {
    int scs_khz = 15;
    double range_m = 1000.0;
    ExperimentResult result;
};

struct Table2Report {
    std::uint64_t master_seed = 0;
    std::size_t n_trials = kDefaultTrials;
    LinkBudgetParams link;
    std::string profile_name;
    double delay_spread_ns = 0.0;
    std::vector<Table2Cell> cells;

    const Table2Cell& cell(int scs_khz, double range_m) const;
};

inline constexpr int kTable2Scs[] = {15, 30, 60};
inline constexpr double kTable2RangesM[] = {1000.0, 3000.0};

struct Table2Options {
    std::size_t n_trials = kDefaultTrials;
    unsigned workers = 0;
    std::string profile_name = "TDL-C";
    double delay_spread_ns = 300.0;
    int n_id2 = 0;
    FailurePolicy policy;
};

/// Trial config for one grid cell: ground range -> slant range, SNR from the
/// link model at that range and numerology.
TrialConfig table2_cell_config(const LinkBudgetParams& link, int scs_khz, double range_m,
                               const TapProfile& profile, const Table2Options& opts);

/// Runs {15, 30, 60} kHz x {1, 3} km. Every cell shares the master seed, so
/// trial i sees the same fading and noise draws in every cell.
Table2Report table2_suite(const LinkBudgetParams& calibration, std::uint64_t master_seed,
                          const Table2Options& opts = {});

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

struct CalibrationRequest {
    double target_p90_ns = 30.4;
    double range_m = 1000.0;
    int scs_khz = 15;
    LinkBudgetParams link;
    Table2Options table;
    std::uint64_t master_seed = 42;
    double lo_snr_db = -40.0;
    double hi_snr_db = 40.0;
    double rel_tolerance = 0.05;
    int max_iterations = 24;
};

struct CalibrationStep {
    double anchor_snr_db = 0.0;
    double p90_ns = 0.0;
};

struct CalibrationResult {
    double anchor_snr_db = 0.0;
    double achieved_p90_ns = 0.0;
    bool converged = false;
    std::string note;
    std::vector<CalibrationStep> history;
};

/** Bisects the 1 km anchor SNR until the p90 at (scs, range) is within
 * rel_tolerance of the target. p90 falls as SNR rises; if the target lies
 * outside [p90(hi), p90(lo)] the nearer bracket end is returned with
 * converged = false.
 */
CalibrationResult calibrate(const CalibrationRequest& req);

}  // namespace otasync
