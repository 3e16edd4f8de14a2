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

#include "otasync/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "otasync/nr_signal.hpp"
#include "otasync/rng.hpp"

namespace otasync {

double TrialConfig::snr_db() const {
    if (const auto* fixed = std::get_if<double>(&snr)) return *fixed;
    return snr_for_numerology(std::get<LinkBudgetParams>(snr), distance_m, numerology);
}

void TrialConfig::validate() const {
    if (!is_supported_scs(numerology.scs_khz)) throw InvalidArgument("trial: unsupported subcarrier spacing");
    if (!(distance_m > 0.0) || !std::isfinite(distance_m)) throw InvalidArgument("trial: distance_m must be positive");
    if (n_id2 < 0 || n_id2 > 2) throw InvalidArgument("trial: n_id2 must be 0, 1 or 2");
    if (const auto* fixed = std::get_if<double>(&snr); fixed && !std::isfinite(*fixed)) {
        throw InvalidArgument("trial: snr_db must be finite");
    }
    if (const auto* link = std::get_if<LinkBudgetParams>(&snr)) link->validate();
    profile.validate();
    policy.validate();
}

TrialRunner::TrialRunner(TrialConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    tx_ = modulate(generate_pss(cfg_.n_id2), cfg_.numerology);
    template_ = reference_template(cfg_.n_id2, cfg_.numerology);
    tx_power_ = tx_.mean_power();
    snr_db_ = cfg_.snr_db();
    reference_delay_s_ = propagation_delay_s(cfg_.distance_m) + cfg_.numerology.cp_duration_ns() * 1e-9;
}

TrialOutcome TrialRunner::run(std::uint64_t seed) const {
    const auto channel = realize(cfg_.profile, derive_seed(seed, stream::kChannel));
    const auto faded = apply(tx_, channel, propagation_delay_s(cfg_.distance_m));
    // SNR is relative to the mean received power (unit mean channel gain).
    const auto rx = add_awgn(faded, snr_db_, derive_seed(seed, stream::kNoise), tx_power_);
    const auto est = estimate_delay(rx, template_);

    TrialOutcome out;
    out.lag_samples = est.lag_samples;
    out.error_ns = timing_error_ns(est, reference_delay_s_, cfg_.numerology);
    out.failed = is_failure(out.error_ns, cfg_.numerology, cfg_.policy);
    return out;
}

TrialOutcome run_trial(const TrialConfig& cfg, std::uint64_t seed) { return TrialRunner(cfg).run(seed); }

std::string to_string(Verdict v) {
    return v == Verdict::value ? "value" : "synchronization_failure";
}

double nearest_rank_percentile(std::span<const double> values, double q) {
    if (values.empty()) throw InvalidArgument("percentile of an empty set");
    if (!(q > 0.0 && q <= 1.0)) throw InvalidArgument("percentile rank must be in (0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size()) - 1e-12));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

unsigned default_workers() {
    if (const char* env = std::getenv("OTASYNC_WORKERS"); env && *env) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentResult run_experiment(const TrialConfig& cfg, std::size_t n_trials, std::uint64_t master_seed,
                                unsigned workers) {
    if (n_trials < 1) throw InvalidArgument("experiment needs at least one trial");
    const TrialRunner runner(cfg);
    if (workers == 0) workers = default_workers();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_trials));

    std::vector<TrialOutcome> outcomes(n_trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        for (std::size_t i = next++; i < n_trials; i = next++) {
            try {
                outcomes[i] = runner.run(derive_seed(master_seed, i));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n_trials;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);

    ExperimentResult res;
    res.n_trials = n_trials;
    res.master_seed = master_seed;
    res.snr_db = runner.snr_db();
    res.failure_threshold_ns = cfg.policy.threshold_ns(cfg.numerology);
    res.errors_ns.reserve(n_trials);
    for (const auto& o : outcomes) {
        res.errors_ns.push_back(o.error_ns);
        res.failures += o.failed ? 1 : 0;
    }
    res.p50_ns = nearest_rank_percentile(res.errors_ns, 0.5);
    res.p90_ns = nearest_rank_percentile(res.errors_ns, 0.9);
    res.failure_rate = static_cast<double>(res.failures) / static_cast<double>(n_trials);
    res.verdict = res.failure_rate >= cfg.policy.experiment_failure_fraction ? Verdict::synchronization_failure
                                                                             : Verdict::value;
    return res;
}

const Table2Cell& Table2Report::cell(int scs_khz, double range_m) const {
    for (const auto& c : cells) {
        if (c.scs_khz == scs_khz && c.range_m == range_m) return c;
    }
    throw InvalidArgument("no such table cell");
}

TrialConfig table2_cell_config(const LinkBudgetParams& link, int scs_khz, double range_m,
                               const TapProfile& profile, const Table2Options& opts) {
    TrialConfig cfg;
    cfg.numerology = Numerology::from_scs(scs_khz);
    cfg.distance_m = slant_range_m(link, range_m);
    cfg.n_id2 = opts.n_id2;
    cfg.snr = link;
    cfg.profile = profile;
    cfg.policy = opts.policy;
    return cfg;
}

Table2Report table2_suite(const LinkBudgetParams& calibration, std::uint64_t master_seed,
                          const Table2Options& opts) {
    calibration.validate();
    const auto profile = load_tdl_profile(opts.profile_name, opts.delay_spread_ns);

    Table2Report report;
    report.master_seed = master_seed;
    report.n_trials = opts.n_trials;
    report.link = calibration;
    report.profile_name = profile.name;
    report.delay_spread_ns = profile.delay_spread_ns;
    for (int scs : kTable2Scs) {
        for (double range : kTable2RangesM) {
            const auto cfg = table2_cell_config(calibration, scs, range, profile, opts);
            report.cells.push_back({scs, range, run_experiment(cfg, opts.n_trials, master_seed, opts.workers)});
        }
    }
    return report;
}

CalibrationResult calibrate(const CalibrationRequest& req) {
    if (!(req.target_p90_ns > 0.0)) throw InvalidArgument("calibration target must be positive");
    if (!(req.lo_snr_db < req.hi_snr_db)) throw InvalidArgument("calibration bracket is empty");
    const auto profile = load_tdl_profile(req.table.profile_name, req.table.delay_spread_ns);

    CalibrationResult out;
    auto p90_at = [&](double anchor) {
        LinkBudgetParams link = req.link;
        link.reference_snr_db_at_1km = anchor;
        const auto cfg = table2_cell_config(link, req.scs_khz, req.range_m, profile, req.table);
        const double p90 = run_experiment(cfg, req.table.n_trials, req.master_seed, req.table.workers).p90_ns;
        out.history.push_back({anchor, p90});
        return p90;
    };
    auto within = [&](double p90) {
        return std::abs(p90 - req.target_p90_ns) <= req.rel_tolerance * req.target_p90_ns;
    };

    double lo = req.lo_snr_db;
    double hi = req.hi_snr_db;
    const double p_hi = p90_at(hi);
    if (within(p_hi) || p_hi > req.target_p90_ns) {
        out.anchor_snr_db = hi;
        out.achieved_p90_ns = p_hi;
        out.converged = within(p_hi);
        if (!out.converged) out.note = "target below the p90 reached at the top of the bracket";
        return out;
    }
    const double p_lo = p90_at(lo);
    if (within(p_lo) || p_lo < req.target_p90_ns) {
        out.anchor_snr_db = lo;
        out.achieved_p90_ns = p_lo;
        out.converged = within(p_lo);
        if (!out.converged) out.note = "target above the p90 reached at the bottom of the bracket";
        return out;
    }

    double best_anchor = hi;
    double best_p90 = p_hi;
    for (int it = 0; it < req.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double p = p90_at(mid);
        if (std::abs(p - req.target_p90_ns) < std::abs(best_p90 - req.target_p90_ns)) {
            best_anchor = mid;
            best_p90 = p;
        }
        if (within(p)) break;
        if (p > req.target_p90_ns) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.anchor_snr_db = best_anchor;
    out.achieved_p90_ns = best_p90;
    out.converged = within(best_p90);
    if (!out.converged) out.note = "bisection did not reach the tolerance";
    return out;
}

}  // namespace otasync
