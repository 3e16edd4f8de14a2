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

#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "report.hpp"
#include "scenario.hpp"

namespace otasync::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    unsigned workers = 0;
    std::string out_dir = ".";
};

unsigned resolve_workers(unsigned w) { return w == 0 ? default_workers() : w; }

std::string fmt_ns(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f ns", v);
    return buf;
}

json envelope(const char* schema, json prov, json result, unsigned workers) {
    return {{"schema", schema}, {"provenance", std::move(prov)}, {"result", std::move(result)},
            {"run_info", run_info(workers)}};
}

// -- table2 -----------------------------------------------------------------

struct Table2Args {
    std::uint64_t seed = 42;
    std::string calibration;
    std::optional<double> anchor_snr_db;
    std::optional<double> pathloss_exponent;
    std::size_t trials = kDefaultTrials;
    std::string profile = "TDL-C";
    double delay_spread_ns = 300.0;
    CommonOpts common;
};

int cmd_table2(const Table2Args& a, std::ostream& out) {
    LinkBudgetParams link;
    if (!a.calibration.empty()) link = load_calibration(a.calibration);
    if (a.anchor_snr_db) link.reference_snr_db_at_1km = *a.anchor_snr_db;
    if (a.pathloss_exponent) link.pathloss_exponent = *a.pathloss_exponent;

    Table2Options opts;
    opts.n_trials = a.trials;
    opts.workers = resolve_workers(a.common.workers);
    opts.profile_name = a.profile;
    opts.delay_spread_ns = a.delay_spread_ns;

    const auto report = table2_suite(link, a.seed, opts);
    const auto config = table2_config_json(report, opts);
    const auto hash = content_hash(config);

    const fs::path dir = a.common.out_dir;
    write_text(dir / "table2.csv", table2_csv(report, hash));
    auto prov = provenance(hash, a.seed);
    prov["config"] = config;
    write_json(dir / "table2.json", envelope("otasync.table2/1", prov, table2_json(report), opts.workers));

    out << "p90 timing error (" << report.n_trials << " trials per cell, seed " << a.seed << ")\n";
    out << "SCS      1 km            3 km\n";
    for (int scs : kTable2Scs) {
        out << scs << " kHz";
        for (double range : kTable2RangesM) {
            const auto& r = report.cell(scs, range).result;
            const auto text = r.verdict == Verdict::synchronization_failure ? std::string("sync failure") : fmt_ns(r.p90_ns);
            out << "   " << text;
        }
        out << "\n";
    }
    out << "wrote " << (dir / "table2.csv").string() << " and " << (dir / "table2.json").string() << "\n";
    return kOk;
}

// -- experiment ---------------------------------------------------------------

int cmd_experiment(const std::string& scenario_file, const std::string& errors_csv, const CommonOpts& c,
                   std::ostream& out) {
    const auto s = load_scenario(scenario_file);
    const unsigned workers = resolve_workers(c.workers);
    const auto r = run_experiment(s.trial, s.trials, s.master_seed, workers);

    auto prov = provenance(s.hash, s.master_seed);
    prov["scenario_name"] = s.name;
    const fs::path file = fs::path(c.out_dir) / "experiment.json";
    write_json(file, envelope("otasync.experiment/1", prov, experiment_json(r), workers));
    if (!errors_csv.empty()) write_text(errors_csv, cdf_csv(r.errors_ns, s.hash, s.master_seed));

    out << "p50 " << fmt_ns(r.p50_ns) << ", p90 " << fmt_ns(r.p90_ns) << ", failure rate " << r.failure_rate
        << " -> " << to_string(r.verdict) << "\nwrote " << file.string() << "\n";
    return kOk;
}

// -- distribute ---------------------------------------------------------------

int cmd_distribute(const std::string& scenario_file, bool strict, const CommonOpts& c, std::ostream& out) {
    const auto s = load_scenario(scenario_file);
    if (!s.topology) throw ScenarioError("topology", "required for distribute");
    const unsigned workers = resolve_workers(c.workers);

    double ota_ns = 0.0;
    std::optional<ExperimentResult> radio;
    if (s.ota.from_experiment) {
        radio = run_experiment(s.trial, s.trials, s.master_seed, workers);
        ota_ns = radio->p90_ns;
    } else if (s.ota.ota_ns) {
        ota_ns = *s.ota.ota_ns;
    }

    const auto report = build_distribution_report(s, ota_ns);
    auto result = distribution_json(s, report);
    if (radio) result["ota_experiment"] = experiment_json(*radio);

    auto prov = provenance(s.hash, s.master_seed);
    prov["scenario_name"] = s.name;
    const fs::path file = fs::path(c.out_dir) / "distribute.json";
    write_json(file, envelope("otasync.distribute/1", prov, result, workers));

    if (radio && radio->verdict == Verdict::synchronization_failure) {
        out << "warning: over-the-air acquisition reports synchronization failure\n";
    }
    out << ptp::to_string(s.topology->mode) << ", " << report.nodes.size() << " nodes, level "
        << report.requirement.level << " budget " << fmt_ns(report.requirement.budget_ns) << "\n"
        << "worst node total " << fmt_ns(report.verdict.max_total_ns) << " -> "
        << (report.verdict.pass ? "PASS" : "FAIL");
    if (!report.verdict.pass) out << " (" << budget::to_string(report.verdict.binding) << ")";
    if (!report.verdict.service_area_ok) out << " [advisory: service area exceeds the level's area]";
    out << "\nwrote " << file.string() << "\n";
    return strict && !report.verdict.pass ? kBudgetFail : kOk;
}

// -- calibrate ----------------------------------------------------------------

struct CalibrateArgs {
    double target_p90_ns = 0.0;
    double distance_m = 0.0;
    int scs = 15;
    std::uint64_t seed = 42;
    std::size_t trials = kDefaultTrials;
    double pathloss_exponent = 3.0;
    double lo = -40.0;
    double hi = 40.0;
    double tolerance = 0.05;
    std::string profile = "TDL-C";
    double delay_spread_ns = 300.0;
    std::string out_file = "calibration.json";
    CommonOpts common;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
    CalibrationRequest req;
    req.target_p90_ns = a.target_p90_ns;
    req.range_m = a.distance_m;
    req.scs_khz = a.scs;
    req.master_seed = a.seed;
    req.link.pathloss_exponent = a.pathloss_exponent;
    req.lo_snr_db = a.lo;
    req.hi_snr_db = a.hi;
    req.rel_tolerance = a.tolerance;
    req.table.n_trials = a.trials;
    req.table.workers = resolve_workers(a.common.workers);
    req.table.profile_name = a.profile;
    req.table.delay_spread_ns = a.delay_spread_ns;

    const auto res = calibrate(req);
    json doc = calibration_json(req, res);
    doc["schema"] = "otasync.calibration/1";
    json config = doc["target"];
    config["pathloss_exponent"] = a.pathloss_exponent;
    doc["provenance"] = provenance(content_hash(config), a.seed);
    doc["run_info"] = run_info(req.table.workers);
    write_json(a.out_file, doc);

    out << "anchor SNR at 1 km: " << res.anchor_snr_db << " dB -> p90 " << fmt_ns(res.achieved_p90_ns)
        << " (target " << fmt_ns(a.target_p90_ns) << ")\nwrote " << a.out_file << "\n";
    if (!res.converged) err << "warning: calibration did not converge: " << res.note << "\n";
    return kOk;
}

// -- plotdata -----------------------------------------------------------------

int cmd_plotdata(const std::string& scenario_file, const std::string& out_file, const CommonOpts& c,
                 std::ostream& out) {
    const auto s = load_scenario(scenario_file);
    const auto r = run_experiment(s.trial, s.trials, s.master_seed, resolve_workers(c.workers));
    write_text(out_file, cdf_csv(r.errors_ns, s.hash, s.master_seed));
    out << "wrote " << r.errors_ns.size() << " points to " << out_file << "\n";
    return kOk;
}

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--workers", c.workers, "Worker threads (default: $OTASYNC_WORKERS or all cores)");
    sub->add_option("--out-dir", c.out_dir, "Directory for output files");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"otasync: over-the-air timing acquisition and factory PTP distribution simulator"};
    app.name("otasync");
    app.require_subcommand(1);

    Table2Args t2;
    auto* table2 = app.add_subcommand("table2", "Run the SCS x range grid and write table2.csv / table2.json");
    table2->add_option("--seed", t2.seed, "Master seed")->capture_default_str();
    table2->add_option("--calibration", t2.calibration, "Calibration file written by 'calibrate'");
    table2->add_option("--anchor-snr-db", t2.anchor_snr_db, "Anchor SNR at 1 km (overrides the calibration file)");
    table2->add_option("--pathloss-exponent", t2.pathloss_exponent, "Log-distance exponent override");
    table2->add_option("--trials", t2.trials, "Trials per cell")->capture_default_str();
    table2->add_option("--profile", t2.profile, "Tap profile name")->capture_default_str();
    table2->add_option("--delay-spread-ns", t2.delay_spread_ns, "Delay spread")->capture_default_str();
    add_common(table2, t2.common);

    std::string exp_scenario, exp_errors;
    CommonOpts exp_common;
    auto* experiment = app.add_subcommand("experiment", "Run one scenario and write experiment.json");
    experiment->add_option("--scenario", exp_scenario, "Scenario JSON file")->required();
    experiment->add_option("--errors-csv", exp_errors, "Also write per-trial errors (sorted, with CDF)");
    add_common(experiment, exp_common);

    std::string dist_scenario;
    bool strict = false;
    CommonOpts dist_common;
    auto* distribute = app.add_subcommand("distribute", "Simulate factory distribution and judge the budget");
    distribute->add_option("--scenario", dist_scenario, "Scenario JSON file")->required();
    distribute->add_flag("--strict", strict, "Exit with status 3 when the budget verdict is FAIL");
    add_common(distribute, dist_common);

    CalibrateArgs cal;
    auto* calibrate_cmd = app.add_subcommand("calibrate", "Bisect the 1 km anchor SNR to hit a target p90");
    calibrate_cmd->add_option("--target-p90-ns", cal.target_p90_ns, "Target p90 timing error")->required();
    calibrate_cmd->add_option("--distance-m", cal.distance_m, "Ground range of the target cell")->required();
    calibrate_cmd->add_option("--scs", cal.scs, "Subcarrier spacing in kHz")->capture_default_str();
    calibrate_cmd->add_option("--seed", cal.seed, "Master seed")->capture_default_str();
    calibrate_cmd->add_option("--trials", cal.trials, "Trials per evaluation")->capture_default_str();
    calibrate_cmd->add_option("--pathloss-exponent", cal.pathloss_exponent)->capture_default_str();
    calibrate_cmd->add_option("--lo-snr-db", cal.lo, "Lower bracket")->capture_default_str();
    calibrate_cmd->add_option("--hi-snr-db", cal.hi, "Upper bracket")->capture_default_str();
    calibrate_cmd->add_option("--tolerance", cal.tolerance, "Relative tolerance on p90")->capture_default_str();
    calibrate_cmd->add_option("--profile", cal.profile)->capture_default_str();
    calibrate_cmd->add_option("--delay-spread-ns", cal.delay_spread_ns)->capture_default_str();
    calibrate_cmd->add_option("--out", cal.out_file, "Calibration file to write")->capture_default_str();
    calibrate_cmd->add_option("--workers", cal.common.workers);

    std::string plot_scenario, plot_out = "cdf.csv";
    CommonOpts plot_common;
    auto* plotdata = app.add_subcommand("plotdata", "Per-trial error CDF of a scenario as CSV");
    plotdata->add_option("--scenario", plot_scenario, "Scenario JSON file")->required();
    plotdata->add_option("--out", plot_out, "CSV file to write")->capture_default_str();
    plotdata->add_option("--workers", plot_common.workers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    try {
        if (*table2) return cmd_table2(t2, out);
        if (*experiment) return cmd_experiment(exp_scenario, exp_errors, exp_common, out);
        if (*distribute) return cmd_distribute(dist_scenario, strict, dist_common, out);
        if (*calibrate_cmd) return cmd_calibrate(cal, out, err);
        if (*plotdata) return cmd_plotdata(plot_scenario, plot_out, plot_common, out);
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return kScenarioInvalid;
    } catch (const ProfileError& e) {
        err << "error: " << e.what() << "\n";
        return kScenarioInvalid;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kScenarioInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    err << app.help();
    return kUsage;
}

}  // namespace otasync::cli
