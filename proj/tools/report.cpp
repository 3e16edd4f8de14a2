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

#include "report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "otasync/rng.hpp"

namespace otasync::cli {

using nlohmann::json;

namespace {

std::string fixed1(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

json provenance(const std::string& scenario_hash, std::uint64_t master_seed) {
    return {{"scenario_hash", scenario_hash}, {"master_seed", master_seed}};
}

json run_info(unsigned workers) {
    return {{"timestamp", utc_now()}, {"workers", workers}, {"version", kToolVersion}};
}

json experiment_json(const ExperimentResult& r) {
    return {{"n_trials", r.n_trials},
            {"p50_ns", r.p50_ns},
            {"p90_ns", r.p90_ns},
            {"failures", r.failures},
            {"failure_rate", r.failure_rate},
            {"failure_threshold_ns", r.failure_threshold_ns},
            {"snr_db", r.snr_db},
            {"verdict", to_string(r.verdict)}};
}

std::string table2_csv(const Table2Report& report, const std::string& scenario_hash) {
    std::ostringstream os;
    os << "# scenario_hash=" << scenario_hash << " master_seed=" << report.master_seed
       << " trials_per_cell=" << report.n_trials << "\n";
    os << "scs_khz";
    for (double range : kTable2RangesM) os << ",p90_" << static_cast<int>(range / 1000.0) << "km_ns";
    os << "\n";
    for (int scs : kTable2Scs) {
        os << scs;
        for (double range : kTable2RangesM) {
            const auto& r = report.cell(scs, range).result;
            os << "," << (r.verdict == Verdict::synchronization_failure ? "synchronization_failure" : fixed1(r.p90_ns));
        }
        os << "\n";
    }
    return os.str();
}

json table2_json(const Table2Report& report) {
    json cells = json::array();
    for (const auto& c : report.cells) {
        json cell = experiment_json(c.result);
        cell["scs_khz"] = c.scs_khz;
        cell["range_m"] = c.range_m;
        cells.push_back(cell);
    }
    return {{"cells", cells}};
}

json table2_config_json(const Table2Report& report, const Table2Options& opts) {
    json policy{{"experiment_failure_fraction", opts.policy.experiment_failure_fraction}};
    policy["max_abs_error_ns"] = opts.policy.max_abs_error_ns ? json(*opts.policy.max_abs_error_ns) : json(nullptr);
    return {{"command", "table2"},
            {"link_budget", link_budget_to_json(report.link)},
            {"profile", report.profile_name},
            {"delay_spread_ns", report.delay_spread_ns},
            {"trials", report.n_trials},
            {"n_id2", opts.n_id2},
            {"failure_policy", policy},
            {"master_seed", report.master_seed}};
}

json calibration_json(const CalibrationRequest& req, const CalibrationResult& res) {
    LinkBudgetParams link = req.link;
    link.reference_snr_db_at_1km = res.anchor_snr_db;
    json history = json::array();
    for (const auto& h : res.history) history.push_back({{"anchor_snr_db", h.anchor_snr_db}, {"p90_ns", h.p90_ns}});
    json target{{"p90_ns", req.target_p90_ns},
                {"range_m", req.range_m},
                {"scs_khz", req.scs_khz},
                {"profile", req.table.profile_name},
                {"delay_spread_ns", req.table.delay_spread_ns},
                {"trials", req.table.n_trials},
                {"rel_tolerance", req.rel_tolerance},
                {"bracket_snr_db", {req.lo_snr_db, req.hi_snr_db}}};
    return {{"calibration", link_budget_to_json(link)},
            {"target", target},
            {"achieved_p90_ns", res.achieved_p90_ns},
            {"converged", res.converged},
            {"note", res.note},
            {"history", history}};
}

std::string cdf_csv(const std::vector<double>& errors_ns, const std::string& scenario_hash,
                    std::uint64_t master_seed) {
    std::vector<double> sorted = errors_ns;
    std::sort(sorted.begin(), sorted.end());
    std::ostringstream os;
    os << "# scenario_hash=" << scenario_hash << " master_seed=" << master_seed << "\n";
    os << "error_ns,cdf\n";
    char buf[64];
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", sorted[i],
                      static_cast<double>(i + 1) / static_cast<double>(sorted.size()));
        os << buf;
    }
    return os.str();
}

std::vector<NodeDistributionStats> distribution_statistics(const Scenario& s) {
    if (!s.topology) throw ScenarioError("topology", "required for distribution");
    const auto& topo = *s.topology;
    const std::size_t n = topo.nodes.size();
    std::vector<std::vector<double>> samples(n);
    for (std::size_t r = 0; r < s.distribution_runs; ++r) {
        const auto seed = derive_seed(s.master_seed, r);
        const auto errs = topo.mode == ptp::DistributionMode::in_band
                              ? ptp::distribute_in_band(topo, s.hop, seed)
                              : ptp::distribute_out_of_band(topo, s.out_of_band, seed);
        for (std::size_t i = 0; i < n; ++i) samples[i].push_back(errs[i]);
    }

    std::vector<std::size_t> hop(n, 1);
    if (topo.mode == ptp::DistributionMode::in_band) {
        const auto order = topo.chain_indices();
        for (std::size_t k = 0; k < order.size(); ++k) hop[order[k]] = k + 1;
    }

    std::vector<NodeDistributionStats> stats;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = samples[i];
        NodeDistributionStats st;
        st.id = topo.nodes[i].id;
        st.hop = hop[i];
        double sum = 0.0, sq = 0.0;
        std::vector<double> abs_v;
        for (double e : v) {
            sum += e;
            abs_v.push_back(std::abs(e));
        }
        st.mean_ns = sum / double(v.size());
        for (double e : v) sq += (e - st.mean_ns) * (e - st.mean_ns);
        st.std_ns = v.size() > 1 ? std::sqrt(sq / double(v.size() - 1)) : 0.0;
        st.p90_abs_ns = nearest_rank_percentile(abs_v, 0.9);
        st.max_abs_ns = *std::max_element(abs_v.begin(), abs_v.end());
        stats.push_back(st);
    }
    return stats;
}

DistributionReport build_distribution_report(const Scenario& s, double ota_ns) {
    DistributionReport r;
    r.nodes = distribution_statistics(s);
    r.ota_ns = ota_ns;
    budget::E2EError e;
    e.ota_ns = ota_ns;
    e.gateway_internal_ns = s.gateway_internal_ns;
    e.combination = s.combination;
    for (const auto& n : r.nodes) e.distribution_ns.push_back(n.p90_abs_ns);
    r.totals_ns = budget::end_to_end_error(e);
    r.requirement = budget::requirement(s.budget_level);
    r.verdict = budget::evaluate(r.totals_ns, r.requirement, *s.topology);
    return r;
}

json distribution_json(const Scenario& s, const DistributionReport& r) {
    json nodes = json::array();
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const auto& n = r.nodes[i];
        nodes.push_back({{"id", n.id},
                         {"hop", n.hop},
                         {"mean_ns", n.mean_ns},
                         {"std_ns", n.std_ns},
                         {"p90_abs_ns", n.p90_abs_ns},
                         {"max_abs_ns", n.max_abs_ns},
                         {"total_ns", r.totals_ns[i]},
                         {"margin_ns", r.verdict.margins_ns[i]}});
    }
    return {{"mode", ptp::to_string(s.topology->mode)},
            {"runs", s.distribution_runs},
            {"ota_ns", r.ota_ns},
            {"gateway_internal_ns", s.gateway_internal_ns},
            {"combination", budget::to_string(s.combination)},
            {"nodes", nodes},
            {"requirement",
             {{"level", r.requirement.level},
              {"budget_ns", r.requirement.budget_ns},
              {"max_devices", r.requirement.max_devices},
              {"service_area", r.requirement.service_area_descriptor}}},
            {"verdict",
             {{"pass", r.verdict.pass},
              {"binding", budget::to_string(r.verdict.binding)},
              {"max_total_ns", r.verdict.max_total_ns},
              {"node_count", r.verdict.node_count},
              {"service_area_ok", r.verdict.service_area_ok}}}};
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << text;
}

void write_json(const std::filesystem::path& file, const json& j) { write_text(file, j.dump(2) + "\n"); }

}  // namespace otasync::cli
