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

#include "scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace otasync::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

const json* find(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ScenarioError(path.empty() ? "<root>" : path, "expected an object");
    return j;
}

double get_number(const json& obj, const std::string& key, const std::string& path, double def) {
    const json* v = find(obj, key);
    if (!v) return def;
    if (!v->is_number()) throw ScenarioError(join(path, key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ScenarioError(join(path, key), "must be finite");
    return d;
}

std::optional<double> get_optional_number(const json& obj, const std::string& key, const std::string& path) {
    if (!find(obj, key)) return std::nullopt;
    return get_number(obj, key, path, 0.0);
}

long long get_integer(const json& obj, const std::string& key, const std::string& path, long long def) {
    const json* v = find(obj, key);
    if (!v) return def;
    if (!v->is_number_integer()) throw ScenarioError(join(path, key), "expected an integer");
    return v->get<long long>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path, const std::string& def) {
    const json* v = find(obj, key);
    if (!v) return def;
    if (!v->is_string()) throw ScenarioError(join(path, key), "expected a string");
    return v->get<std::string>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& path, bool def) {
    const json* v = find(obj, key);
    if (!v) return def;
    if (!v->is_boolean()) throw ScenarioError(join(path, key), "expected true or false");
    return v->get<bool>();
}

void require_positive(double v, const std::string& field) {
    if (!(v > 0.0)) throw ScenarioError(field, "must be positive");
}

void require_nonneg(double v, const std::string& field) {
    if (!(v >= 0.0)) throw ScenarioError(field, "must be >= 0");
}

ptp::SimClock clock_from_json(const json& j, const std::string& path) {
    require_object(j, path);
    ptp::SimClock c;
    c.offset_ns = get_number(j, "offset_ns", path, 0.0);
    c.drift_ppb = get_number(j, "drift_ppb", path, 0.0);
    c.granularity_ns = get_number(j, "granularity_ns", path, 0.0);
    c.jitter_sigma_ns = get_number(j, "jitter_sigma_ns", path, 0.0);
    require_nonneg(c.granularity_ns, join(path, "granularity_ns"));
    require_nonneg(c.jitter_sigma_ns, join(path, "jitter_sigma_ns"));
    return c;
}

ptp::Position position_from_json(const json& j, const std::string& path) {
    require_object(j, path);
    return {get_number(j, "x", path, 0.0), get_number(j, "y", path, 0.0)};
}

ptp::FactoryTopology topology_from_json(const json& j, const std::string& path) {
    require_object(j, path);
    ptp::FactoryTopology t;
    const auto mode = get_string(j, "mode", path, "in_band");
    if (mode == "in_band") {
        t.mode = ptp::DistributionMode::in_band;
    } else if (mode == "out_of_band") {
        t.mode = ptp::DistributionMode::out_of_band;
    } else {
        throw ScenarioError(join(path, "mode"), "expected 'in_band' or 'out_of_band'");
    }
    if (const json* g = find(j, "gateway")) t.gateway = position_from_json(*g, join(path, "gateway"));

    const json* nodes = find(j, "nodes");
    const json* gen = find(j, "generate");
    if (nodes && gen) throw ScenarioError(join(path, "generate"), "give either 'nodes' or 'generate', not both");
    if (nodes) {
        if (!nodes->is_array()) throw ScenarioError(join(path, "nodes"), "expected an array");
        for (std::size_t i = 0; i < nodes->size(); ++i) {
            const auto npath = join(path, "nodes[" + std::to_string(i) + "]");
            const auto& n = require_object((*nodes)[i], npath);
            ptp::FactoryNode node;
            node.id = get_string(n, "id", npath, "");
            if (node.id.empty()) throw ScenarioError(join(npath, "id"), "required");
            node.position = {get_number(n, "x", npath, 0.0), get_number(n, "y", npath, 0.0)};
            t.nodes.push_back(node);
        }
    } else if (gen) {
        const auto gpath = join(path, "generate");
        require_object(*gen, gpath);
        const auto count = get_integer(*gen, "count", gpath, 0);
        if (count < 1) throw ScenarioError(join(gpath, "count"), "must be >= 1");
        const double spacing = get_number(*gen, "spacing_m", gpath, 1.0);
        require_nonneg(spacing, join(gpath, "spacing_m"));
        const auto layout = get_string(*gen, "layout", gpath, "line");
        if (layout != "line" && layout != "grid") throw ScenarioError(join(gpath, "layout"), "expected 'line' or 'grid'");
        const auto cols = layout == "grid" ? static_cast<long long>(std::ceil(std::sqrt(double(count)))) : count;
        for (long long i = 0; i < count; ++i) {
            char id[32];
            std::snprintf(id, sizeof id, "n%03lld", i + 1);
            t.nodes.push_back({id, {t.gateway.x + spacing * double(i % cols + 1), t.gateway.y + spacing * double(i / cols)}});
        }
    } else {
        throw ScenarioError(join(path, "nodes"), "required (or 'generate')");
    }

    if (const json* order = find(j, "chain_order")) {
        if (!order->is_array()) throw ScenarioError(join(path, "chain_order"), "expected an array of node ids");
        for (const auto& id : *order) {
            if (!id.is_string()) throw ScenarioError(join(path, "chain_order"), "expected an array of node ids");
            t.chain_order.push_back(id.get<std::string>());
        }
    }
    if (const json* area = find(j, "service_area")) {
        const auto apath = join(path, "service_area");
        require_object(*area, apath);
        t.service_width_m = get_number(*area, "width_m", apath, t.service_width_m);
        t.service_depth_m = get_number(*area, "depth_m", apath, t.service_depth_m);
    }
    try {
        t.validate();
    } catch (const InvalidArgument& e) {
        throw ScenarioError(path, e.what());
    }
    return t;
}

}  // namespace

std::string content_hash(const json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

LinkBudgetParams link_budget_from_json(const json& j, const std::string& path) {
    require_object(j, path);
    LinkBudgetParams p;
    p.carrier_hz = get_number(j, "carrier_hz", path, p.carrier_hz);
    p.gnb_height_m = get_number(j, "gnb_height_m", path, p.gnb_height_m);
    p.ue_height_m = get_number(j, "ue_height_m", path, p.ue_height_m);
    p.tx_power_dbm = get_number(j, "tx_power_dbm", path, p.tx_power_dbm);
    p.noise_figure_db = get_number(j, "noise_figure_db", path, p.noise_figure_db);
    p.bandwidth_hz = get_number(j, "bandwidth_hz", path, p.bandwidth_hz);
    p.pathloss_exponent = get_number(j, "pathloss_exponent", path, p.pathloss_exponent);
    p.reference_snr_db_at_1km = get_optional_number(j, "reference_snr_db_at_1km", path);
    require_positive(p.carrier_hz, join(path, "carrier_hz"));
    require_positive(p.gnb_height_m, join(path, "gnb_height_m"));
    require_positive(p.ue_height_m, join(path, "ue_height_m"));
    require_positive(p.bandwidth_hz, join(path, "bandwidth_hz"));
    require_nonneg(p.pathloss_exponent, join(path, "pathloss_exponent"));
    return p;
}

json link_budget_to_json(const LinkBudgetParams& p) {
    json j{{"carrier_hz", p.carrier_hz},
           {"gnb_height_m", p.gnb_height_m},
           {"ue_height_m", p.ue_height_m},
           {"tx_power_dbm", p.tx_power_dbm},
           {"noise_figure_db", p.noise_figure_db},
           {"bandwidth_hz", p.bandwidth_hz},
           {"pathloss_exponent", p.pathloss_exponent}};
    j["reference_snr_db_at_1km"] = p.reference_snr_db_at_1km ? json(*p.reference_snr_db_at_1km) : json(nullptr);
    return j;
}

LinkBudgetParams load_calibration(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ScenarioError("calibration_file", "cannot open " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ScenarioError("calibration_file", std::string("invalid JSON: ") + e.what());
    }
    const json* cal = j.is_object() ? find(j, "calibration") : nullptr;
    if (!cal) throw ScenarioError("calibration", "missing in " + file.string());
    auto p = link_budget_from_json(*cal, "calibration");
    if (!p.reference_snr_db_at_1km) throw ScenarioError("calibration.reference_snr_db_at_1km", "required");
    return p;
}

Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir) {
    require_object(j, "");
    Scenario s;
    s.raw = j;
    s.hash = content_hash(j);
    s.name = get_string(j, "name", "", "");

    const json* seed = find(j, "master_seed");
    if (!seed) throw ScenarioError("master_seed", "required");
    if (!seed->is_number_integer() || (!seed->is_number_unsigned() && seed->get<long long>() < 0)) {
        throw ScenarioError("master_seed", "expected a nonnegative integer");
    }
    s.master_seed = seed->get<std::uint64_t>();

    const auto trials = get_integer(j, "trials", "", static_cast<long long>(kDefaultTrials));
    if (trials < 1) throw ScenarioError("trials", "must be >= 1");
    s.trials = static_cast<std::size_t>(trials);

    // Radio link
    auto& t = s.trial;
    if (const json* num = find(j, "numerology")) {
        require_object(*num, "numerology");
        const auto scs = get_integer(*num, "scs_khz", "numerology", 15);
        if (!is_supported_scs(static_cast<int>(scs))) throw ScenarioError("numerology.scs_khz", "expected 15, 30 or 60");
        t.numerology = Numerology::from_scs(static_cast<int>(scs));
    }
    const auto n_id2 = get_integer(j, "n_id2", "", 0);
    if (n_id2 < 0 || n_id2 > 2) throw ScenarioError("n_id2", "expected 0, 1 or 2");
    t.n_id2 = static_cast<int>(n_id2);
    t.distance_m = get_number(j, "distance_m", "", 1000.0);
    require_positive(t.distance_m, "distance_m");

    if (const json* ch = find(j, "channel")) {
        require_object(*ch, "channel");
        const double spread = get_number(*ch, "delay_spread_ns", "channel", 300.0);
        require_nonneg(spread, "channel.delay_spread_ns");
        const auto file = get_string(*ch, "profile_file", "channel", "");
        const auto name = get_string(*ch, "profile", "channel", "TDL-C");
        try {
            if (!file.empty()) {
                auto path = std::filesystem::path(file);
                if (path.is_relative()) path = base_dir / path;
                t.profile = load_tap_profile_file(path, spread);
            } else {
                t.profile = load_tdl_profile(name, spread);
            }
        } catch (const ProfileError& e) {
            throw ScenarioError(file.empty() ? "channel.profile" : "channel.profile_file", e.what());
        }
    } else {
        t.profile = load_tdl_profile("TDL-C", 300.0);
    }

    const json* snr = find(j, "snr");
    if (!snr) throw ScenarioError("snr", "required ('snr_db', 'link_budget' or 'calibration_file')");
    require_object(*snr, "snr");
    const int forms = (find(*snr, "snr_db") ? 1 : 0) + (find(*snr, "link_budget") ? 1 : 0) +
                      (find(*snr, "calibration_file") ? 1 : 0);
    if (forms != 1) throw ScenarioError("snr", "give exactly one of 'snr_db', 'link_budget', 'calibration_file'");
    if (find(*snr, "snr_db")) {
        t.snr = get_number(*snr, "snr_db", "snr", 0.0);
    } else if (const json* lb = find(*snr, "link_budget")) {
        t.snr = link_budget_from_json(*lb, "snr.link_budget");
    } else {
        auto path = std::filesystem::path(get_string(*snr, "calibration_file", "snr", ""));
        if (path.is_relative()) path = base_dir / path;
        t.snr = load_calibration(path);
    }

    if (const json* pol = find(j, "failure_policy")) {
        require_object(*pol, "failure_policy");
        t.policy.max_abs_error_ns = get_optional_number(*pol, "max_abs_error_ns", "failure_policy");
        t.policy.experiment_failure_fraction =
            get_number(*pol, "experiment_failure_fraction", "failure_policy", t.policy.experiment_failure_fraction);
        if (t.policy.max_abs_error_ns) require_positive(*t.policy.max_abs_error_ns, "failure_policy.max_abs_error_ns");
        const double f = t.policy.experiment_failure_fraction;
        if (!(f > 0.0 && f < 1.0)) throw ScenarioError("failure_policy.experiment_failure_fraction", "must be in (0, 1)");
    }

    // Factory side
    if (const json* topo = find(j, "topology")) s.topology = topology_from_json(*topo, "topology");

    if (const json* p = find(j, "ptp")) {
        require_object(*p, "ptp");
        if (const json* c = find(*p, "stamp_clock")) {
            s.hop.stamp_clock = clock_from_json(*c, "ptp.stamp_clock");
            s.out_of_band.stamp_clock = s.hop.stamp_clock;
        }
        if (const json* l = find(*p, "link")) {
            require_object(*l, "ptp.link");
            s.hop.link.delay_ms_to_slave_ns = get_number(*l, "delay_ms_to_slave_ns", "ptp.link", 0.0);
            s.hop.link.delay_slave_to_ms_ns = get_number(*l, "delay_slave_to_ms_ns", "ptp.link", 0.0);
            s.hop.link.turnaround_ns = get_number(*l, "turnaround_ns", "ptp.link", s.hop.link.turnaround_ns);
            require_nonneg(s.hop.link.delay_ms_to_slave_ns, "ptp.link.delay_ms_to_slave_ns");
            require_nonneg(s.hop.link.delay_slave_to_ms_ns, "ptp.link.delay_slave_to_ms_ns");
            require_nonneg(s.hop.link.turnaround_ns, "ptp.link.turnaround_ns");
        }
        s.hop.initial_offset_spread_ns =
            get_number(*p, "initial_offset_spread_ns", "ptp", s.hop.initial_offset_spread_ns);
        require_nonneg(s.hop.initial_offset_spread_ns, "ptp.initial_offset_spread_ns");

        const auto comp = get_string(*p, "compensation", "ptp", "perfect");
        if (comp == "none") {
            s.out_of_band.compensation = ptp::Compensation::none;
        } else if (comp == "perfect") {
            s.out_of_band.compensation = ptp::Compensation::perfect;
        } else if (comp == "estimated") {
            s.out_of_band.compensation = ptp::Compensation::estimated;
        } else {
            throw ScenarioError("ptp.compensation", "expected 'none', 'perfect' or 'estimated'");
        }
        s.out_of_band.distance_bias_m = get_number(*p, "distance_bias_m", "ptp", 0.0);
        s.out_of_band.distance_error_sigma_m = get_number(*p, "distance_error_sigma_m", "ptp", 0.0);
        require_nonneg(s.out_of_band.distance_error_sigma_m, "ptp.distance_error_sigma_m");

        s.gateway_internal_ns = get_number(*p, "gateway_internal_ns", "ptp", 0.0);
        require_nonneg(s.gateway_internal_ns, "ptp.gateway_internal_ns");
        const auto runs = get_integer(*p, "runs", "ptp", 1000);
        if (runs < 1) throw ScenarioError("ptp.runs", "must be >= 1");
        s.distribution_runs = static_cast<std::size_t>(runs);
    }

    if (const json* b = find(j, "budget")) {
        require_object(*b, "budget");
        const auto level = get_integer(*b, "level", "budget", 1);
        if (level < 1 || level > 4) throw ScenarioError("budget.level", "expected 1, 2, 3 or 4");
        s.budget_level = static_cast<int>(level);
        try {
            s.combination = budget::combination_from_string(get_string(*b, "combination", "budget", "worst_case_sum"));
        } catch (const InvalidArgument&) {
            throw ScenarioError("budget.combination", "expected 'worst_case_sum' or 'root_sum_square'");
        }
    }

    if (const json* o = find(j, "ota")) {
        require_object(*o, "ota");
        s.ota.ota_ns = get_optional_number(*o, "ota_ns", "ota");
        s.ota.from_experiment = get_bool(*o, "from_experiment", "ota", false);
        if (s.ota.ota_ns && s.ota.from_experiment) throw ScenarioError("ota", "give either 'ota_ns' or 'from_experiment'");
        if (s.ota.ota_ns) require_nonneg(*s.ota.ota_ns, "ota.ota_ns");
    }

    try {
        t.validate();
    } catch (const InvalidArgument& e) {
        throw ScenarioError("<radio>", e.what());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ScenarioError("<file>", "cannot open " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ScenarioError("<file>", std::string("invalid JSON: ") + e.what());
    }
    return parse_scenario(j, file.parent_path());
}

}  // namespace otasync::cli
