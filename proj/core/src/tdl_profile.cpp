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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "otasync/channel.hpp"

namespace otasync {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string file_stem_for(const std::string& name) {
    std::string stem;
    for (char c : name) {
        if (c == '-' || c == ' ') {
            stem.push_back('_');
        } else {
            stem.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return stem;
}

}  // namespace

std::vector<double> TapProfile::normalized_powers() const {
    std::vector<double> p(taps.size());
    std::transform(taps.begin(), taps.end(), p.begin(),
                   [](const ProfileTap& t) { return std::pow(10.0, t.power_db / 10.0); });
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= total;
    return p;
}

double TapProfile::max_delay_ns() const {
    double m = 0.0;
    for (const auto& t : taps) m = std::max(m, t.normalized_delay);
    return m * delay_spread_ns;
}

void TapProfile::validate() const {
    if (taps.empty()) throw ProfileError("profile '" + name + "': no taps");
    if (!(delay_spread_ns >= 0.0) || !std::isfinite(delay_spread_ns)) {
        throw ProfileError("profile '" + name + "': delay spread must be nonnegative");
    }
    if (taps.front().normalized_delay != 0.0) {
        throw ProfileError("profile '" + name + "': first tap delay must be 0");
    }
    for (std::size_t i = 0; i < taps.size(); ++i) {
        if (!std::isfinite(taps[i].normalized_delay) || !std::isfinite(taps[i].power_db) ||
            taps[i].normalized_delay < 0.0) {
            throw ProfileError("profile '" + name + "': bad tap " + std::to_string(i));
        }
        if (i > 0 && taps[i].normalized_delay < taps[i - 1].normalized_delay) {
            throw ProfileError("profile '" + name + "': delays not sorted");
        }
    }
}

TapProfile parse_tap_profile(std::istream& in, double delay_spread_ns) {
    TapProfile profile;
    profile.delay_spread_ns = delay_spread_ns;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto body = trim(line.substr(1));
            if (body.rfind("name:", 0) == 0) profile.name = trim(body.substr(5));
            if (body.rfind("source:", 0) == 0) profile.source = trim(body.substr(7));
            continue;
        }
        std::istringstream row(line);
        ProfileTap tap;
        std::string extra;
        if (!(row >> tap.normalized_delay >> tap.power_db) || (row >> extra)) {
            throw ProfileError("profile line " + std::to_string(line_no) + ": expected '<delay> <power_db>'");
        }
        profile.taps.push_back(tap);
    }
    if (profile.name.empty()) throw ProfileError("profile: missing '# name:' header");

    std::stable_sort(profile.taps.begin(), profile.taps.end(),
                     [](const ProfileTap& a, const ProfileTap& b) {
                         return a.normalized_delay < b.normalized_delay;
                     });
    profile.validate();
    return profile;
}

TapProfile load_tap_profile_file(const std::filesystem::path& file, double delay_spread_ns) {
    std::ifstream in(file);
    if (!in) throw ProfileError("cannot open profile file " + file.string());
    return parse_tap_profile(in, delay_spread_ns);
}

std::filesystem::path profile_directory() {
    if (const char* env = std::getenv("OTASYNC_PROFILE_DIR"); env && *env) return env;
    const std::filesystem::path installed = OTASYNC_PROFILE_INSTALL_DIR;
    std::error_code ec;
    if (std::filesystem::is_directory(installed, ec)) return installed;
    return OTASYNC_PROFILE_BUILD_DIR;
}

std::vector<std::string> bundled_profiles() {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(profile_directory(), ec)) {
        if (entry.path().extension() != ".txt") continue;
        try {
            names.push_back(load_tap_profile_file(entry.path(), 0.0).name);
        } catch (const ProfileError&) {
            // not a profile
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

TapProfile load_tdl_profile(const std::string& name, double delay_spread_ns) {
    const bool plain_name = std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ' ';
    });
    if (name.empty() || !plain_name) throw ProfileError("unknown tap profile '" + name + "'");
    const auto file = profile_directory() / (file_stem_for(name) + ".txt");
    std::error_code ec;
    if (!std::filesystem::is_regular_file(file, ec)) {
        throw ProfileError("unknown tap profile '" + name + "'");
    }
    auto profile = load_tap_profile_file(file, delay_spread_ns);
    if (file_stem_for(profile.name) != file_stem_for(name)) {
        throw ProfileError("profile file " + file.string() + " declares name '" + profile.name +
                           "', expected '" + name + "'");
    }
    return profile;
}

TapProfile single_tap_profile() {
    TapProfile p;
    p.name = "FLAT";
    p.source = "single unit-power tap";
    p.taps = {ProfileTap{0.0, 0.0}};
    p.delay_spread_ns = 0.0;
    return p;
}

}  // namespace otasync
