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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "otasync/numerology.hpp"

namespace otasync {

// ---------------------------------------------------------------------------
// Tapped-delay-line profiles
// ---------------------------------------------------------------------------

struct ProfileTap {
    double normalized_delay = 0.0;
    double power_db = 0.0;
};

/** A tapped-delay-line power-delay profile scaled by a delay spread.
 *
 * Taps are kept sorted by normalized delay; the first one sits at zero.
 */
struct TapProfile {
    std::string name;
    std::string source;
    std::vector<ProfileTap> taps;
    double delay_spread_ns = 300.0;

    /// Linear tap powers normalized to sum to one.
    std::vector<double> normalized_powers() const;
    double delay_ns(std::size_t tap) const { return taps.at(tap).normalized_delay * delay_spread_ns; }
    double max_delay_ns() const;
    void validate() const;
};

class ProfileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** Parses the plain-text profile format:
 *
 *     # name: TDL-C
 *     # source: <table reference>
 *     <normalized_delay> <power_db>
 *     ...
 *
 * Blank lines and other '#' lines are ignored. Rows are sorted by delay
 * (stable) before being returned.
 */
TapProfile parse_tap_profile(std::istream& in, double delay_spread_ns);

TapProfile load_tap_profile_file(const std::filesystem::path& file, double delay_spread_ns);

/// Resolves a bundled profile by name ("TDL-C" -> tdl_c.txt) in the profile
/// directory and scales it. Throws ProfileError for unknown names.
TapProfile load_tdl_profile(const std::string& name, double delay_spread_ns = 300.0);

/// Directory searched by load_tdl_profile: $OTASYNC_PROFILE_DIR, else the
/// installed data dir, else the source tree.
std::filesystem::path profile_directory();

/// Names of the bundled profiles found in profile_directory().
std::vector<std::string> bundled_profiles();

/// One-tap, unit-power, zero-delay profile.
TapProfile single_tap_profile();

// ---------------------------------------------------------------------------
// Realization and application
// ---------------------------------------------------------------------------

struct ChannelTap {
    double delay_s = 0.0;
    cplx gain{1.0, 0.0};
};

/// Resolved multipath for one trial (block fading, no Doppler).
struct ChannelRealization {
    std::vector<ChannelTap> taps;

    double total_power() const;
    double max_delay_s() const;

    static ChannelRealization identity() { return {{ChannelTap{}}}; }
};

/// Draws each tap gain as CN(0, p_k) with p_k the tap's normalized power.
ChannelRealization realize(const TapProfile& profile, std::uint64_t seed);

double propagation_delay_s(double distance_m);

/** Sum over taps of gain_k * wf delayed by (extra_delay_s + delay_k).
 *
 * Delays are applied as a phase ramp in the frequency domain, so fractional
 * sample delays are exact for the circular extension. The output is
 * zero-padded to a power-of-two length that holds the largest delay plus a
 * guard, and the full circular buffer is returned so no energy is lost.
 */
Waveform apply(const Waveform& wf, const ChannelRealization& ch, double extra_delay_s);

/** Adds circularly-symmetric complex Gaussian noise at the given SNR.
 *
 * Without a reference, signal power is measured over the waveform's support:
 * the span between the first and last sample whose power exceeds 1e-12 of
 * the peak. With a reference power the noise variance is
 * reference_power / 10^(snr_db/10).
 */
Waveform add_awgn(const Waveform& wf, double snr_db, std::uint64_t seed,
                  std::optional<double> reference_power = std::nullopt);

/// Mean power over the support defined for add_awgn.
double support_power(const Waveform& wf);

// ---------------------------------------------------------------------------
// Distance to SNR
// ---------------------------------------------------------------------------

struct LinkBudgetParams {
    double carrier_hz = 6e9;
    double gnb_height_m = 6.0;
    double ue_height_m = 1.5;
    double tx_power_dbm = 10.0;
    double noise_figure_db = 7.0;
    /// Noise bandwidth at which SNR values are quoted; 61.44 MHz is the
    /// full sampled band at 15 kHz.
    double bandwidth_hz = 61.44e6;
    double pathloss_exponent = 3.0;
    std::optional<double> reference_snr_db_at_1km;

    void validate() const;
};

inline constexpr double kReferenceDistanceM = 1000.0;

double free_space_loss_db(double distance_m, double carrier_hz);

/// snr(d) = snr(1 km) - 10 n log10(d / 1 km). The anchor is either the
/// calibration value or tx power minus free-space loss minus thermal noise.
double snr_at_distance(const LinkBudgetParams& params, double distance_m);

/// snr_at_distance rescaled from params.bandwidth_hz to the numerology's
/// sample rate (fixed noise density, wider band -> more noise per sample).
double snr_for_numerology(const LinkBudgetParams& params, double distance_m,
                          const Numerology& num);

/// Direct path length from ground range and antenna heights.
double slant_range_m(const LinkBudgetParams& params, double ground_range_m);

}  // namespace otasync
