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

#include "otasync/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "otasync/fft.hpp"
#include "otasync/rng.hpp"

namespace otasync {
namespace {

constexpr std::size_t kDelayGuardSamples = 64;
// Phasor recurrences are re-anchored with an exact exp() this often.
constexpr std::size_t kReanchorEvery = 64;

cplx unit_phasor(double phase) { return {std::cos(phase), std::sin(phase)}; }

}  // namespace

double ChannelRealization::total_power() const {
    double p = 0.0;
    for (const auto& t : taps) p += std::norm(t.gain);
    return p;
}

double ChannelRealization::max_delay_s() const {
    double m = 0.0;
    for (const auto& t : taps) m = std::max(m, t.delay_s);
    return m;
}

ChannelRealization realize(const TapProfile& profile, std::uint64_t seed) {
    profile.validate();
    const auto powers = profile.normalized_powers();

    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    ChannelRealization ch;
    ch.taps.reserve(profile.taps.size());
    for (std::size_t k = 0; k < profile.taps.size(); ++k) {
        const double sigma = std::sqrt(powers[k] / 2.0);
        const double re = normal(rng);
        const double im = normal(rng);
        ch.taps.push_back({profile.delay_ns(k) * 1e-9, cplx{sigma * re, sigma * im}});
    }
    return ch;
}

double propagation_delay_s(double distance_m) {
    if (!(distance_m >= 0.0) || !std::isfinite(distance_m)) {
        throw InvalidArgument("distance must be a finite nonnegative value");
    }
    return distance_m / kSpeedOfLight;
}

Waveform apply(const Waveform& wf, const ChannelRealization& ch, double extra_delay_s) {
    wf.validate("channel input");
    if (!(extra_delay_s >= 0.0) || !std::isfinite(extra_delay_s)) {
        throw InvalidArgument("extra delay must be a finite nonnegative value");
    }
    if (ch.taps.empty()) throw InvalidArgument("channel realization has no taps");
    for (const auto& t : ch.taps) {
        if (!(t.delay_s >= 0.0)) throw InvalidArgument("tap delay must be nonnegative");
    }

    const double fs = wf.sample_rate_hz;
    const double max_delay_samples = (extra_delay_s + ch.max_delay_s()) * fs;
    const std::size_t needed =
        wf.size() + static_cast<std::size_t>(std::ceil(max_delay_samples)) + kDelayGuardSamples;
    const std::size_t m = fft::next_pow2(needed);

    cvec spectrum(m, cplx{0.0, 0.0});
    std::copy(wf.samples.begin(), wf.samples.end(), spectrum.begin());
    fft::forward(spectrum);

    // H[b] = sum_k g_k exp(-j 2 pi f_b tau_k), with f_b the signed bin
    // frequency. Each tap advances its own phasor by a fixed rotation per bin
    // (re-anchored with an exact exp() every kReanchorEvery bins); the gain is
    // folded into the phasor. Plain real arithmetic: std::complex operator*
    // carries NaN recovery that dominates this loop.
    const std::size_t k_taps = ch.taps.size();
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> step(k_taps), rot_re(k_taps), rot_im(k_taps), ph_re(k_taps), ph_im(k_taps);
    for (std::size_t k = 0; k < k_taps; ++k) {
        const double delay_samples = (extra_delay_s + ch.taps[k].delay_s) * fs;
        step[k] = -two_pi * delay_samples / static_cast<double>(m);
        rot_re[k] = std::cos(step[k]);
        rot_im[k] = std::sin(step[k]);
    }
    for (std::size_t block = 0; block < m; block += kReanchorEvery) {
        const double signed_bin = block < m / 2 ? static_cast<double>(block)
                                                : static_cast<double>(block) - static_cast<double>(m);
        for (std::size_t k = 0; k < k_taps; ++k) {
            const cplx v = ch.taps[k].gain * unit_phasor(step[k] * signed_bin);
            ph_re[k] = v.real();
            ph_im[k] = v.imag();
        }
        const std::size_t block_end = std::min(m, block + kReanchorEvery);
        for (std::size_t b = block; b < block_end; ++b) {
            double h_re = 0.0, h_im = 0.0;
            for (std::size_t k = 0; k < k_taps; ++k) {
                h_re += ph_re[k];
                h_im += ph_im[k];
                const double next_re = ph_re[k] * rot_re[k] - ph_im[k] * rot_im[k];
                ph_im[k] = ph_re[k] * rot_im[k] + ph_im[k] * rot_re[k];
                ph_re[k] = next_re;
            }
            const double a = spectrum[b].real(), c = spectrum[b].imag();
            spectrum[b] = cplx{a * h_re - c * h_im, a * h_im + c * h_re};
        }
    }
    fft::inverse(spectrum);

    return Waveform{std::move(spectrum), fs};
}

double support_power(const Waveform& wf) {
    if (wf.samples.empty()) return 0.0;
    double peak = 0.0;
    for (const auto& s : wf.samples) peak = std::max(peak, std::norm(s));
    if (peak == 0.0) return 0.0;
    const double floor = peak * 1e-12;
    std::size_t first = 0;
    while (std::norm(wf.samples[first]) <= floor) ++first;
    std::size_t last = wf.samples.size() - 1;
    while (std::norm(wf.samples[last]) <= floor) --last;
    double e = 0.0;
    for (std::size_t i = first; i <= last; ++i) e += std::norm(wf.samples[i]);
    return e / static_cast<double>(last - first + 1);
}

Waveform add_awgn(const Waveform& wf, double snr_db, std::uint64_t seed,
                  std::optional<double> reference_power) {
    wf.validate("noise input");
    if (!std::isfinite(snr_db)) throw InvalidArgument("snr_db must be finite");
    const double signal_power = reference_power ? *reference_power : support_power(wf);
    if (!(signal_power >= 0.0)) throw InvalidArgument("reference power must be nonnegative");

    const double noise_power = signal_power / std::pow(10.0, snr_db / 10.0);
    const double sigma = std::sqrt(noise_power / 2.0);

    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Waveform out = wf;
    for (auto& s : out.samples) {
        const double re = normal(rng);
        const double im = normal(rng);
        s += cplx{sigma * re, sigma * im};
    }
    return out;
}

void LinkBudgetParams::validate() const {
    if (!(carrier_hz > 0.0)) throw InvalidArgument("link budget: carrier_hz must be positive");
    if (!(gnb_height_m > 0.0)) throw InvalidArgument("link budget: gnb_height_m must be positive");
    if (!(ue_height_m > 0.0)) throw InvalidArgument("link budget: ue_height_m must be positive");
    if (!(bandwidth_hz > 0.0)) throw InvalidArgument("link budget: bandwidth_hz must be positive");
    if (!std::isfinite(pathloss_exponent)) {
        throw InvalidArgument("link budget: pathloss_exponent must be finite");
    }
    if (reference_snr_db_at_1km && !std::isfinite(*reference_snr_db_at_1km)) {
        throw InvalidArgument("link budget: reference_snr_db_at_1km must be finite");
    }
}

double free_space_loss_db(double distance_m, double carrier_hz) {
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * carrier_hz / kSpeedOfLight);
}

double snr_at_distance(const LinkBudgetParams& params, double distance_m) {
    params.validate();
    if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
        throw InvalidArgument("distance must be positive");
    }
    double anchor = 0.0;
    if (params.reference_snr_db_at_1km) {
        anchor = *params.reference_snr_db_at_1km;
    } else {
        const double noise_dbm = -174.0 + 10.0 * std::log10(params.bandwidth_hz) + params.noise_figure_db;
        anchor = params.tx_power_dbm - free_space_loss_db(kReferenceDistanceM, params.carrier_hz) - noise_dbm;
    }
    return anchor - 10.0 * params.pathloss_exponent * std::log10(distance_m / kReferenceDistanceM);
}

double snr_for_numerology(const LinkBudgetParams& params, double distance_m, const Numerology& num) {
    return snr_at_distance(params, distance_m) - 10.0 * std::log10(num.sample_rate_hz() / params.bandwidth_hz);
}

double slant_range_m(const LinkBudgetParams& params, double ground_range_m) {
    const double dh = params.gnb_height_m - params.ue_height_m;
    return std::sqrt(ground_range_m * ground_range_m + dh * dh);
}

}  // namespace otasync
