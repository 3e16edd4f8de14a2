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

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace otasync {

/// Raised for any precondition violation on public inputs.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kSpeedOfLight = 299'792'458.0;

/** OFDM sampling parameters derived from the subcarrier spacing.
 *
 * The FFT size is fixed at 4096 and the normal cyclic prefix at 288 samples,
 * so the sample rate scales with the spacing and the CP duration shrinks as
 * the spacing grows.
 */
struct Numerology {
    int scs_khz = 15;
    int nfft = 4096;
    int cp_samples = 288;

    /// Accepts 15, 30 or 60 kHz.
    static Numerology from_scs(int scs_khz);

    double sample_rate_hz() const { return scs_khz * 1000.0 * nfft; }
    double sample_period_ns() const { return 1e9 / sample_rate_hz(); }
    double cp_duration_ns() const { return cp_samples * sample_period_ns(); }
    double symbol_length() const { return nfft + cp_samples; }
};

bool is_supported_scs(int scs_khz);

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Complex baseband samples at a fixed rate.
struct Waveform {
    cvec samples;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return samples.size(); }
    double energy() const;
    double mean_power() const;
    /// Throws InvalidArgument unless nonempty, finite, and the rate is positive.
    void validate(const char* what = "waveform") const;
};

}  // namespace otasync
