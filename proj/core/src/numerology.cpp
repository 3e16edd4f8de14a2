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

#include "otasync/numerology.hpp"

#include <cmath>
#include <numeric>

namespace otasync {

bool is_supported_scs(int scs_khz) {
    return scs_khz == 15 || scs_khz == 30 || scs_khz == 60;
}

Numerology Numerology::from_scs(int scs_khz) {
    if (!is_supported_scs(scs_khz)) {
        throw InvalidArgument("unsupported subcarrier spacing " + std::to_string(scs_khz) +
                              " kHz (expected 15, 30 or 60)");
    }
    Numerology num;
    num.scs_khz = scs_khz;
    return num;
}

double Waveform::energy() const {
    return std::accumulate(samples.begin(), samples.end(), 0.0,
                           [](double acc, const cplx& s) { return acc + std::norm(s); });
}

double Waveform::mean_power() const {
    return samples.empty() ? 0.0 : energy() / static_cast<double>(samples.size());
}

void Waveform::validate(const char* what) const {
    if (samples.empty()) {
        throw InvalidArgument(std::string(what) + ": empty");
    }
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
        throw InvalidArgument(std::string(what) + ": sample rate must be positive");
    }
    for (const auto& s : samples) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw InvalidArgument(std::string(what) + ": non-finite sample");
        }
    }
}

}  // namespace otasync
