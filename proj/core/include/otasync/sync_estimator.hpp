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

#include <cstddef>
#include <optional>
#include <vector>

#include "otasync/numerology.hpp"

namespace otasync {

struct DelayEstimate {
    std::size_t lag_samples = 0;
    double peak_magnitude = 0.0;
    /// Peak over the median correlation magnitude across searched lags.
    double peak_to_median_ratio = 0.0;
};

struct FailurePolicy {
    /// Unset means half the cyclic prefix of the numerology in use.
    std::optional<double> max_abs_error_ns;
    double experiment_failure_fraction = 0.10;

    double threshold_ns(const Numerology& num) const;
    void validate() const;
};

/// |sum_n rx[n + lag] * conj(tpl[n])| for lag in [0, rx.size() - tpl.size()],
/// via zero-padded FFTs.
std::vector<double> correlation_magnitude(const Waveform& rx, const Waveform& tpl);

/// Same quantity by direct summation; O(lags * tpl.size()).
std::vector<double> correlation_magnitude_direct(const Waveform& rx, const Waveform& tpl);

/// Peak of |correlation| over all admissible lags; ties go to the smaller lag.
DelayEstimate estimate_delay(const Waveform& rx, const Waveform& tpl);

/// Peak pick on a precomputed correlation magnitude.
DelayEstimate pick_peak(const std::vector<double>& magnitude);

/// |lag * Ts - true_delay| in ns.
double timing_error_ns(const DelayEstimate& est, double true_delay_s, const Numerology& num);

/// Strictly greater than the policy threshold.
bool is_failure(double error_ns, const Numerology& num, const FailurePolicy& policy);

}  // namespace otasync
