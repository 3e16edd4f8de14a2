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

#include "otasync/sync_estimator.hpp"

#include <algorithm>
#include <cmath>

#include "otasync/fft.hpp"

namespace otasync {
namespace {

void check_pair(const Waveform& rx, const Waveform& tpl) {
    rx.validate("received waveform");
    tpl.validate("template");
    if (rx.size() < tpl.size()) throw InvalidArgument("received waveform shorter than template");
    if (rx.sample_rate_hz != tpl.sample_rate_hz) {
        throw InvalidArgument("received waveform and template sample rates differ");
    }
}

}  // namespace

double FailurePolicy::threshold_ns(const Numerology& num) const {
    return max_abs_error_ns ? *max_abs_error_ns : num.cp_duration_ns() / 2.0;
}

void FailurePolicy::validate() const {
    if (max_abs_error_ns && !(*max_abs_error_ns > 0.0)) {
        throw InvalidArgument("failure policy: max_abs_error_ns must be positive");
    }
    if (!(experiment_failure_fraction > 0.0 && experiment_failure_fraction < 1.0)) {
        throw InvalidArgument("failure policy: experiment_failure_fraction must be in (0, 1)");
    }
}

std::vector<double> correlation_magnitude(const Waveform& rx, const Waveform& tpl) {
    check_pair(rx, tpl);
    // Circular correlation over m >= rx.size() points does not wrap for the
    // lags we keep, since n + lag < rx.size() for every template index n.
    const std::size_t m = fft::next_pow2(rx.size());
    cvec a(m, cplx{}), b(m, cplx{});
    std::copy(rx.samples.begin(), rx.samples.end(), a.begin());
    std::copy(tpl.samples.begin(), tpl.samples.end(), b.begin());
    fft::forward(a);
    fft::forward(b);
    for (std::size_t i = 0; i < m; ++i) {
        const double ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
        a[i] = cplx{ar * br + ai * bi, ai * br - ar * bi};
    }
    fft::inverse(a);

    const std::size_t lags = rx.size() - tpl.size() + 1;
    std::vector<double> mag(lags);
    for (std::size_t l = 0; l < lags; ++l) mag[l] = std::abs(a[l]);
    return mag;
}

std::vector<double> correlation_magnitude_direct(const Waveform& rx, const Waveform& tpl) {
    check_pair(rx, tpl);
    const std::size_t lags = rx.size() - tpl.size() + 1;
    std::vector<double> mag(lags);
    for (std::size_t l = 0; l < lags; ++l) {
        cplx acc{};
        for (std::size_t n = 0; n < tpl.size(); ++n) acc += rx.samples[n + l] * std::conj(tpl.samples[n]);
        mag[l] = std::abs(acc);
    }
    return mag;
}

DelayEstimate pick_peak(const std::vector<double>& magnitude) {
    if (magnitude.empty()) throw InvalidArgument("empty correlation");
    DelayEstimate est;
    for (std::size_t l = 0; l < magnitude.size(); ++l) {
        if (magnitude[l] > est.peak_magnitude) {
            est.peak_magnitude = magnitude[l];
            est.lag_samples = l;
        }
    }
    std::vector<double> sorted = magnitude;
    auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
    std::nth_element(sorted.begin(), mid, sorted.end());
    const double median = *mid;
    est.peak_to_median_ratio = median > 0.0 ? est.peak_magnitude / median : INFINITY;
    return est;
}

DelayEstimate estimate_delay(const Waveform& rx, const Waveform& tpl) {
    return pick_peak(correlation_magnitude(rx, tpl));
}

double timing_error_ns(const DelayEstimate& est, double true_delay_s, const Numerology& num) {
    return std::abs(static_cast<double>(est.lag_samples) * num.sample_period_ns() - true_delay_s * 1e9);
}

bool is_failure(double error_ns, const Numerology& num, const FailurePolicy& policy) {
    if (!(error_ns >= 0.0)) throw InvalidArgument("timing error must be nonnegative");
    return error_ns > policy.threshold_ns(num);
}

}  // namespace otasync
