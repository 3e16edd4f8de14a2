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

#include "otasync/nr_signal.hpp"

#include <cmath>

#include "otasync/fft.hpp"

namespace otasync {
namespace {

void check_n_id2(int n_id2) {
    if (n_id2 < 0 || n_id2 > 2) {
        throw InvalidArgument("n_id2 must be 0, 1 or 2 (got " + std::to_string(n_id2) + ")");
    }
}

void check_numerology(const Numerology& num) {
    if (!is_supported_scs(num.scs_khz)) {
        throw InvalidArgument("unsupported subcarrier spacing " + std::to_string(num.scs_khz));
    }
    if (num.nfft < kPssLength || num.cp_samples < 0 || num.cp_samples >= num.nfft) {
        throw InvalidArgument("numerology: invalid nfft / cp length");
    }
}

}  // namespace

PssSequence generate_pss(int n_id2) {
    check_n_id2(n_id2);

    std::array<int, kPssLength> x{};
    // [x(6) .. x(0)] = [1 1 1 0 1 1 0]
    constexpr std::array<int, 7> init{0, 1, 1, 0, 1, 1, 1};
    for (int i = 0; i < 7; ++i) x[i] = init[i];
    for (int i = 0; i + 7 < kPssLength; ++i) x[i + 7] = (x[i + 4] + x[i]) % 2;

    PssSequence pss;
    pss.n_id2 = n_id2;
    for (int n = 0; n < kPssLength; ++n) {
        pss.symbols[n] = 1.0 - 2.0 * x[(n + 43 * n_id2) % kPssLength];
    }
    return pss;
}

std::size_t pss_subcarrier_bin(int k, int nfft) {
    const int offset = k - kPssLength / 2;
    return static_cast<std::size_t>((offset % nfft + nfft) % nfft);
}

Waveform modulate(const PssSequence& pss, const Numerology& num) {
    check_numerology(num);
    const auto nfft = static_cast<std::size_t>(num.nfft);
    const auto cp = static_cast<std::size_t>(num.cp_samples);

    cvec grid(nfft, cplx{0.0, 0.0});
    for (int k = 0; k < kPssLength; ++k) grid[pss_subcarrier_bin(k, num.nfft)] = pss.symbols[k];
    fft::inverse(grid);

    Waveform wf;
    wf.sample_rate_hz = num.sample_rate_hz();
    wf.samples.reserve(nfft + cp);
    wf.samples.insert(wf.samples.end(), grid.end() - static_cast<std::ptrdiff_t>(cp), grid.end());
    wf.samples.insert(wf.samples.end(), grid.begin(), grid.end());
    return wf;
}

std::array<cplx, kPssLength> demodulate(const Waveform& wf, const Numerology& num) {
    check_numerology(num);
    const auto nfft = static_cast<std::size_t>(num.nfft);
    const auto cp = static_cast<std::size_t>(num.cp_samples);
    if (wf.size() < nfft + cp) throw InvalidArgument("demodulate: waveform shorter than one symbol");

    cvec grid(wf.samples.begin() + static_cast<std::ptrdiff_t>(cp),
              wf.samples.begin() + static_cast<std::ptrdiff_t>(cp + nfft));
    fft::forward(grid);

    std::array<cplx, kPssLength> out{};
    for (int k = 0; k < kPssLength; ++k) out[k] = grid[pss_subcarrier_bin(k, num.nfft)];
    return out;
}

Waveform reference_template(int n_id2, const Numerology& num) {
    Waveform wf = modulate(generate_pss(n_id2), num);
    wf.samples.erase(wf.samples.begin(), wf.samples.begin() + num.cp_samples);
    return wf;
}

std::vector<double> periodic_correlation(const PssSequence& a, const PssSequence& b) {
    // Correlation theorem: IDFT(conj(A) * B).
    cvec fa(a.symbols.begin(), a.symbols.end());
    cvec fb(b.symbols.begin(), b.symbols.end());
    fft::forward(fa);
    fft::forward(fb);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] = std::conj(fa[i]) * fb[i];
    fft::inverse(fa);

    std::vector<double> out(kPssLength);
    for (int l = 0; l < kPssLength; ++l) out[l] = std::abs(fa[l]) / kPssLength;
    return out;
}

}  // namespace otasync
