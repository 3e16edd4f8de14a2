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

#include <array>
#include <vector>

#include "otasync/numerology.hpp"

namespace otasync {

inline constexpr int kPssLength = 127;

/// BPSK primary synchronization sequence for one N_ID^(2).
struct PssSequence {
    int n_id2 = 0;
    std::array<double, kPssLength> symbols{};
};

/** Builds d(n) = 1 - 2 x((n + 43 N_ID2) mod 127), with
 *  x(i+7) = (x(i+4) + x(i)) mod 2 and [x(6) .. x(0)] = [1 1 1 0 1 1 0].
 */
PssSequence generate_pss(int n_id2);

/// Grid bin (0..nfft-1) carrying PSS element k. The 127 values sit on
/// contiguous subcarriers centred on DC, DC included.
std::size_t pss_subcarrier_bin(int k, int nfft);

/// Maps the sequence onto an nfft grid, inverse FFT (1/N scaled), CP prepended.
Waveform modulate(const PssSequence& pss, const Numerology& num);

/// Strips the CP, forward FFT, and reads back the 127 mapped subcarriers.
std::array<cplx, kPssLength> demodulate(const Waveform& wf, const Numerology& num);

/// CP-free time-domain PSS symbol (nfft samples) used as the matched filter.
Waveform reference_template(int n_id2, const Numerology& num);

/// Normalized periodic cross-correlation |sum_n a(n) b(n+l)| / 127 for every
/// lag l in [0, 127).
std::vector<double> periodic_correlation(const PssSequence& a, const PssSequence& b);

}  // namespace otasync
