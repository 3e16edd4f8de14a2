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
#include <cstddef>
#include <span>

// Thin FFTW wrapper. Plans are cached per (size, direction) and shared between
// threads; execution uses the new-array interface, which FFTW allows
// concurrently.
namespace otasync::fft {

/// In-place forward DFT, unscaled.
void forward(std::span<std::complex<double>> data);

/// In-place inverse DFT, scaled by 1/N.
void inverse(std::span<std::complex<double>> data);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace otasync::fft
