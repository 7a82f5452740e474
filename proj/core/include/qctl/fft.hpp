// Copyright 2026 The qctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QCTL_FFT_HPP
#define QCTL_FFT_HPP

#include <complex>
#include <span>
#include <vector>

namespace qctl {

using Complex = std::complex<double>;

// Thin wrappers over FFTW. Unnormalized forward transform, inverse scaled by 1/N.
std::vector<Complex> fft(std::span<const Complex> x);
std::vector<Complex> ifft(std::span<const Complex> x);
std::vector<Complex> fft_real(std::span<const double> x);

}  // namespace qctl

#endif  // QCTL_FFT_HPP
