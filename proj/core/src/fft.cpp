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

#include "qctl/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>

namespace qctl {

namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

std::vector<Complex> transform(std::span<const Complex> x, int sign) {
  const int n = static_cast<int>(x.size());
  std::vector<Complex> out(x.size());
  if (n == 0) return out;
  Buffer in(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
  Buffer res(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
  fftw_plan plan = fftw_plan_dft_1d(n, in.get(), res.get(), sign, FFTW_ESTIMATE);
  for (int k = 0; k < n; ++k) {
    in[k][0] = x[k].real();
    in[k][1] = x[k].imag();
  }
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  for (int k = 0; k < n; ++k) out[k] = Complex(res[k][0], res[k][1]);
  return out;
}

}  // namespace

std::vector<Complex> fft(std::span<const Complex> x) { return transform(x, FFTW_FORWARD); }

std::vector<Complex> ifft(std::span<const Complex> x) {
  auto out = transform(x, FFTW_BACKWARD);
  const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<Complex> fft_real(std::span<const double> x) {
  std::vector<Complex> c(x.size());
  std::transform(x.begin(), x.end(), c.begin(), [](double v) { return Complex(v, 0.0); });
  return fft(c);
}

}  // namespace qctl
