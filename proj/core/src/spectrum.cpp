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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qctl/dsp_demod.hpp"
#include "qctl/fft.hpp"

namespace qctl::dsp {

namespace {

constexpr std::size_t kLobe = 4;  // main-lobe half width of the 4-term Blackman-Harris window

std::vector<double> blackman_harris(std::size_t n) {
  constexpr double a0 = 0.35875, a1 = 0.48829, a2 = 0.14128, a3 = 0.01168;
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    w[k] = a0 - a1 * std::cos(x) + a2 * std::cos(2 * x) - a3 * std::cos(3 * x);
  }
  return w;
}

void check_length(std::size_t n) {
  if (n < 4096 || (n & (n - 1)) != 0) throw InvalidArgument("spectrum: length must be a power of two >= 4096");
}

// `power` holds |X_k|^2 over the analysed bins. For real input it is the
// one-sided half [0, N/2]; for complex input the full circle.
SpectrumMetrics analyse(const std::vector<double>& power, std::size_t n, bool circular) {
  const std::size_t bins = power.size();
  std::vector<char> used(bins, 0);

  const auto fold = [&](std::size_t k) -> std::size_t {
    k %= n;
    if (!circular && k > n / 2) k = n - k;
    return k;
  };
  const auto lobe = [&](std::size_t centre, auto&& fn) {
    for (std::ptrdiff_t d = -static_cast<std::ptrdiff_t>(kLobe); d <= static_cast<std::ptrdiff_t>(kLobe); ++d) {
      std::ptrdiff_t k = static_cast<std::ptrdiff_t>(centre) + d;
      if (circular) {
        k = (k % static_cast<std::ptrdiff_t>(n) + static_cast<std::ptrdiff_t>(n)) % static_cast<std::ptrdiff_t>(n);
      } else if (k < 0 || k >= static_cast<std::ptrdiff_t>(bins)) {
        continue;
      }
      fn(static_cast<std::size_t>(k));
    }
  };

  lobe(0, [&](std::size_t k) { used[k] = 1; });

  std::size_t fund = 0;
  double peak = -1.0;
  for (std::size_t k = 0; k < bins; ++k) {
    if (!used[k] && power[k] > peak) {
      peak = power[k];
      fund = k;
    }
  }
  double p_fund = 0.0;
  lobe(fund, [&](std::size_t k) {
    if (!used[k]) p_fund += power[k];
    used[k] = 1;
  });

  double p_harm = 0.0;
  for (std::size_t h = 2; h <= 6; ++h) {
    const std::size_t kh = fold(h * fund);
    double p = 0.0;
    lobe(kh, [&](std::size_t k) {
      if (!used[k]) p += power[k];
      used[k] = 2;
    });
    p_harm += p;
  }

  double noise_sum = 0.0;
  std::size_t noise_bins = 0;
  for (std::size_t k = 0; k < bins; ++k) {
    if (used[k] == 0) {
      noise_sum += power[k];
      ++noise_bins;
    }
  }
  if (!(p_fund > 0.0) || noise_bins == 0) throw InvalidArgument("spectrum: no tone found");
  const double mean_noise = noise_sum / static_cast<double>(noise_bins);
  // A tone must stand well clear of its own lobe's worth of noise.
  if (p_fund < 10.0 * mean_noise * static_cast<double>(2 * kLobe + 1)) throw InvalidArgument("spectrum: no tone found");

  // Extrapolate the noise floor over the bins excluded above.
  const double usable = circular ? static_cast<double>(n) - 1.0 : static_cast<double>(n) / 2.0;
  const double p_noise = std::max(mean_noise * usable, 1e-300);

  // Worst spur: largest remaining bin outside DC and the fundamental lobe.
  std::size_t spur = 0;
  double spur_peak = -1.0;
  for (std::size_t k = 0; k < bins; ++k) {
    if (used[k] != 1 && power[k] > spur_peak) {
      spur_peak = power[k];
      spur = k;
    }
  }
  double p_spur = 0.0;
  lobe(spur, [&](std::size_t k) {
    if (used[k] != 1) p_spur += power[k];
  });

  SpectrumMetrics m;
  m.fundamental_bin = fund;
  m.snr_db = 10.0 * std::log10(p_fund / p_noise);
  m.thd_dbc = 10.0 * std::log10(std::max(p_harm, 1e-300) / p_fund);
  m.sfdr_dbc = 10.0 * std::log10(std::max(p_spur, 1e-300) / p_fund);
  m.enob_bits = (m.snr_db - 1.76) / 6.02;
  return m;
}

}  // namespace

SpectrumMetrics spectrum_metrics(std::span<const double> samples) {
  const std::size_t n = samples.size();
  check_length(n);
  const auto w = blackman_harris(n);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = samples[k] * w[k];
  const auto spec = fft_real(x);
  std::vector<double> power(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) power[k] = std::norm(spec[k]);
  return analyse(power, n, false);
}

SpectrumMetrics spectrum_metrics(std::span<const Complex> samples) {
  const std::size_t n = samples.size();
  check_length(n);
  const auto w = blackman_harris(n);
  std::vector<Complex> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = samples[k] * w[k];
  const auto spec = fft(x);
  std::vector<double> power(n);
  for (std::size_t k = 0; k < n; ++k) power[k] = std::norm(spec[k]);
  return analyse(power, n, true);
}

}  // namespace qctl::dsp
