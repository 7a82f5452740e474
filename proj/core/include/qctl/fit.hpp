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

#ifndef QCTL_FIT_HPP
#define QCTL_FIT_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qctl::fit {

struct FitResult {
  std::string model;
  std::vector<std::string> names;
  std::vector<double> params;
  std::vector<double> std_errors;
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;

  double get(const std::string& name) const;
};

/// Model value and its gradient with respect to the parameters at x.
using ModelFn = std::function<double(std::span<const double> p, double x, std::span<double> grad)>;

inline constexpr int kMaxIterations = 500;
inline constexpr double kRelativeTolerance = 1e-10;

/// Damped (Levenberg-Marquardt) least squares with caller-provided analytic
/// Jacobian rows. Stops when the relative RSS or step change drops below
/// 1e-10 or after 500 iterations.
FitResult levenberg_marquardt(const ModelFn& model, std::span<const double> x, std::span<const double> y,
                              std::vector<double> initial, std::vector<std::string> names, std::string label);

/// y = A exp(-t / T) + B. Parameters {A, T, B}.
FitResult fit_exponential(std::span<const double> t, std::span<const double> y);

/// y = A exp(-t / T) cos(2 pi f t + phi) + B. Parameters {A, T, f, phi, B}.
FitResult fit_decaying_cosine(std::span<const double> t, std::span<const double> y);

}  // namespace qctl::fit

#endif  // QCTL_FIT_HPP
