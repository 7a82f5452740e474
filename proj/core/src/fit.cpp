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

#include "qctl/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "qctl/common.hpp"

namespace qctl::fit {

double FitResult::get(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return params[k];
  }
  throw InvalidArgument("fit: no parameter named '" + name + "'");
}

FitResult levenberg_marquardt(const ModelFn& model, std::span<const double> x, std::span<const double> y,
                              std::vector<double> initial, std::vector<std::string> names, std::string label) {
  if (x.size() != y.size()) throw InvalidArgument("fit: x and y lengths differ");
  const auto np = static_cast<Eigen::Index>(initial.size());
  const auto nd = static_cast<Eigen::Index>(x.size());
  if (nd <= np) throw InvalidArgument("fit: not enough points for " + label);

  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(initial.data(), np);
  Eigen::MatrixXd jac(nd, np);
  Eigen::VectorXd resid(nd);
  std::vector<double> grad(static_cast<std::size_t>(np));

  const auto evaluate = [&](const Eigen::VectorXd& q, bool with_jac) {
    double rss = 0.0;
    for (Eigen::Index i = 0; i < nd; ++i) {
      const double f = model(std::span<const double>(q.data(), static_cast<std::size_t>(np)), x[static_cast<std::size_t>(i)], grad);
      resid(i) = y[static_cast<std::size_t>(i)] - f;
      rss += resid(i) * resid(i);
      if (with_jac) {
        for (Eigen::Index k = 0; k < np; ++k) jac(i, k) = grad[static_cast<std::size_t>(k)];
      }
    }
    return rss;
  };

  FitResult out;
  out.model = std::move(label);
  out.names = std::move(names);

  double rss = evaluate(p, true);
  double lambda = 1e-3;
  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * resid;
    bool accepted = false;
    double new_rss = rss;
    Eigen::VectorXd step;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index k = 0; k < np; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-300);
      step = a.ldlt().solve(jtr);
      const Eigen::VectorXd trial = p + step;
      new_rss = evaluate(trial, false);
      if (std::isfinite(new_rss) && new_rss <= rss) {
        p = trial;
        accepted = true;
        lambda = std::max(lambda / 10.0, 1e-12);
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      out.converged = true;  // no descent direction left at machine precision
      break;
    }
    const double drss = std::abs(rss - new_rss) / std::max(rss, 1e-300);
    const double dstep = step.norm() / std::max(p.norm(), 1e-300);
    rss = evaluate(p, true);
    if (drss < kRelativeTolerance || dstep < kRelativeTolerance) {
      out.converged = true;
      ++iter;
      break;
    }
  }

  out.iterations = iter;
  out.rss = rss;
  out.params.assign(p.data(), p.data() + np);
  const double dof = static_cast<double>(nd - np);
  const Eigen::MatrixXd cov = (jac.transpose() * jac).inverse() * (rss / dof);
  out.std_errors.resize(static_cast<std::size_t>(np));
  for (Eigen::Index k = 0; k < np; ++k) out.std_errors[static_cast<std::size_t>(k)] = std::sqrt(std::max(cov(k, k), 0.0));
  return out;
}

FitResult fit_exponential(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (n < 4 || y.size() != n) throw InvalidArgument("fit_exponential: need >= 4 matching points");

  // Seed: B from the tail, A from the head, T from the area under (y - B).
  const std::size_t tail = std::max<std::size_t>(1, n / 8);
  const double b0 = std::accumulate(y.end() - static_cast<std::ptrdiff_t>(tail), y.end(), 0.0) / static_cast<double>(tail);
  const double a0 = y[0] - b0;
  double area = 0.0;
  for (std::size_t k = 1; k < n; ++k) area += 0.5 * (y[k] + y[k - 1] - 2 * b0) * (t[k] - t[k - 1]);
  double t0 = a0 != 0.0 ? area / a0 : (t[n - 1] - t[0]) / 3.0;
  if (!(t0 > 0.0)) t0 = (t[n - 1] - t[0]) / 3.0;

  const ModelFn model = [](std::span<const double> p, double x, std::span<double> g) {
    const double e = std::exp(-x / p[1]);
    g[0] = e;
    g[1] = p[0] * e * x / (p[1] * p[1]);
    g[2] = 1.0;
    return p[0] * e + p[2];
  };
  return levenberg_marquardt(model, t, y, {a0, t0, b0}, {"A", "T", "B"}, "exp_decay");
}

FitResult fit_decaying_cosine(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (n < 8 || y.size() != n) throw InvalidArgument("fit_decaying_cosine: need >= 8 matching points");

  const double b0 = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  const double span = t[n - 1] - t[0];
  const double dt = span / static_cast<double>(n - 1);

  // Periodogram peak on a 4x oversampled grid up to Nyquist, then parabolic
  // refinement.
  const std::size_t grid = 4 * n;
  const double fmax = 0.5 / dt;
  const auto power = [&](double f) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += (y[k] - b0) * std::polar(1.0, -kTwoPi * f * (t[k] - t[0]));
    return acc;
  };
  std::size_t best = 1;
  double best_p = -1.0;
  std::vector<double> pw(grid + 1);
  for (std::size_t g = 1; g <= grid; ++g) {
    pw[g] = std::norm(power(fmax * static_cast<double>(g) / static_cast<double>(grid)));
    if (pw[g] > best_p) {
      best_p = pw[g];
      best = g;
    }
  }
  double f0 = fmax * static_cast<double>(best) / static_cast<double>(grid);
  if (best > 1 && best < grid) {
    const double a = pw[best - 1], b = pw[best], c = pw[best + 1];
    const double denom = a - 2 * b + c;
    if (denom != 0.0) f0 += 0.5 * (a - c) / denom * fmax / static_cast<double>(grid);
  }
  const auto z = power(f0);
  const double phi0 = std::arg(z) - kTwoPi * f0 * t[0];
  double a0 = 0.0;
  for (std::size_t k = 0; k < n; ++k) a0 = std::max(a0, std::abs(y[k] - b0));
  const double t0 = span / 3.0;

  const ModelFn model = [](std::span<const double> p, double x, std::span<double> g) {
    const double e = std::exp(-x / p[1]);
    const double arg = kTwoPi * p[2] * x + p[3];
    const double c = std::cos(arg);
    const double s = std::sin(arg);
    g[0] = e * c;
    g[1] = p[0] * e * c * x / (p[1] * p[1]);
    g[2] = -p[0] * e * s * kTwoPi * x;
    g[3] = -p[0] * e * s;
    g[4] = 1.0;
    return p[0] * e * c + p[4];
  };
  return levenberg_marquardt(model, t, y, {a0, t0, f0, phi0, b0}, {"A", "T", "f", "phi", "B"}, "damped_cosine");
}

}  // namespace qctl::fit
