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

#include "qctl/fidelity_budget.hpp"

#include <algorithm>
#include <cmath>

namespace qctl::fidelity {

namespace {
constexpr double kUnitaryTolerance = 1e-12;
const Complex kI{0.0, 1.0};
}  // namespace

Unitary2::Unitary2() : m_{1.0, 0.0, 0.0, 1.0} {}

Unitary2::Unitary2(Complex a, Complex b, Complex c, Complex d) : m_{a, b, c, d} {
  const Unitary2 p = adjoint() * Unitary2(m_, Unchecked{});
  const Unitary2 id;
  if (p.distance(id) > kUnitaryTolerance) throw NotUnitary("matrix is not unitary");
}

Unitary2 Unitary2::adjoint() const {
  return Unitary2({std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])}, Unchecked{});
}

Unitary2 operator*(const Unitary2& x, const Unitary2& y) {
  const auto& a = x.m_;
  const auto& b = y.m_;
  return Unitary2({a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
                   a[2] * b[1] + a[3] * b[3]},
                  Unitary2::Unchecked{});
}

double Unitary2::distance(const Unitary2& other) const {
  double d = 0.0;
  for (std::size_t k = 0; k < 4; ++k) d = std::max(d, std::abs(m_[k] - other.m_[k]));
  return d;
}

Unitary2 pauli_exp(double ax, double ay, double az) {
  const double r = std::sqrt(ax * ax + ay * ay + az * az);
  if (r == 0.0) return Unitary2();
  const double c = std::cos(r);
  const double s = std::sin(r) / r;
  // cos r I - i sin r (n.sigma); n.sigma = [[nz, nx - i ny], [nx + i ny, -nz]]
  return Unitary2(Complex(c, -s * az), -kI * s * Complex(ax, -ay), -kI * s * Complex(ax, ay), Complex(c, s * az));
}

Unitary2 rotation_unitary(double theta_rad, double phi_rad) {
  const double h = theta_rad / 2.0;
  return pauli_exp(h * std::cos(phi_rad), h * std::sin(phi_rad), 0.0);
}

double gate_fidelity(const Unitary2& u1, const Unitary2& u2) {
  constexpr double d = 2.0;
  const Complex overlap = (u2.adjoint() * u1).trace();
  const double tr_term = (u1 * u2.adjoint() * u2 * u1.adjoint()).trace().real();
  const double general = (tr_term + std::norm(overlap)) / (d * (d + 1.0));
  const double reduced = (2.0 + std::norm(overlap)) / 6.0;
  if (std::abs(general - reduced) > 1e-12) throw Error("gate_fidelity: general and unitary forms disagree");
  return general;
}

JitterFidelity jitter_to_fidelity(double jitter_s, double f_if_hz) {
  if (!(f_if_hz > 0.0)) throw InvalidArgument("jitter_to_fidelity: IF must be positive");
  const double phi = kTwoPi * f_if_hz * jitter_s;
  return {phi, gate_fidelity(rotation_unitary(kPi, phi), rotation_unitary(kPi, 0.0))};
}

double phase_error_for_fidelity(double target) {
  if (!(target > 1.0 / 3.0 && target <= 1.0)) throw InvalidArgument("fidelity target must lie in (1/3, 1]");
  const auto f = [](double phi) {
    const double c = std::cos(phi);
    return (2.0 + 4.0 * c * c) / 6.0;
  };
  // f decreases monotonically from 1 at 0 to 1/3 at pi/2.
  double lo = 0.0;
  double hi = kPi / 2.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) >= target ? lo : hi) = mid;
  }
  return lo;
}

double jitter_for_fidelity(double target, double f_if_hz) {
  if (!(f_if_hz > 0.0)) throw InvalidArgument("jitter_for_fidelity: IF must be positive");
  return phase_error_for_fidelity(target) / (kTwoPi * f_if_hz);
}

SpuriousDriveSpec SpuriousDriveSpec::from_sfdr_dbc(double sfdr_dbc) {
  SpuriousDriveSpec s;
  s.m = std::pow(10.0, sfdr_dbc / 20.0);
  return s;
}

double SpuriousDriveSpec::sfdr_dbc() const { return 20.0 * std::log10(m); }

void SpuriousDriveSpec::validate() const {
  if (!(m >= 0.0)) throw InvalidArgument("spurious drive: m must be >= 0");
  if (!(rabi_rad_s > 0.0)) throw InvalidArgument("spurious drive: Rabi frequency must be positive");
}

SpuriousDriveSpec requirements_operating_point(double m) {
  SpuriousDriveSpec s;
  s.m = m;
  s.rabi_rad_s = kTwoPi * 33e6;
  return s;
}

namespace {

double spurious_fidelity_at(double if_phase, double spur_angle) {
  // Exponents are the full (w t / 2) and (m Omega t / 2) coefficients.
  const Unitary2 u1 = pauli_exp(spur_angle / 2.0, 0.0, if_phase / 2.0);
  const Unitary2 u2 = pauli_exp(0.0, 0.0, if_phase / 2.0);
  return gate_fidelity(u1, u2);
}

}  // namespace

double spurious_fidelity(const SpuriousDriveSpec& spec) {
  spec.validate();
  const double t = spec.gate_time_s();
  return spurious_fidelity_at(spec.omega_if_rad_s * t, spec.m * spec.rabi_rad_s * t);
}

WorstCaseFidelity spurious_fidelity_worst_case(const SpuriousDriveSpec& spec, int grid_points) {
  spec.validate();
  if (grid_points < 8) throw InvalidArgument("worst case scan needs at least 8 grid points");
  const double t = spec.gate_time_s();
  const double spur = spec.m * spec.rabi_rad_s * t;
  const double turns = std::floor(spec.omega_if_rad_s * t / kTwoPi + 1e-9);
  const double base = kTwoPi * turns;

  const auto f = [&](double psi) { return spurious_fidelity_at(base + psi, spur); };
  const double step = kTwoPi / grid_points;
  int best_k = 0;
  double best = 2.0;
  for (int k = 0; k < grid_points; ++k) {
    const double v = f(step * k);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  // Golden-section refinement inside the bracketing grid cells.
  double a = step * (best_k - 1);
  double b = step * (best_k + 1);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  const double psi = f1 < f2 ? x1 : x2;
  const double refined = std::min(f1, f2);
  if (refined < best) return {refined, base + psi};
  return {best, base + step * best_k};
}

double bias_precision(const BiasBudget& budget) {
  if (!(budget.m_henry > 0.0)) throw InvalidArgument("bias budget: M must be positive");
  if (!(budget.flux_precision > 0.0) || !(budget.r_ohm > 0.0) || !(budget.phi0_wb > 0.0)) {
    throw InvalidArgument("bias budget: all quantities must be positive");
  }
  return budget.flux_precision * budget.phi0_wb * budget.r_ohm / budget.m_henry;
}

double flux_precision_from_voltage(double delta_v, double r_ohm, double m_henry, double phi0_wb) {
  if (!(m_henry > 0.0) || !(r_ohm > 0.0)) throw InvalidArgument("bias budget: R and M must be positive");
  return delta_v * m_henry / (phi0_wb * r_ohm);
}

}  // namespace qctl::fidelity
