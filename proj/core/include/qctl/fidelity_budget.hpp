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

#ifndef QCTL_FIDELITY_BUDGET_HPP
#define QCTL_FIDELITY_BUDGET_HPP

// Single-qubit gate fidelity arithmetic and the electronics requirements that
// follow from it: phase jitter, spurious drive (SFDR) and DC bias precision.

#include <array>
#include <complex>

#include "qctl/common.hpp"

namespace qctl::fidelity {

using Complex = std::complex<double>;

inline constexpr double kFluxQuantumWb = 2.067833848e-15;

class NotUnitary : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// 2x2 unitary, row-major. Construction checks U^dagger U = I to 1e-12.
class Unitary2 {
 public:
  Unitary2();  // identity
  Unitary2(Complex a, Complex b, Complex c, Complex d);

  Complex operator()(int row, int col) const { return m_[static_cast<std::size_t>(2 * row + col)]; }
  Unitary2 adjoint() const;
  Complex trace() const { return m_[0] + m_[3]; }

  friend Unitary2 operator*(const Unitary2& x, const Unitary2& y);

  /// Max-abs entrywise distance.
  double distance(const Unitary2& other) const;

 private:
  struct Unchecked {};
  Unitary2(const std::array<Complex, 4>& m, Unchecked) : m_(m) {}
  std::array<Complex, 4> m_;
};

/// exp(-i (ax sx + ay sy + az sz)) via cos(r) I - i sin(r) (n . sigma).
Unitary2 pauli_exp(double ax, double ay, double az);

/// U(theta, phi) = exp[-i theta/2 (cos phi sx + sin phi sy)].
Unitary2 rotation_unitary(double theta_rad, double phi_rad);

/// Average gate fidelity
///   (Tr[U1 U2^+ U2 U1^+] + |Tr[U2^+ U1]|^2) / (d (d + 1)),  d = 2.
/// The reduced unitary form (2 + |Tr[U2^+ U1]|^2) / 6 is evaluated alongside
/// and must agree to 1e-12.
double gate_fidelity(const Unitary2& u1, const Unitary2& u2);

struct JitterFidelity {
  double phase_error_rad = 0.0;
  double fidelity = 1.0;
};

/// phi = 2 pi f_IF jitter, F = F(U(pi, phi), U(pi, 0)) = (2 + 4 cos^2 phi) / 6.
JitterFidelity jitter_to_fidelity(double jitter_s, double f_if_hz);

/// Phase error at which a pi rotation reaches `target` fidelity, solved by
/// bisection to 1e-15 rad. Target must lie in (1/3, 1].
double phase_error_for_fidelity(double target);

/// Largest jitter (s) that keeps a pi rotation at `target` fidelity.
double jitter_for_fidelity(double target, double f_if_hz);

struct SpuriousDriveSpec {
  double m = 0.0;               // spur amplitude / carrier amplitude
  double omega_if_rad_s = kTwoPi * 100e6;
  double rabi_rad_s = kTwoPi * 50e6;
  double theta_rad = kPi;

  static SpuriousDriveSpec from_sfdr_dbc(double sfdr_dbc);
  double gate_time_s() const { return theta_rad / rabi_rad_s; }
  double sfdr_dbc() const;
  void validate() const;
};

/// Alternative operating point with the 33 MHz Rabi frequency quoted among
/// the system requirements.
SpuriousDriveSpec requirements_operating_point(double m);

/// F(U1, U2) with U1 = exp(-i (w_IF sz / 2 + m Omega sx / 2) t) and
/// U2 = exp(-i w_IF sz t / 2) at t = theta / Omega.
double spurious_fidelity(const SpuriousDriveSpec& spec);

struct WorstCaseFidelity {
  double fidelity = 1.0;
  double if_phase_rad = 0.0;  // w_IF t at the minimum
};

/// Minimum of the spurious-drive fidelity over the gate-time IF phase. With
/// k = floor(w_IF t / 2 pi) full IF turns at the nominal gate time, w_IF t is
/// scanned over [2 pi k, 2 pi (k + 1)) while m Omega t stays fixed.
WorstCaseFidelity spurious_fidelity_worst_case(const SpuriousDriveSpec& spec, int grid_points = 2048);

struct BiasBudget {
  double flux_precision = 1e-5;  // fraction of Phi0
  double r_ohm = 1e3;
  double m_henry = 2e-12;
  double phi0_wb = kFluxQuantumWb;
};

/// dV = flux_precision * Phi0 * R / M.
double bias_precision(const BiasBudget& budget);

/// Inverse: flux precision (fraction of Phi0) implied by a voltage error.
double flux_precision_from_voltage(double delta_v, double r_ohm, double m_henry, double phi0_wb = kFluxQuantumWb);

}  // namespace qctl::fidelity

#endif  // QCTL_FIDELITY_BUDGET_HPP
