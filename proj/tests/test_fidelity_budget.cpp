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

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "qctl/fidelity_budget.hpp"

namespace qctl::fidelity {
namespace {

using M2 = std::array<Complex, 4>;

M2 mul(const M2& a, const M2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

// Truncated power series for exp(-i (ax X + ay Y + az Z)).
M2 taylor_exp(double ax, double ay, double az) {
  const Complex i{0.0, 1.0};
  const M2 a{-i * az, -i * Complex(ax, -ay), -i * Complex(ax, ay), i * az};
  M2 term{1.0, 0.0, 0.0, 1.0};
  M2 sum = term;
  for (int k = 1; k < 60; ++k) {
    term = mul(term, a);
    for (auto& v : term) v /= static_cast<double>(k);
    for (std::size_t j = 0; j < 4; ++j) sum[j] += term[j];
  }
  return sum;
}

// Average over Haar-random pure states of |<psi|U2^dag U1|psi>|^2.
double haar_average_fidelity(const Unitary2& u1, const Unitary2& u2, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  const Unitary2 w = u2.adjoint() * u1;
  double acc = 0.0;
  for (int s = 0; s < samples; ++s) {
    Complex a{n01(rng), n01(rng)}, b{n01(rng), n01(rng)};
    const double nrm = std::sqrt(std::norm(a) + std::norm(b));
    a /= nrm;
    b /= nrm;
    const Complex wa = w(0, 0) * a + w(0, 1) * b;
    const Complex wb = w(1, 0) * a + w(1, 1) * b;
    acc += std::norm(std::conj(a) * wa + std::conj(b) * wb);
  }
  return acc / samples;
}

TEST(Unitary, PauliExpMatchesSeries) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int c = 0; c < 200; ++c) {
    const double ax = u(rng), ay = u(rng), az = u(rng);
    const auto ref = taylor_exp(ax, ay, az);
    const auto got = pauli_exp(ax, ay, az);
    for (int r = 0; r < 2; ++r) {
      for (int k = 0; k < 2; ++k) EXPECT_LT(std::abs(got(r, k) - ref[static_cast<std::size_t>(2 * r + k)]), 1e-10);
    }
  }
  EXPECT_EQ(pauli_exp(0, 0, 0).distance(Unitary2()), 0.0);
}

TEST(Unitary, RejectsNonUnitary) {
  EXPECT_THROW(Unitary2(1.0, 0.0, 0.0, 1.01), NotUnitary);
  EXPECT_THROW(Unitary2(1.0, 1.0, 0.0, 1.0), NotUnitary);
  EXPECT_NO_THROW(Unitary2(0.0, 1.0, 1.0, 0.0));
}

TEST(Unitary, RotationPiIsBitFlip) {
  const auto x = rotation_unitary(kPi, 0.0);
  EXPECT_LT(x.distance(Unitary2(0.0, Complex(0, -1), Complex(0, -1), 0.0)), 1e-15);
}

TEST(GateFidelity, IdentityAndOrthogonal) {
  const Unitary2 id;
  EXPECT_NEAR(gate_fidelity(id, id), 1.0, 1e-15);
  EXPECT_NEAR(gate_fidelity(rotation_unitary(kPi, 0.0), id), 1.0 / 3.0, 1e-15);
}

TEST(GateFidelity, MatchesHaarAverage) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int c = 0; c < 6; ++c) {
    const auto u1 = pauli_exp(u(rng), u(rng), u(rng));
    const auto u2 = pauli_exp(u(rng), u(rng), u(rng));
    EXPECT_NEAR(gate_fidelity(u1, u2), haar_average_fidelity(u1, u2, 200000, 11 + c), 0.003);
  }
}

TEST(Jitter, PhaseThresholdFidelity) {
  const double f = gate_fidelity(rotation_unitary(kPi, 0.00387), rotation_unitary(kPi, 0.0));
  EXPECT_NEAR(f, 0.99999, 1e-6);
  const double c = std::cos(0.00387);
  EXPECT_NEAR(f, (2.0 + 4.0 * c * c) / 6.0, 1e-14);
}

TEST(Jitter, InverseSolve) {
  // cos^2 phi = (6F - 2) / 4
  const double phi = std::acos(std::sqrt((6.0 * 0.99999 - 2.0) / 4.0));
  const double sigma = phi / (kTwoPi * 100e6);
  EXPECT_NEAR(jitter_for_fidelity(0.99999, 100e6), sigma, 1e-17);
  EXPECT_NEAR(jitter_for_fidelity(0.99999, 100e6) * 1e12, 6.2, 0.05);
  EXPECT_NEAR(phase_error_for_fidelity(0.99999), phi, 1e-9);
  const auto fwd = jitter_to_fidelity(sigma, 100e6);
  EXPECT_NEAR(fwd.fidelity, 0.99999, 1e-12);
  EXPECT_THROW(jitter_for_fidelity(0.2, 100e6), InvalidArgument);
  EXPECT_THROW(jitter_to_fidelity(1e-12, 0.0), InvalidArgument);
}

TEST(Bias, PrecisionVoltage) {
  const double dv = bias_precision(BiasBudget{});
  EXPECT_NEAR(dv * 1e6, 1e-5 * 2.067833848e-15 * 1e3 / 2e-12 * 1e6, 1e-12);
  EXPECT_NEAR(dv * 1e6, 10.34, 0.01);
  EXPECT_NEAR(flux_precision_from_voltage(dv, 1e3, 2e-12), 1e-5, 1e-18);
  BiasBudget bad;
  bad.m_henry = 0.0;
  EXPECT_THROW(bias_precision(bad), InvalidArgument);
}

// Closed-form fidelity for U1 = exp(-i(b X + a Z)), U2 = exp(-i a Z).
double spurious_oracle(double a, double b) {
  const double r = std::hypot(a, b);
  const double tr = 2.0 * (std::cos(a) * std::cos(r) + (r > 0 ? a / r : 1.0) * std::sin(a) * std::sin(r));
  return (2.0 + tr * tr) / 6.0;
}

TEST(Spurious, MatchesClosedForm) {
  for (const double sfdr : {-80.0, -60.0, -40.0, -20.0}) {
    for (const double f_if : {73e6, 100e6, 131e6}) {
      auto s = SpuriousDriveSpec::from_sfdr_dbc(sfdr);
      s.omega_if_rad_s = kTwoPi * f_if;
      const double t = s.gate_time_s();
      EXPECT_NEAR(spurious_fidelity(s), spurious_oracle(s.omega_if_rad_s * t / 2, s.m * s.rabi_rad_s * t / 2), 1e-13);
    }
  }
}

TEST(Spurious, CommensurateCase) {
  const auto s = SpuriousDriveSpec::from_sfdr_dbc(-40.0);
  EXPECT_NEAR(s.m, 0.01, 1e-15);
  EXPECT_NEAR(s.gate_time_s(), 10e-9, 1e-20);
  EXPECT_GT(spurious_fidelity(s), 1.0 - 1e-8);
}

TEST(Spurious, WorstCaseAtMinus40) {
  const auto s = SpuriousDriveSpec::from_sfdr_dbc(-40.0);
  const auto w = spurious_fidelity_worst_case(s);
  EXPECT_GE(w.fidelity, 0.99997);
  EXPECT_LE(w.fidelity, 0.999995);
  // Brute-force oracle over the same turn.
  const double b = s.m * s.rabi_rad_s * s.gate_time_s() / 2;
  double brute = 1.0;
  for (int k = 0; k < 100000; ++k) {
    const double psi = kTwoPi * k / 100000.0;
    brute = std::min(brute, spurious_oracle((kTwoPi + psi) / 2, b));
  }
  EXPECT_NEAR(w.fidelity, brute, 1e-10);
  EXPECT_LE(w.fidelity, spurious_fidelity(s));
}

TEST(Spurious, WorstCaseMonotoneInM) {
  double prev = 1.0;
  for (int k = 0; k < 20; ++k) {
    const double sfdr = -80.0 + 3.0 * k;
    const double f = spurious_fidelity_worst_case(SpuriousDriveSpec::from_sfdr_dbc(sfdr)).fidelity;
    EXPECT_LE(f, prev + 1e-15) << sfdr;
    prev = f;
  }
}

TEST(Spurious, InvalidSpec) {
  SpuriousDriveSpec s;
  s.m = -1.0;
  EXPECT_THROW(spurious_fidelity(s), InvalidArgument);
  s.m = 0.01;
  s.rabi_rad_s = 0.0;
  EXPECT_THROW(spurious_fidelity(s), InvalidArgument);
  EXPECT_THROW(spurious_fidelity_worst_case(SpuriousDriveSpec{}, 4), InvalidArgument);
}

}  // namespace
}  // namespace qctl::fidelity
