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

#ifndef QCTL_COMMON_HPP
#define QCTL_COMMON_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace qctl {

/// Simulator time base. All clock edges, trigger stamps and ledger entries are
/// integer picoseconds so sums are exact and runs replay bit-for-bit.
using Picoseconds = std::int64_t;

inline constexpr Picoseconds kPsPerNs = 1000;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates an operation's precondition or a type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Mixes a seed with a stream index (splitmix64 finalizer). Used to give every
/// sweep point, tick and shot its own independent RNG stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b);

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(derive_seed(seed, stream));
}

/// Round half to even, the rounding used for every float-to-code conversion.
double round_half_even(double x);

/// Clamps to the signed range of an n-bit two's-complement code.
constexpr std::int64_t clamp_to_bits(std::int64_t v, int bits) {
  const std::int64_t hi = (std::int64_t{1} << (bits - 1)) - 1;
  const std::int64_t lo = -(std::int64_t{1} << (bits - 1));
  return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace qctl

#endif  // QCTL_COMMON_HPP
