// Copyright 2026 The becsq Authors
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

#pragma once

#include <cmath>
#include <numbers>

// Internal units: hbar = m = omega_x = 1. Lengths are in l_x = sqrt(hbar / m omega_x),
// times in 1/omega_x, energies in hbar omega_x.
namespace becsq::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHbar = 1.054571817e-34;           // J s
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kRb87MassAmu = 86.909180527;

/// Rates quoted as multiples of omega_x / 2pi (e.g. kappa^2 = 100 omega_x / 2pi).
inline constexpr double rate_from_per_two_pi(double multiple) { return multiple / kTwoPi; }
inline constexpr double rate_to_per_two_pi(double rate) { return rate * kTwoPi; }

/// One trap period 2pi / omega_x.
inline constexpr double trap_periods(double n) { return n * kTwoPi; }

/// Oscillator length sqrt(hbar / m omega) in metres for trap frequency f (Hz).
inline double oscillator_length_m(double mass_amu, double frequency_hz) {
  const double mass = mass_amu * kAtomicMassUnit;
  return std::sqrt(kHbar / (mass * kTwoPi * frequency_hz));
}

}  // namespace becsq::units
