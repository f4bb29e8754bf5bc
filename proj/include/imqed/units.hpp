// Copyright 2026 The imqed authors
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

#ifndef IMQED_UNITS_HPP
#define IMQED_UNITS_HPP

#include <cmath>
#include <string>

namespace imqed {

// Physical constants (SI).
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kHbar = 1.054571817e-34;              // J s
inline constexpr double kPlanck = 6.62607015e-34;             // J s
// Reduced flux quantum hbar/2e.
inline constexpr double kPhi0 = kHbar / (2.0 * kElementaryCharge);  // Wb

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Interfaces speak engineering units (GHz, fF, nH, Ohm); internally all
// immittance math is SI with angular frequencies in rad/s, and the
// integrators use rad/ns with time in ns.
inline double ghz_to_radps(double f_ghz) { return kTwoPi * 1e9 * f_ghz; }
inline double radps_to_ghz(double w) { return w / (kTwoPi * 1e9); }
inline double radps_to_radpns(double w) { return w * 1e-9; }
inline double radpns_to_radps(double w) { return w * 1e9; }

// Josephson energy E_J (Joule) from the tabulated E_J/h in GHz.
inline double ej_from_ghz(double ej_over_h_ghz) {
    return kPlanck * ej_over_h_ghz * 1e9;
}

// Bare junction inductance phi0^2/E_J.
inline double junction_inductance(double ej_joule) {
    return kPhi0 * kPhi0 / ej_joule;
}

// Charging energy e^2/2C as an angular frequency (rad/s, hbar = 1).
inline double charging_energy_radps(double c_farad) {
    return kElementaryCharge * kElementaryCharge / (2.0 * c_farad * kHbar);
}

// E_J as an angular frequency (rad/s).
inline double ej_radps(double ej_joule) { return ej_joule / kHbar; }

}  // namespace imqed

#endif
