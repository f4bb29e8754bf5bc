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

#ifndef IMQED_DISSIPATION_HPP
#define IMQED_DISSIPATION_HPP

#include "imqed/immittance.hpp"
#include "imqed/linalg.hpp"

namespace imqed {

struct PortLayout;  // effective.hpp

// External admittance (impedance) seen from inside the circuit,
// filtered by the dc response of the drive sector:
//   Y_drive(w) = Z0^-1 + Y^dc_D(w),  Z_drive(w) = Z0 + Z^dc_D(w).
CMat drive_filter(const PoleResidueResponse& resp, const PortLayout& layout,
                  double omega);

// Correlated decay matrix gamma_ij (rad/s); `qubit_weight` holds
// 1/sqrt(C_i) (admittance route) or sqrt(C_i) w_i (impedance route)
// factors, and `jd_rescale` the optional dressing of the qubit rows.
CMat decay_matrix(const PoleResidueResponse& resp, const PortLayout& layout,
                  const Vec& omega_bar, const Mat& jd_rescale);

// Diagonal of gamma as Purcell rates; absent (infinity T1) entries are 0.
Vec purcell_rates(const CMat& gamma);

// Weak-coupling closed forms for the qubit/resonator/filter/line chain:
// returns {1/T1_readout, 1/T1_drive}.
struct PurcellChainParams {
    double omega_bar, omega_r, omega_f;  // rad/s
    double c_j, c_r, c_p;                // F
    double c_jr, c_rp, c_k, c_d, c_jd;   // F
    double z0;                           // Ohm
};
std::pair<double, double> purcell_weak_coupling(const PurcellChainParams& p);

// kappa(w) = w^2 C_k^2 Z0 / (C_p (1 + w^2 Z0^2 (C_d + C_k)^2)).
double purcell_kappa(double omega, double c_k, double c_d, double c_p,
                     double z0);

struct DriveAmplitudeResult {
    CMat alpha_plus;   // alpha[+w_d], n x n_D
    CMat alpha_minus;  // alpha[-w_d]
};

// alpha_jd[w] = sum_d' (Ybar^ac_jd'(wbar_j) + Ybar^dc,R_jd'(w)) *
//               Ydrive^-1_d'd(w); rows already carry the jd_rescale.
DriveAmplitudeResult drive_amplitudes(const PoleResidueResponse& resp,
                                      const PortLayout& layout,
                                      const Vec& omega_bar,
                                      const Mat& jd_rescale, double omega_d);

// X_ij = 20 log10 |alpha_{i,d(j)} / alpha_{j,d(j)}| with a -300 dB floor.
Mat crosstalk(const CMat& alpha, const std::vector<int>& line_of_qubit);

}  // namespace imqed

#endif
