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

#ifndef IMQED_EFFECTIVE_HPP
#define IMQED_EFFECTIVE_HPP

#include <optional>
#include <string>
#include <vector>

#include "imqed/cauer.hpp"
#include "imqed/immittance.hpp"
#include "imqed/netlist.hpp"
#include "imqed/symplectic.hpp"
#include "imqed/units.hpp"

namespace imqed {

struct JunctionPortParams {
    std::string label;
    double e_j = 0.0;      // Joule
    double c_shunt = 0.0;  // the declared shunt element, F

    double l_tilde() const { return junction_inductance(e_j); }
};

// Port rows of a response, split by role.
struct PortLayout {
    std::vector<int> junction_rows;
    std::vector<JunctionPortParams> junction;
    std::vector<int> drive_rows;
    std::vector<double> z0;
    // Set when the caller extracted a shunt inductance out of the
    // response; the impedance route must then be refused.
    bool shunt_inductance_declared = false;

    int n_junction() const { return static_cast<int>(junction_rows.size()); }
    int n_drive() const { return static_cast<int>(drive_rows.size()); }
};

PortLayout layout_from_circuit(const Circuit& c);

enum class Route { Y, Z, Auto };
enum class DirectMode { Numeric, Perturbative, None };

std::string to_string(Route r);
std::string to_string(DirectMode m);

struct DriveToneSpec {
    int port = 0;        // index into layout.drive_rows
    double v_volt = 0.0;
    double omega_d = 0.0;  // rad/s
};

struct BuildOptions {
    Route route = Route::Auto;
    DirectMode direct_mode = DirectMode::Numeric;
    // Linear-oracle mode: drop the charging-energy corrections so the
    // model can be compared against the linearized circuit.
    bool include_anharmonicity = true;
    bool with_dissipation = true;
    std::optional<DriveToneSpec> tone;
    double warn_direct_ratio = 0.3;
    double nontransmon_warn = 0.2;
    double secular_c = 10.0;
};

struct InnerMode {
    double omega = 0.0;  // rad/s
    bool reciprocal = true;
    Vec chi;             // per-qubit dispersive shift, rad/s
};

struct DriveEnvelope {
    double omega_d = 0.0;
    Complex coef_plus;   // of e^{+i w_d t}
    Complex coef_minus;  // of e^{-i w_d t}
    Complex at(double t_s) const {
        Complex iwt(0.0, omega_d * t_s);
        return coef_plus * std::exp(iwt) + coef_minus * std::exp(-iwt);
    }
};

struct EffectiveModel {
    Route route = Route::Y;
    DirectMode direct_mode = DirectMode::None;
    int n_qubits = 0;

    Vec omega_bar;  // dressed junction frequencies (rad/s)
    Vec omega;      // Lamb-shifted qubit frequencies (rad/s)
    Vec delta;      // anharmonicities (rad/s, negative for transmons)
    Vec e_c;        // charging energies (rad/s)
    Vec c_eff;      // per-qubit effective shunt capacitance (F)
    Vec zeta;       // shunt-inductance participation

    CMat j_matrix;  // J_ij with J_ji = conj(J_ij); zero diagonal
    std::vector<InnerMode> inner_modes;

    // Filled when drive ports exist.
    CMat gamma;                            // Hermitian PSD decay matrix
    std::vector<std::vector<int>> secular_groups;
    CMat alpha;                            // n x n_D normalized amplitudes
    std::vector<std::vector<DriveEnvelope>> drives;  // [qubit][drive]
    Mat crosstalk_db;
    bool gamma_uses_dressed_response = false;

    std::vector<std::string> warnings;

    double theta(int i, int j) const { return std::arg(j_matrix(i, j)); }
};

// --------------------------------------------------------------------
// Per-operation pieces (bare-response variants of the model formulas).
// --------------------------------------------------------------------

// Dressed junction frequency from the plasma frequency, charging energy
// and shunt-inductance participation zeta.
double dressed_frequency(double omega_tilde, double e_c_radps, double zeta);

// Self-consistency residual w^2 - wt^2 (1 + zeta - 2 E_C / w).
double dressed_frequency_residual(double omega_bar, double omega_tilde,
                                  double e_c_radps, double zeta);

double lamb_shifted_frequency(const PoleResidueResponse& resp, int row,
                              double omega_bar, double c_eff);

Complex hopping(const PoleResidueResponse& resp, int row_i, int row_j,
                double wbar_i, double wbar_j, double c_i, double c_j);

double cross_kerr(double omega_bar, double delta, double e_c, double pole_omega,
                  double g_qq, double g_qpi);

EffectiveModel build_effective_model(const PoleResidueResponse& resp,
                                     const PortLayout& layout,
                                     const BuildOptions& opts = {});

// Convenience: extract (per route rules) and build from a circuit.
EffectiveModel build_effective_model(const Circuit& c,
                                     const BuildOptions& opts = {});

std::string model_to_json(const EffectiveModel& m);

// --------------------------------------------------------------------
// Phase-space assembly for the exact pipelines.
// --------------------------------------------------------------------

struct PhaseSpaceModel {
    QuadraticSystem system;  // balanced, entries in rad/s
    // Quartic junction term c4 * x_i^4 (rad/s) on the pair holding
    // junction i; index into system.pairs.
    struct Quartic {
        int pair = 0;
        double c4 = 0.0;
    };
    std::vector<Quartic> quartics;
};

// Assemble the junction-sector phase-space model from the admittance
// response via its Cauer data, eliminate the nondynamical gyrator
// partners and rescale to frequency units.
PhaseSpaceModel assemble_phase_space(const PoleResidueResponse& resp,
                                     const PortLayout& layout,
                                     Elimination elim = Elimination::Exact,
                                     bool include_junction_l = true);

// Effective qubit-sector J matrix through the full symplectic pipeline
// (assembly, elimination, Schrieffer-Wolff); used to cross-check the
// closed-form hopping.
CMat j_matrix_from_phase_space(const PoleResidueResponse& resp,
                               const PortLayout& layout,
                               Elimination elim = Elimination::Exact,
                               const SwOptions& sw = {});

}  // namespace imqed

#endif
