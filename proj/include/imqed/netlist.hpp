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

#ifndef IMQED_NETLIST_HPP
#define IMQED_NETLIST_HPP

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "imqed/immittance.hpp"
#include "imqed/linalg.hpp"

namespace imqed {

// Node index -1 is ground.
constexpr int kGround = -1;

struct Capacitor {
    int a, b;
    double farad;
};
struct Inductor {
    int a, b;
    double henry;
};
// Grounded two-port gyrator: v_l = -R i_r, v_r = R i_l.
struct Gyrator {
    int left, right;
    double r_gyr;
};
// Grounded three-port circulator realized by its admittance matrix
// Y = (1/R)(1 - S(phi))(1 + S(phi))^-1; phi in {0, pi} is rejected.
struct Circulator3 {
    int a, b, c;
    double phi;
    double r;
};
// Grounded ideal transformer: v_p = ratio * v_s, i_s = -ratio * i_p.
struct Transformer {
    int primary, secondary;
    double ratio;
};

using Element =
    std::variant<Capacitor, Inductor, Gyrator, Circulator3, Transformer>;

// Qubit port across the terminals of a junction.  The linear junction
// inductance phi0^2/E_J and the nonlinearity stay outside of the
// immittance response; the shunt capacitance c_j is a circuit element.
struct JunctionPort {
    std::string label;
    int a, b;
    double e_j;  // Josephson energy, Joule
    double c_j;  // shunt capacitance, F
};

// Drive/readout port terminated by a line of characteristic impedance
// z0; the resistor is excluded from the lossless response.
struct DrivePort {
    std::string label;
    int a, b;
    double z0;
};

using Port = std::variant<JunctionPort, DrivePort>;

struct Circuit {
    std::vector<std::string> node_names;
    std::vector<Element> elements;
    std::vector<Port> ports;

    int n_nodes() const { return static_cast<int>(node_names.size()); }
    int n_ports() const { return static_cast<int>(ports.size()); }
    std::vector<int> junction_port_indices() const;
    std::vector<int> drive_port_indices() const;
};

// Line-oriented DSL, '#' comments, ';' or newline separated:
//   C n1 gnd 100fF
//   L n1 n2 10nH
//   G nl nr 50
//   X a b c phi=1.0472 R=50
//   T p s 2.0
//   port J1 n1 gnd EJ=11.37GHz CJ=100fF
//   port D1 n2 gnd Z0=50
Circuit parse(const std::string& text);
std::string to_netlist(const Circuit& c);

// Port admittance matrix at s = i*omega from complex modified nodal
// analysis (ports voltage-driven, junction inductances and drive
// resistors excluded).  Throws SingularAtFrequencyError.
CMat mna_admittance(const Circuit& c, double omega);
// Port impedance matrix (ports current-driven).
CMat mna_impedance(const Circuit& c, double omega);
// Same, at arbitrary complex s (used for residue extraction).
CMat mna_admittance_s(const Circuit& c, Complex s);
CMat mna_impedance_s(const Circuit& c, Complex s);

struct ExtractOptions {
    ResponseOptions response;
    ResidueOptions residue;
    // Eigenvalues treated as a lossless pair when |Re| < tol * |lambda|.
    double lossless_tol = 1e-7;
    // Relative frequency floor below which a mode counts as a dc/zero mode.
    double zero_mode_rel = 1e-9;
};

// Pole-residue form of the circuit response: pole frequencies from the
// eigenvalues of the internal lossless dynamics (ports shorted for Y,
// open for Z), residues by Richardson extrapolation of the MNA solve,
// dc matrices by a rational fit on the real-s axis.
PoleResidueResponse extract_pole_residue(const Circuit& c, Kind kind,
                                         const ExtractOptions& opts = {});

// Normal modes (rad/s, ascending) of the full linearized circuit:
// junction inductances included, drive resistors excluded.  This is the
// independent oracle used to judge effective models.
std::vector<double> circuit_normal_modes(const Circuit& c);

// --------------------------------------------------------------------
// Built-in example circuits.
// --------------------------------------------------------------------

enum class ExampleName {
    TlResonator2Port,      // two junctions coupled by one resonator mode
    InductiveCoupling2Port,  // same plus a direct coupling inductor
    PurcellChain3Port,     // qubit + readout resonator + Purcell filter
    CirculatorCapacitive,  // three junctions behind pi-capacitive filters
    CirculatorResonator,   // three junctions behind LC resonator filters
    Isolator,              // circulator with one port terminated
};

ExampleName example_from_string(const std::string& name);
std::string to_string(ExampleName name);

struct ExampleSpec {
    ExampleName name;
    std::map<std::string, double> params;  // engineering units, see builders
};

struct BuiltExample {
    Circuit circuit;
    std::optional<PoleResidueResponse> closed_form;
};

// Default parameters for each example; overridden per key by spec.params.
std::map<std::string, double> example_defaults(ExampleName name);
BuiltExample build_example(const ExampleSpec& spec);

}  // namespace imqed

#endif
