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

#include "imqed/netlist.hpp"

#include <random>

#include "doctest.h"
#include "imqed/units.hpp"

using namespace imqed;

TEST_CASE("parse: one-node one-port circuit") {
    Circuit c = parse("C n1 gnd 100fF; port J1 n1 gnd EJ=11.37GHz CJ=100fF");
    CHECK(c.n_nodes() == 1);
    CHECK(c.n_ports() == 1);
    const auto& j = std::get<JunctionPort>(c.ports[0]);
    CHECK(j.c_j == doctest::Approx(100e-15));
    CHECK(j.e_j == doctest::Approx(kPlanck * 11.37e9));
    const auto& cap = std::get<Capacitor>(c.elements[0]);
    CHECK(cap.farad == doctest::Approx(100e-15));
}

TEST_CASE("parse: self-loops and malformed input are rejected") {
    CHECK_THROWS_AS(parse("C n1 n1 1fF\nport J1 n1 gnd EJ=1GHz CJ=1fF"),
                    SemanticError);
    CHECK_THROWS_AS(parse("C n1 gnd nonsense"), SyntaxError);
    CHECK_THROWS_AS(parse("Q n1 gnd 1fF"), SyntaxError);
    CHECK_THROWS_AS(parse("X a b c phi=0 R=50\nport J1 a gnd EJ=1GHz CJ=1fF"),
                    SemanticError);
    // disconnected node
    CHECK_THROWS_AS(
        parse("C n1 gnd 1fF\nC n2 n3 1fF\nport J1 n1 gnd EJ=1GHz CJ=1fF"),
        SemanticError);
    // duplicate label
    CHECK_THROWS_AS(parse("C a gnd 1fF\nC b gnd 1fF\n"
                          "port J1 a gnd EJ=1GHz CJ=1fF\n"
                          "port J1 b gnd EJ=1GHz CJ=1fF"),
                    SemanticError);
}

TEST_CASE("mna: single shunt capacitor port gives Y = i w C") {
    Circuit c = parse("port J1 n1 gnd EJ=10GHz CJ=80fF");
    double w = kTwoPi * 5e9;
    CMat y = mna_admittance(c, w);
    CHECK(std::abs(y(0, 0) - Complex(0, w * 80e-15)) < 1e-18);
    CMat z = mna_impedance(c, w);
    CHECK(std::abs(z(0, 0) * y(0, 0) - 1.0) < 1e-12);
}

TEST_CASE("mna: junction inductance is excluded from the response") {
    BuiltExample g1 = build_example({ExampleName::TlResonator2Port, {}});
    BuiltExample g1b = build_example(
        {ExampleName::TlResonator2Port, {{"ej1_ghz", 25.0}, {"ej2_ghz", 3.0}}});
    double w = kTwoPi * 6.3e9;
    CHECK((mna_admittance(g1.circuit, w) - mna_admittance(g1b.circuit, w))
              .norm() == 0.0);
}

TEST_CASE("mna: Y and Z from independent solves are mutual inverses") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(1e9, 8e10);
    for (auto name : {ExampleName::TlResonator2Port,
                      ExampleName::CirculatorCapacitive,
                      ExampleName::PurcellChain3Port}) {
        BuiltExample ex = build_example({name, {}});
        int n = ex.circuit.n_ports();
        for (int k = 0; k < 10; ++k) {
            double w = u(rng);
            CMat y = mna_admittance(ex.circuit, w);
            CMat z = mna_impedance(ex.circuit, w);
            CHECK((y * z - CMat::Identity(n, n)).norm() < 1e-9);
        }
    }
}

TEST_CASE("mna: lossless responses are anti-Hermitian at real frequency") {
    BuiltExample g4 = build_example({ExampleName::CirculatorCapacitive, {}});
    for (double f : {1.0, 5.0, 20.0}) {
        CMat y = mna_admittance(g4.circuit, kTwoPi * f * 1e9);
        // symmetric part purely imaginary, antisymmetric part purely real
        CMat sym = sym_part(y);
        CMat anti = antisym_part(y);
        CHECK(sym.real().norm() < 1e-12 * y.norm());
        CHECK(anti.imag().norm() < 1e-12 * y.norm());
    }
}

TEST_CASE("G1: MNA matches the closed form at dispersive accuracy") {
    BuiltExample g1 = build_example({ExampleName::TlResonator2Port, {}});
    REQUIRE(g1.closed_form.has_value());
    const auto& cf = *g1.closed_form;
    double cc = 5.1e-15, cj = 51e-15;
    double cr = 1.0 / (50.0 * kTwoPi * 7.07e9);
    double tol = 3.0 * std::pow(std::max(cc / cj, cc / cr), 2);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(1e9, 6e10);
    for (int k = 0; k < 10; ++k) {
        double w = u(rng);
        if (cf.near_pole(w)) continue;
        CMat exact = mna_impedance(g1.circuit, w);
        CMat approx = cf.evaluate(w);
        CHECK((exact - approx).norm() <= tol * exact.norm());
    }
    // the closed-form pole frequency is exact for this circuit
    auto poles = extract_pole_residue(g1.circuit, Kind::Impedance).ac_poles();
    REQUIRE(poles.size() == 1);
    CHECK(poles[0].omega ==
          doctest::Approx(cf.ac_poles()[0].omega).epsilon(1e-9));
}

TEST_CASE("G1: impedance residue reconstructs A1 = rz^2 * ones") {
    BuiltExample g1 = build_example({ExampleName::TlResonator2Port, {}});
    auto resp = extract_pole_residue(g1.circuit, Kind::Impedance);
    REQUIRE(resp.ac_poles().size() == 1);
    const auto& p = resp.ac_poles()[0];
    Mat a1 = g1.closed_form->ac_poles()[0].res_sym;
    double cc = 5.1e-15, cj = 51e-15;
    double cr = 1.0 / (50.0 * kTwoPi * 7.07e9);
    double tol = 3.0 * std::max(cc / cj, cc / cr);
    CHECK((p.res_sym - a1).norm() <= tol * a1.norm());
    CHECK(p.res_anti.norm() < 1e-8 * p.res_sym.norm());  // reciprocal
}

TEST_CASE("extraction: single LC shunt") {
    Circuit c = parse(
        "C n1 gnd 400fF\nL n1 gnd 2nH\nport J1 n1 gnd EJ=10GHz CJ=100fF");
    auto resp = extract_pole_residue(c, Kind::Impedance);
    REQUIRE(resp.ac_poles().size() == 1);
    // Impedance pole: ports open, so the junction shunt loads the LC.
    double w_expect = 1.0 / std::sqrt(2e-9 * 500e-15);
    CHECK(resp.ac_poles()[0].omega == doctest::Approx(w_expect).epsilon(1e-9));
    CHECK(resp.ac_poles()[0].res_sym(0, 0) > 0.0);
    CHECK(resp.ac_poles()[0].reciprocal());

    // Two ports sharing the LC: the residue is a rank-1 2x2 matrix.
    Circuit c2 = parse(
        "C n1 gnd 400fF\nL n1 gnd 2nH\nC p1 n1 5fF\nC p2 n1 5fF\n"
        "port J1 p1 gnd EJ=10GHz CJ=100fF\n"
        "port J2 p2 gnd EJ=10GHz CJ=100fF");
    auto resp2 = extract_pole_residue(c2, Kind::Impedance);
    REQUIRE(resp2.ac_poles().size() == 1);
    Eigen::SelfAdjointEigenSolver<Mat> es(resp2.ac_poles()[0].res_sym);
    CHECK(es.eigenvalues()(0) < 1e-8 * es.eigenvalues()(1));  // rank 1
}

TEST_CASE("G4: extracted ac pole sits at w_y(phi)") {
    double phi = kPi / 3.0, r = 50.0, cc = 10e-15, cg = 150e-15;
    BuiltExample g4 = build_example({ExampleName::CirculatorCapacitive, {}});
    auto resp = extract_pole_residue(g4.circuit, Kind::Admittance);
    REQUIRE(resp.ac_poles().size() == 1);
    double wy = std::tan(phi / 2.0) / (r * (cc + cg));
    CHECK(resp.ac_poles()[0].omega == doctest::Approx(wy).epsilon(1e-10));
    CHECK(!resp.ac_poles()[0].reciprocal());
}

TEST_CASE("G4: closed form matches MNA and the extracted residues") {
    BuiltExample g4 = build_example({ExampleName::CirculatorCapacitive, {}});
    REQUIRE(g4.closed_form.has_value());
    const auto& cf = *g4.closed_form;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(5e8, 3e11);
    for (int k = 0; k < 20; ++k) {
        double w = u(rng);
        if (cf.near_pole(w)) continue;
        CMat a = mna_admittance(g4.circuit, w);
        CMat b = cf.evaluate(w);
        CHECK((a - b).norm() < 1e-10 * a.norm());
    }
    auto resp = extract_pole_residue(g4.circuit, Kind::Admittance);
    const auto& pe = resp.ac_poles()[0];
    const auto& pc = cf.ac_poles()[0];
    CHECK((pe.res_sym - pc.res_sym).norm() < 1e-6 * pc.res_sym.norm());
    CHECK((pe.res_anti - pc.res_anti).norm() < 1e-6 * pc.res_anti.norm());
    CHECK((resp.nr_dc() - cf.nr_dc()).norm() < 1e-8 * cf.nr_dc().norm());
    CHECK((resp.cap_dc() - cf.cap_dc()).norm() < 1e-8 * cf.cap_dc().norm());
}

TEST_CASE("extraction round-trip: evaluate vs MNA on every example") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(5e8, 1e11);
    for (auto name : {ExampleName::TlResonator2Port,
                      ExampleName::InductiveCoupling2Port,
                      ExampleName::CirculatorCapacitive,
                      ExampleName::PurcellChain3Port}) {
        BuiltExample ex = build_example({name, {}});
        auto resp = extract_pole_residue(ex.circuit, Kind::Admittance);
        int checked = 0;
        while (checked < 50) {
            double w = u(rng);
            if (resp.near_pole(w)) continue;
            CMat a = mna_admittance(ex.circuit, w);
            CMat b = resp.evaluate(w);
            CHECK((a - b).norm() < 1e-7 * a.norm());
            ++checked;
        }
    }
}

TEST_CASE("G2: dc impedance residue has rank deficiency exactly one") {
    BuiltExample g2 = build_example({ExampleName::InductiveCoupling2Port, {}});
    auto resp = extract_pole_residue(g2.circuit, Kind::Impedance);
    Eigen::SelfAdjointEigenSolver<Mat> es(resp.ind_dc());
    // two ports: one zero eigenvalue, one finite
    CHECK(std::abs(es.eigenvalues()(0)) < 1e-8 * es.eigenvalues()(1));
    CHECK(es.eigenvalues()(1) > 0.0);
}

TEST_CASE("G2: admittance closed form at dispersive accuracy") {
    BuiltExample g2 = build_example({ExampleName::InductiveCoupling2Port, {}});
    REQUIRE(g2.closed_form.has_value());
    const auto& cf = *g2.closed_form;
    auto resp = extract_pole_residue(g2.circuit, Kind::Admittance);
    // exact inductive dc block
    CHECK((resp.ind_dc() - cf.ind_dc()).norm() < 1e-8 * cf.ind_dc().norm());
    // pole and capacitive block to dispersive order
    double rcj = 0.1, rcr = 10e-15 * 50.0 * kTwoPi * 7.8e9;
    double tol = 5.0 * std::max(rcj, rcr) * std::max(rcj, rcr);
    CHECK(std::abs(resp.ac_poles()[0].omega - cf.ac_poles()[0].omega) <
          tol * cf.ac_poles()[0].omega);
    CHECK((resp.cap_dc() - cf.cap_dc()).norm() < tol * cf.cap_dc().norm());
}

TEST_CASE("example netlists round-trip through the parser") {
    for (auto name :
         {ExampleName::CirculatorCapacitive, ExampleName::Isolator,
          ExampleName::CirculatorResonator, ExampleName::PurcellChain3Port}) {
        BuiltExample ex = build_example({name, {}});
        Circuit reparsed = parse(to_netlist(ex.circuit));
        CHECK(reparsed.n_nodes() == ex.circuit.n_nodes());
        CHECK(reparsed.n_ports() == ex.circuit.n_ports());
        double w = kTwoPi * 3.3e9;
        CHECK((mna_admittance(reparsed, w) - mna_admittance(ex.circuit, w))
                  .norm() < 1e-15);
    }
}

TEST_CASE("build_example rejects unknown parameters") {
    CHECK_THROWS_AS(
        build_example({ExampleName::CirculatorCapacitive, {{"bogus", 1.0}}}),
        ConfigError);
}

TEST_CASE("circuit normal modes: two detuned LC oscillators") {
    // E_J tiny, so the junction inductance is effectively open and the two
    // LC modes dominate the spectrum.
    Circuit c = parse(
        "C a gnd 100fF\nL a gnd 4nH\nC b gnd 100fF\nL b gnd 1nH\n"
        "C a b 2fF\nport J1 a gnd EJ=0.0001GHz CJ=1fF");
    auto modes = circuit_normal_modes(c);
    REQUIRE(modes.size() >= 2);
    double w1 = 1.0 / std::sqrt(4e-9 * 101e-15);
    double w2 = 1.0 / std::sqrt(1e-9 * 102e-15);
    auto nearest = [&](double w) {
        double best = modes.front();
        for (double m : modes)
            if (std::abs(m - w) < std::abs(best - w)) best = m;
        return best;
    };
    CHECK(nearest(w1) == doctest::Approx(w1).epsilon(0.05));
    CHECK(nearest(w2) == doctest::Approx(w2).epsilon(0.05));
}
