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

#include "imqed/cauer.hpp"

#include <random>

#include "doctest.h"
#include "imqed/netlist.hpp"
#include "imqed/units.hpp"

using namespace imqed;

namespace {

// Random rank-valid response: reciprocal rank-1 poles and nonreciprocal
// rank-2 poles assembled from ratio vectors (so the synthesis invariants
// hold by construction).
PoleResidueResponse random_rank_valid(int n, std::mt19937& rng) {
    std::normal_distribution<double> d;
    std::uniform_real_distribution<double> u(0.9, 1.6);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<AcPole> poles;
    double w = kTwoPi * 3e9;
    int npoles = 3;
    for (int k = 0; k < npoles; ++k) {
        w *= 1.7 * u(rng);
        AcPole p;
        p.omega = w;
        if (coin(rng)) {
            Vec r(n);
            for (int i = 0; i < n; ++i) r(i) = d(rng);
            p.res_sym = r * r.transpose();
            p.res_anti = Mat::Zero(n, n);
        } else {
            Vec nl(n), nr(n);
            for (int i = 0; i < n; ++i) {
                nl(i) = d(rng);
                nr(i) = d(rng);
            }
            // orthogonalize so the rank test is clean
            nr -= nl * (nl.dot(nr) / nl.squaredNorm());
            p.res_sym = nl * nl.transpose() + nr * nr.transpose();
            p.res_anti =
                w * (nl * nr.transpose() - nr * nl.transpose());
        }
        poles.push_back(std::move(p));
    }
    Mat dinf(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dinf(i, j) = d(rng);
    dinf = Mat(dinf * dinf.transpose()) * 1e-13;
    return PoleResidueResponse(Kind::Admittance, n, dinf, Mat(), Mat(),
                               std::move(poles));
}

}  // namespace

TEST_CASE("synthesize: single reciprocal pole recovers the ratio vector") {
    Vec r(2);
    r << 1.0, 2.0;
    AcPole p;
    p.omega = kTwoPi * 5e9;
    p.res_sym = r * r.transpose();
    p.res_anti = Mat::Zero(2, 2);
    PoleResidueResponse resp(Kind::Admittance, 2,
                             1e-13 * Mat::Identity(2, 2), Mat(), Mat(), {p});
    auto syn = synthesize(resp);
    REQUIRE(syn.reciprocal.size() == 1);
    // recovered up to a global sign, fixed to argmax-positive
    CHECK((syn.reciprocal[0].ratio - r).norm() < 1e-12 * r.norm());
}

TEST_CASE("synthesize: orthogonal stages and empty responses") {
    PoleResidueResponse resp(Kind::Admittance, 2,
                             1e-13 * Mat::Identity(2, 2), Mat(), Mat(), {});
    auto syn = synthesize(resp);
    CHECK(syn.reciprocal.empty());
    CHECK(syn.nonreciprocal.empty());
    Mat u = syn.cap_stage.transform;
    CHECK((u * u.transpose() - Mat::Identity(2, 2)).norm() < 1e-12);
    auto back = reconstruct(syn);
    CHECK((back.cap_dc() - resp.cap_dc()).norm() < 1e-14);
    CHECK(back.ac_poles().empty());
}

TEST_CASE("synthesize: impedance route rejects singular A_0") {
    BuiltExample g2 = build_example({ExampleName::InductiveCoupling2Port, {}});
    auto z = extract_pole_residue(g2.circuit, Kind::Impedance);
    CHECK_THROWS_AS(synthesize(z), SingularDcResidueError);
    CHECK_THROWS_WITH_AS(synthesize(z),
                         doctest::Contains("admittance route"),
                         SingularDcResidueError);
    // the admittance route succeeds on the same circuit
    auto y = extract_pole_residue(g2.circuit, Kind::Admittance);
    CHECK_NOTHROW(synthesize(y));
}

TEST_CASE("G4: ratios reproduce the closed-form residues to 1e-10") {
    BuiltExample g4 = build_example({ExampleName::CirculatorCapacitive, {}});
    const auto& cf = *g4.closed_form;
    auto syn = synthesize(cf);
    REQUIRE(syn.nonreciprocal.size() == 1);
    const auto& g = syn.nonreciprocal[0];
    Mat d1 = g.ratio_left * g.ratio_left.transpose() +
             g.ratio_right * g.ratio_right.transpose();
    Mat e1 = g.omega * (g.ratio_left * g.ratio_right.transpose() -
                        g.ratio_right * g.ratio_left.transpose());
    const auto& p = cf.ac_poles()[0];
    CHECK((d1 - p.res_sym).norm() <= 1e-10 * p.res_sym.norm());
    CHECK((e1 - p.res_anti).norm() <= 1e-10 * p.res_anti.norm());
}

TEST_CASE("round-trip: reconstruct(synthesize) fixes residues, idempotent") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        auto resp = random_rank_valid(3, rng);
        auto syn = synthesize(resp);
        auto back = reconstruct(syn);
        REQUIRE(back.ac_poles().size() == resp.ac_poles().size());
        for (size_t k = 0; k < resp.ac_poles().size(); ++k) {
            const auto& a = resp.ac_poles()[k];
            const auto& b = back.ac_poles()[k];
            CHECK(std::abs(a.omega - b.omega) <= 1e-12 * a.omega);
            CHECK((a.res_sym - b.res_sym).norm() <=
                  1e-10 * a.res_sym.norm());
            if (a.res_anti.norm() > 0.0)
                CHECK((a.res_anti - b.res_anti).norm() <=
                      1e-10 * a.res_anti.norm());
        }
        // synthesize(reconstruct(.)) is a fixed point
        auto syn2 = synthesize(back);
        auto back2 = reconstruct(syn2);
        for (size_t k = 0; k < back.ac_poles().size(); ++k) {
            CHECK((back.ac_poles()[k].res_sym - back2.ac_poles()[k].res_sym)
                      .norm() <= 1e-12 * back.ac_poles()[k].res_sym.norm());
        }
    }
}

TEST_CASE("determinism: input scaling does not change eigenvector gauge") {
    std::mt19937 rng(7);
    auto resp = random_rank_valid(3, rng);
    auto syn1 = synthesize(resp);
    // rebuild the same response with scaled residue data and rescale back
    std::vector<AcPole> poles = resp.ac_poles();
    for (auto& p : poles) {
        p.res_sym *= 4.0;
        p.res_anti *= 4.0;
    }
    PoleResidueResponse scaled(resp.kind(), resp.n_ports(), resp.cap_dc(),
                               resp.ind_dc(), resp.nr_dc(), poles);
    auto syn2 = synthesize(scaled);
    for (size_t k = 0; k < syn1.reciprocal.size(); ++k) {
        CHECK((2.0 * syn1.reciprocal[k].ratio - syn2.reciprocal[k].ratio)
                  .norm() < 1e-10 * syn2.reciprocal[k].ratio.norm());
    }
}

TEST_CASE("rank violations raise DegenerateResidue") {
    // rank-2 symmetric residue with zero antisymmetric part: neither a
    // valid reciprocal pole nor a consistent nonreciprocal one
    Vec a(3), b(3);
    a << 1, 0, 0;
    b << 0, 1, 0;
    AcPole p;
    p.omega = kTwoPi * 5e9;
    p.res_sym = a * a.transpose() + 2.0 * (b * b.transpose());
    p.res_anti = Mat::Zero(3, 3);
    p.res_anti(0, 1) = 1e-3 * p.omega;  // wrong magnitude for the pair
    p.res_anti(1, 0) = -1e-3 * p.omega;
    PoleResidueResponse resp(Kind::Admittance, 3,
                             1e-13 * Mat::Identity(3, 3), Mat(), Mat(), {p});
    CHECK_THROWS_AS(synthesize(resp), DegenerateResidueError);
}
