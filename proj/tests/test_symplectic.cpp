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

#include "imqed/symplectic.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <random>

#include "doctest.h"
#include "imqed/units.hpp"

using namespace imqed;

namespace {

Mat random_sym(int n, std::mt19937& rng, double scale) {
    std::normal_distribution<double> d;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = d(rng);
    return scale * sym_part(a);
}

QuadraticSystem two_oscillators(double wa, double wb, double g_xx) {
    QuadraticSystem sys;
    sys.h = Mat::Zero(4, 4);
    sys.h(0, 0) = wa;
    sys.h(1, 1) = wb;
    sys.h(2, 2) = wa;
    sys.h(3, 3) = wb;
    sys.h(0, 1) = sys.h(1, 0) = g_xx;
    sys.pairs = {{Sector::Qubit, "a", wa, 0.0},
                 {Sector::ReciprocalInner, "b", wb, 0.0}};
    return sys;
}

}  // namespace

TEST_CASE("anticommutator series: zero generator, first term, convergence") {
    std::mt19937 rng(3);
    Mat h = random_sym(6, rng, 1.0);
    Mat zero = Mat::Zero(6, 6);
    CHECK((anticommutator_series(h, zero, 5) - h).norm() == 0.0);

    Mat a = random_sym(6, rng, 0.05);
    // n = 1 term is {JA, H}_T = JAH + H(JA)^T
    Mat j = QuadraticSystem{Mat::Zero(6, 6), {{}, {}, {}}}.j_form();
    Mat ja = j * a;
    Mat first = h + ja * h + h * ja.transpose();
    CHECK((anticommutator_series(h, a, 1) - first).norm() < 1e-14);

    Mat series = anticommutator_series(h, a, 10);
    Mat exact = conjugate_exact(h, a);
    CHECK((series - exact).norm() < 1e-9 * exact.norm());
}

TEST_CASE("sw_generator: zero coupling gives zero generator") {
    auto sys = two_oscillators(5.0, 7.0, 0.0);
    auto map = sw_generator(sys, {0});
    CHECK(map.generator->norm() == 0.0);
    CHECK((map.s - Mat::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("sw_generator: solves the first-order condition") {
    std::mt19937 rng(11);
    std::normal_distribution<double> d;
    QuadraticSystem sys;
    int n = 5;
    sys.h = Mat::Zero(2 * n, 2 * n);
    std::vector<double> w = {4.1, 5.3, 8.2, 11.0, 13.7};
    for (int k = 0; k < n; ++k) {
        sys.h(k, k) = w[k];
        sys.h(n + k, n + k) = w[k];
        sys.pairs.push_back(
            {k < 2 ? Sector::Qubit : Sector::ReciprocalInner, "", w[k], 0.0});
    }
    // random cross-sector coupling in all four quadrature blocks
    for (int a : {0, 1})
        for (int b : {2, 3, 4})
            for (int qa : {0, n})
                for (int qb : {0, n}) {
                    double v = 0.1 * d(rng);
                    sys.h(qa + a, qb + b) = v;
                    sys.h(qb + b, qa + a) = v;
                }
    auto map = sw_generator(sys, {0, 1});
    const Mat& a1 = *map.generator;
    CHECK(rel_asymmetry(a1) < 1e-12);

    // {J A1, H0}_T must cancel the cross block exactly
    Mat h0 = Mat::Zero(2 * n, 2 * n);
    h0.diagonal() = sys.h.diagonal();
    Mat hnd = sys.h - h0;
    Mat j = sys.j_form();
    Mat lhs = (j * a1) * h0;
    lhs = Mat(lhs + lhs.transpose().eval());
    CHECK((lhs + hnd).norm() < 1e-12 * hnd.norm());

    // every produced map is symplectic
    CHECK(map.symplectic_defect() < 1e-10);
}

TEST_CASE("sw_generator: resonant pairs are rejected with indices") {
    auto sys = two_oscillators(5.0, 5.0, 0.1);
    try {
        sw_generator(sys, {0});
        FAIL("expected ResonantPairError");
    } catch (const ResonantPairError& e) {
        CHECK(e.index_a == 0);
        CHECK(e.index_b == 1);
    }
}

TEST_CASE("sw: pure flux-flux coupling reduces to the textbook form") {
    double wa = 5.0, wb = 8.0, g = 0.05;
    auto sys = two_oscillators(wa, wb, g);
    auto res = sw_block_diagonalize(sys, {0});
    double theta_ab = wa * wa - wb * wb;
    // (1/2) M M [1/Theta + 1/Theta] with a single inner mode
    double expected = 0.5 * wb * g * g * (2.0 / theta_ab);
    CHECK(res.h_eff_a(0, 0) - wa == doctest::Approx(expected).epsilon(1e-12));
    // diagonal xp correction vanishes
    CHECK(std::abs(res.h_eff_a(0, 1)) < 1e-15);
}

TEST_CASE("sw: dressed splitting matches exact normal modes to O(g^4)") {
    double wa = 5.0, wb = 8.0;
    for (double g : {1e-3, 3e-3, 1e-2, 3e-2}) {
        auto sys = two_oscillators(wa, wb, g);
        auto res = sw_block_diagonalize(sys, {0});
        QuadraticSystem eff_a;
        eff_a.h = res.h_eff_a;
        eff_a.pairs = {{Sector::Qubit, "a", wa, 0.0}};
        double w_eff = normal_modes(eff_a)[0];
        double w_exact = normal_modes(sys)[0];
        double delta = wb - wa;
        double budget = 50.0 * std::pow(g, 4) / std::pow(delta, 3);
        CHECK(std::abs(w_eff - w_exact) < budget + 1e-12);
    }
}

TEST_CASE("sw: zero coupling leaves the form unchanged") {
    auto sys = two_oscillators(4.0, 9.0, 0.0);
    auto res = sw_block_diagonalize(sys, {0});
    CHECK((res.h_effective - sys.h).norm() == 0.0);
    CHECK((res.map.s - Mat::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("sw: off-diagonal residual scales as k^2") {
    // Three pairs, sector A = {0, 1} with an in-sector perturbation so
    // the leading residual term {JA1, H'_D} is present.
    std::vector<double> ks, resids;
    for (double k = 3e-3; k < 0.3; k *= 1.9) {
        QuadraticSystem sys;
        sys.h = Mat::Zero(6, 6);
        double w[3] = {5.0, 6.1, 9.3};
        for (int i = 0; i < 3; ++i) {
            sys.h(i, i) = w[i];
            sys.h(3 + i, 3 + i) = w[i];
            sys.pairs.push_back({i < 2 ? Sector::Qubit
                                       : Sector::ReciprocalInner,
                                 "", w[i], 0.0});
        }
        sys.h(0, 1) = sys.h(1, 0) = 0.5 * k;  // H'_D within A
        sys.h(0, 2) = sys.h(2, 0) = k;        // A-B couplings
        sys.h(1, 5) = sys.h(5, 1) = 0.7 * k;
        auto res = sw_block_diagonalize(sys, {0, 1});
        ks.push_back(std::log(k));
        resids.push_back(std::log(res.offdiag_residual));
    }
    // log-log slope
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = static_cast<int>(ks.size());
    for (int i = 0; i < n; ++i) {
        sx += ks[i];
        sy += resids[i];
        sxx += ks[i] * ks[i];
        sxy += ks[i] * resids[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("worked example: three oscillators with gyrator couplings") {
    // Two capacitively coupled oscillators nonreciprocally coupled to a
    // third; the second-order corrections have closed forms.
    double l1 = 10e-9, c1 = 100e-15, l2 = 12e-9, c2 = 90e-15;
    double l3 = 5e-9, c3 = 120e-15;
    double ck = 5e-12, kg = 4e8;
    double w1 = 1.0 / std::sqrt(l1 * c1), w2 = 1.0 / std::sqrt(l2 * c2);
    double wb = 1.0 / std::sqrt(l3 * c3);
    double z1 = std::sqrt(l1 / c1), z2 = std::sqrt(l2 / c2),
           z3 = std::sqrt(l3 / c3);
    double kq = 1.0 / (std::sqrt(z1 * z2) * ck);
    double kqq1 = 1.0 / (std::sqrt(z1 * z3) * ck);
    double kqq2 = 1.0 / (std::sqrt(z2 * z3) * ck);
    double kpq1 = std::sqrt(z1 / z3) * kg;  // phi_a q_b
    double kpq2 = std::sqrt(z2 / z3) * kg;
    double kqp1 = std::sqrt(z3 / z1) * kg;  // q_a phi_b
    double kqp2 = std::sqrt(z3 / z2) * kg;

    QuadraticSystem sys;
    int n = 3;
    sys.h = Mat::Zero(6, 6);
    double w[3] = {w1, w2, wb};
    for (int k = 0; k < n; ++k) {
        sys.h(k, k) = w[k];
        sys.h(n + k, n + k) = w[k];
        sys.pairs.push_back(
            {k < 2 ? Sector::Qubit : Sector::ReciprocalInner, "", w[k], 0.0});
    }
    sys.h(n + 0, n + 1) = sys.h(n + 1, n + 0) = kq;  // q1 q2
    double kpqs[2] = {kpq1, kpq2}, kqps[2] = {kqp1, kqp2},
           kqqs[2] = {kqq1, kqq2};
    for (int i = 0; i < 2; ++i) {
        sys.h(i, n + 2) = sys.h(n + 2, i) = kpqs[i];        // phi_i q_B
        sys.h(n + i, 2) = sys.h(2, n + i) = -kqps[i];       // q_i phi_B
        sys.h(n + i, n + 2) = sys.h(n + 2, n + i) = kqqs[i];  // q_i q_B
    }

    auto res = sw_block_diagonalize(sys, {0, 1});

    double ws[2] = {w1, w2};
    double theta[2] = {w1 * w1 - wb * wb, w2 * w2 - wb * wb};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            double both = 1.0 / theta[i] + 1.0 / theta[j];
            double phiphi = 0.5 * wb * kpqs[i] * kpqs[j] * both +
                            ws[i] / (2.0 * theta[i]) * kqps[i] * kpqs[j] +
                            ws[j] / (2.0 * theta[j]) * kqps[j] * kpqs[i];
            double phiq = 0.5 * wb * kpqs[i] * kqqs[j] * both +
                          ws[i] / (2.0 * theta[i]) *
                              (kqps[i] * kqqs[j] - kqqs[i] * kqps[j]);
            double qq = 0.5 * wb * (kqps[i] * kqps[j] + kqqs[i] * kqqs[j]) *
                            both +
                        ws[i] / (2.0 * theta[i]) * kpqs[i] * kqps[j] +
                        ws[j] / (2.0 * theta[j]) * kpqs[j] * kqps[i] +
                        (i == j ? 0.0 : kq);
            double base = (i == j) ? ws[i] : 0.0;
            CHECK(res.h_eff_a(i, j) ==
                  doctest::Approx(base + phiphi).epsilon(1e-12));
            CHECK(res.h_eff_a(i, 2 + j) == doctest::Approx(phiq).epsilon(1e-12));
            CHECK(res.h_eff_a(2 + i, 2 + j) ==
                  doctest::Approx(base + qq).epsilon(1e-12));
        }
    }
}

TEST_CASE("eliminate_nondynamical: gyrator-capacitor resonator") {
    // Raw duo blocks: H_xx = w^2/4, H_px = -Z/2, H_pp = 1, with
    // Z = w * [[0,-1],[1,0]] in Cauer units.
    double w = 2.3e10;
    QuadraticSystem sys;
    sys.h = Mat::Zero(4, 4);
    Mat wmat(2, 2);
    wmat << 0, -1, 1, 0;
    sys.h.topLeftCorner(2, 2) = (w * w / 4.0) * Mat::Identity(2, 2);
    sys.h.bottomRightCorner(2, 2) = Mat::Identity(2, 2);
    sys.h.bottomLeftCorner(2, 2) = -(w / 2.0) * wmat;
    sys.h.topRightCorner(2, 2) = sys.h.bottomLeftCorner(2, 2).transpose();
    sys.pairs = {{Sector::NonreciprocalInner, "gL", w, 0.0},
                 {Sector::NonreciprocalInner, "gR", w, 0.0}};

    auto red = eliminate_nondynamical(sys, Elimination::Exact);
    REQUIRE(red.n_pairs() == 1);
    auto modes = normal_modes(red);
    REQUIRE(modes.size() == 1);
    CHECK(modes[0] == doctest::Approx(w).epsilon(1e-12));

    // zero gyrators: identity
    auto sys2 = two_oscillators(3.0, 4.0, 0.1);
    sys2.pairs[1].sector = Sector::Qubit;
    auto same = eliminate_nondynamical(sys2, Elimination::Exact);
    CHECK((same.h - sys2.h).norm() == 0.0);
}

TEST_CASE("normal_modes: basics and symplectic invariance") {
    QuadraticSystem sys;
    sys.h = Mat::Zero(2, 2);
    sys.h(0, 0) = sys.h(1, 1) = 7.5;
    sys.pairs = {{Sector::Qubit, "", 7.5, 0.0}};
    auto m = normal_modes(sys);
    REQUIRE(m.size() == 1);
    CHECK(m[0] == doctest::Approx(7.5).epsilon(1e-14));

    std::mt19937 rng(5);
    auto big = two_oscillators(5.0, 8.0, 0.4);
    Mat a = random_sym(4, rng, 0.1);
    Mat aj = a * big.j_form();
    Mat s = aj.exp();
    QuadraticSystem conj = big;
    conj.h = conjugate_form(big.h, s);
    auto m1 = normal_modes(big);
    auto m2 = normal_modes(conj);
    REQUIRE(m1.size() == m2.size());
    for (size_t k = 0; k < m1.size(); ++k)
        CHECK(m1[k] == doctest::Approx(m2[k]).epsilon(1e-10));

    // an unstable form is flagged
    QuadraticSystem bad;
    bad.h = Mat::Zero(2, 2);
    bad.h(0, 0) = -1.0;
    bad.h(1, 1) = 1.0;
    bad.pairs = {{Sector::Qubit, "", 1.0, 0.0}};
    CHECK_THROWS_AS(normal_modes(bad), UnstableSystemError);
}
