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

#include "imqed/immittance.hpp"

#include <random>

#include "doctest.h"
#include "imqed/units.hpp"

using namespace imqed;

namespace {

Mat random_sym_psd(int n, std::mt19937& rng, double scale) {
    std::normal_distribution<double> d;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = d(rng);
    return scale * (a * a.transpose());
}

Mat random_antisym(int n, std::mt19937& rng, double scale) {
    std::normal_distribution<double> d;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = d(rng);
    return scale * antisym_part(a);
}

PoleResidueResponse random_lossless_impedance(int n, int npoles,
                                              std::mt19937& rng,
                                              bool reciprocal = false) {
    std::uniform_real_distribution<double> u(0.8, 1.2);
    std::vector<AcPole> poles;
    double w = kTwoPi * 4e9;
    for (int k = 0; k < npoles; ++k) {
        AcPole p;
        p.omega = w * u(rng);
        p.res_sym = random_sym_psd(n, rng, 1e8);
        p.res_anti = reciprocal ? Mat::Zero(n, n)
                                : random_antisym(n, rng, 1e8 * p.omega);
        poles.push_back(p);
        w *= 1.9;
    }
    Mat a0 = random_sym_psd(n, rng, 1e2 / 1e-13);
    return PoleResidueResponse(Kind::Impedance, n, Mat(), a0, Mat(), poles);
}

}  // namespace

TEST_CASE("evaluate: a single capacitive dc term gives i w C") {
    double c = 123e-15;
    Mat cap = c * Mat::Identity(3, 3);
    PoleResidueResponse y(Kind::Admittance, 3, cap, Mat(), Mat(), {});
    double w = kTwoPi * 6.1e9;
    CMat val = y.evaluate(w);
    CMat expect = Complex(0.0, w * c) * CMat::Identity(3, 3);
    CHECK((val - expect).norm() < 1e-14 * expect.norm());
}

TEST_CASE("evaluate guards pole neighborhoods and rejects negative omega") {
    AcPole p;
    p.omega = kTwoPi * 5e9;
    p.res_sym = Mat::Identity(2, 2);
    p.res_anti = Mat::Zero(2, 2);
    PoleResidueResponse y(Kind::Admittance, 2, Mat::Identity(2, 2) * 1e-13,
                          Mat(), Mat(), {p});
    CHECK_THROWS_AS(y.evaluate(p.omega * (1.0 + 1e-9)), PoleProximityError);
    CHECK_THROWS_AS(y.evaluate(-1.0), Error);
    CHECK_NOTHROW(y.evaluate(p.omega * 1.1));
}

TEST_CASE("construction rejects coincident poles and bad residues") {
    AcPole p1, p2;
    p1.omega = 1.0e10;
    p1.res_sym = Mat::Identity(2, 2);
    p1.res_anti = Mat::Zero(2, 2);
    p2 = p1;
    p2.omega = 1.0e10 * (1.0 + 1e-9);
    CHECK_THROWS_AS(PoleResidueResponse(Kind::Admittance, 2,
                                        Mat::Identity(2, 2) * 1e-13, Mat(),
                                        Mat(), {p1, p2}),
                    DegeneratePoleError);

    AcPole bad = p1;
    bad.res_sym(0, 1) = 0.5;  // not symmetric
    CHECK_THROWS_AS(PoleResidueResponse(Kind::Admittance, 2,
                                        Mat::Identity(2, 2) * 1e-13, Mat(),
                                        Mat(), {bad}),
                    Error);
}

TEST_CASE("split: reciprocal response has zero nonreciprocal part") {
    std::mt19937 rng(7);
    auto z = random_lossless_impedance(3, 2, rng, /*reciprocal=*/true);
    auto parts = z.split();
    for (double w : {1e9, 7e9, 4e10}) {
        CHECK(parts.nonreciprocal(w).norm() <
              1e-12 * parts.reciprocal(w).norm());
    }
}

TEST_CASE("split: dc + ac reproduces evaluate along the same path") {
    std::mt19937 rng(11);
    auto z = random_lossless_impedance(2, 3, rng);
    AcPole nr;
    nr.omega = kTwoPi * 2e9;
    nr.res_sym = random_sym_psd(2, rng, 1e8);
    nr.res_anti = random_antisym(2, rng, 1e8 * nr.omega);
    auto parts = z.split();
    std::uniform_real_distribution<double> u(1e8, 9e10);
    for (int k = 0; k < 100; ++k) {
        double w = u(rng);
        if (z.near_pole(w)) continue;
        CMat full = z.evaluate(w);
        CMat sum = parts.dc(w) + parts.ac(w);
        CHECK((full - sum).norm() == 0.0);  // identical summation path
        CMat rec = parts.reciprocal(w) + parts.nonreciprocal(w);
        CHECK((full - rec).norm() <= 1e-12 * full.norm());
    }
}

TEST_CASE("residue_at: simple scalar pole") {
    auto f = [](Complex s) {
        CMat m(1, 1);
        m(0, 0) = 1.0 / (s - Complex(0.0, 1e10));
        return m;
    };
    CMat r = residue_at(f, 1e10);
    CHECK(std::abs(r(0, 0) - 1.0) < 1e-10);
}

TEST_CASE("residue_at: recovers known residues of rational matrices") {
    std::mt19937 rng(23);
    auto z = random_lossless_impedance(3, 3, rng);
    auto eval = [&](Complex s) { return z.evaluate_s(s); };
    for (const auto& p : z.ac_poles()) {
        CMat res = residue_at(eval, p.omega);
        Mat res_sym = 2.0 * res.real();
        Mat res_anti = -2.0 * p.omega * res.imag();
        CHECK((res_sym - p.res_sym).norm() < 1e-8 * p.res_sym.norm());
        CHECK((res_anti - p.res_anti).norm() < 1e-8 * p.res_anti.norm());
    }
}

TEST_CASE("residue_at: error taxonomy") {
    auto regular = [](Complex s) {
        CMat m(1, 1);
        m(0, 0) = s;  // analytic, no pole
        return m;
    };
    CHECK_THROWS_AS(residue_at(regular, 1e10), NotAPoleError);

    auto second_order = [](Complex s) {
        Complex d = s - Complex(0.0, 1e10);
        CMat m(1, 1);
        m(0, 0) = 1.0 / (d * d);
        return m;
    };
    CHECK_THROWS_AS(residue_at(second_order, 1e10), HigherOrderPoleError);
}

TEST_CASE("scattering: zero impedance reflects with S = -I") {
    PoleResidueResponse z(Kind::Impedance, 2, Mat(),
                          Mat::Zero(2, 2), Mat(), {});
    CMat s = scattering(z, 50.0, kTwoPi * 5e9);
    CHECK((s + CMat::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("scattering: lossless impedance gives unitary S") {
    std::mt19937 rng(31);
    auto z = random_lossless_impedance(3, 3, rng);
    std::uniform_real_distribution<double> u(5e8, 9e10);
    int checked = 0;
    while (checked < 50) {
        double w = u(rng);
        if (z.near_pole(w)) continue;
        CMat s = scattering(z, 50.0, w);
        CHECK((s * s.adjoint() - CMat::Identity(3, 3)).norm() < 1e-10);
        ++checked;
    }
}

TEST_CASE("validate: reports PSD violations, passes valid input") {
    std::mt19937 rng(5);
    auto good = random_lossless_impedance(2, 2, rng);
    CHECK(good.validate().empty());

    // Negative residue eigenvalue -1e-3: constructed with lax tolerances,
    // reported against the default ones.
    AcPole p;
    p.omega = 1e10;
    p.res_sym = Mat::Identity(2, 2);
    p.res_sym(1, 1) = -1e-3;
    p.res_anti = Mat::Zero(2, 2);
    ResponseOptions lax;
    lax.psd_tol = 1.0;
    PoleResidueResponse bad(Kind::Admittance, 2, Mat::Identity(2, 2) * 1e-13,
                            Mat(), Mat(), {p}, lax);
    bool flagged = false;
    for (const auto& v : bad.validate())
        if (v.what.find("residue not PSD") != std::string::npos)
            flagged = true;
    CHECK(flagged);
}

TEST_CASE("pole classification threshold") {
    AcPole rec;
    rec.omega = 1e10;
    rec.res_sym = Mat::Identity(2, 2);
    rec.res_anti = Mat::Zero(2, 2);
    CHECK(rec.reciprocal());
    rec.res_anti << 0, 1e-11, -1e-11, 0;
    CHECK(rec.reciprocal());  // below 1e-10 relative
    rec.res_anti << 0, 1e-3, -1e-3, 0;
    CHECK(!rec.reciprocal());
}

TEST_CASE("response.v1 JSON round-trip") {
    std::mt19937 rng(17);
    auto z = random_lossless_impedance(2, 2, rng);
    auto z2 = response_from_json(response_to_json(z));
    CHECK(z2.kind() == z.kind());
    REQUIRE(z2.ac_poles().size() == z.ac_poles().size());
    for (size_t k = 0; k < z.ac_poles().size(); ++k) {
        CHECK(std::abs(z2.ac_poles()[k].omega - z.ac_poles()[k].omega) <
              1e-9 * z.ac_poles()[k].omega);
        CHECK((z2.ac_poles()[k].res_sym - z.ac_poles()[k].res_sym).norm() <
              1e-9 * z.ac_poles()[k].res_sym.norm());
    }
    CHECK((z2.ind_dc() - z.ind_dc()).norm() < 1e-12 * z.ind_dc().norm());
    // A response without the mandatory units header is rejected.
    CHECK_THROWS_AS(response_from_json("{\"kind\":\"impedance\"}"), Error);
}
