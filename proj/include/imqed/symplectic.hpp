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

#ifndef IMQED_SYMPLECTIC_HPP
#define IMQED_SYMPLECTIC_HPP

#include <optional>
#include <string>
#include <vector>

#include "imqed/errors.hpp"
#include "imqed/linalg.hpp"

namespace imqed {

enum class Sector { Qubit, ReciprocalInner, NonreciprocalInner, Nondynamical };

struct PairInfo {
    Sector sector = Sector::Qubit;
    std::string label;
    // Oscillation frequency of the pair when decoupled (rad/s); for
    // nonreciprocal duos this is the gyrator frequency w_g.
    double omega = 0.0;
    // Scale z such that the original flux coordinate is sqrt(hbar z) x.
    double z_scale = 0.0;
};

// Real symmetric quadratic form over canonical pairs, coordinates
// ordered (x_1..x_N, p_1..p_N) with J = [[0, I], [-I, 0]].
struct QuadraticSystem {
    Mat h;
    std::vector<PairInfo> pairs;

    int n_pairs() const { return static_cast<int>(pairs.size()); }
    int dim() const { return 2 * n_pairs(); }
    int x_index(int k) const { return k; }
    int p_index(int k) const { return n_pairs() + k; }
    Mat j_form() const;
    std::vector<int> sector_pairs(Sector s) const;
};

struct SymplecticMap {
    Mat s;                         // new = s * old
    std::optional<Mat> generator;  // A with s = exp(A J), when applicable

    // || s J s^T - J || / || J ||
    double symplectic_defect() const;
};

// Transform h under new coordinates X' = S X:  h' = S^-T h S^-1.
Mat conjugate_form(const Mat& h, const Mat& s);

// Truncated expansion sum_{n<=order} (1/n!) {JA, H}_T^(n) with the
// transpose anticommutator {D,B}_T = D B + B^T D^T; converges to
// exp(JA) H exp(-AJ) as order grows.
Mat anticommutator_series(const Mat& h, const Mat& a_gen, int order);

// Dense-exponential conjugation exp(JA) H exp(-AJ) (oracle-grade).
Mat conjugate_exact(const Mat& h, const Mat& a_gen);

struct SwOptions {
    double resonant_tol = 1e-9;  // |Theta| below tol * max(w^2) is resonant
    double warn_ratio = 0.3;     // k/Delta warn threshold
    int order = 2;               // 2 or 3
};

struct SwResult {
    Mat h_effective;       // transformed quadratic form (full)
    Mat h_eff_a, h_eff_b;  // diagonal blocks in pair ordering of each sector
    SymplecticMap map;
    double offdiag_residual = 0.0;  // leftover A<->B block norm
    std::vector<std::string> warnings;
};

// First-order generator A^(1) for the split (a_pairs | rest); the
// system's diagonal must already hold the bare frequencies.
SymplecticMap sw_generator(const QuadraticSystem& sys,
                           const std::vector<int>& a_pairs,
                           const SwOptions& opts = {});

// Block diagonalization of the (a_pairs | rest) split to the given
// order.  Throws ResonantPairError.
SwResult sw_block_diagonalize(const QuadraticSystem& sys,
                              const std::vector<int>& a_pairs,
                              const SwOptions& opts = {});

enum class Elimination { Exact, Approximate };

// Removes the zero-frequency partner mode of every gyrator duo.  The
// system must be in raw assembled form: qubit pairs (x = flux, p =
// charge), then inner pairs (x = loop charge, p = its momentum), with
// each nonreciprocal resonator owning two consecutive pairs.  The exact
// variant first applies the triangular map that moves the kinetic
// coupling out of the momenta; the approximate variant just drops the
// zero modes after the gyrator-sector mixing.
QuadraticSystem eliminate_nondynamical(const QuadraticSystem& sys,
                                       Elimination kind = Elimination::Exact);

// Positive normal-mode frequencies of the flow J h, ascending.
// Throws UnstableSystemError if an eigenvalue leaves the imaginary axis.
std::vector<double> normal_modes(const QuadraticSystem& sys,
                                 double tol = 1e-9);

// Per-pair rescaling x -> x/a, p -> p a/hbar with a^4 = hbar^2 h_pp/h_xx
// so that every diagonal entry becomes the pair frequency in rad/s and
// the quadratures quantize canonically; records z = a^2/hbar per pair.
QuadraticSystem rescale_balanced(const QuadraticSystem& sys);

}  // namespace imqed

#endif
