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

#ifndef IMQED_CAUER_HPP
#define IMQED_CAUER_HPP

#include "imqed/immittance.hpp"
#include "imqed/linalg.hpp"

namespace imqed {

// Canonical Cauer data for a lossless multiport response: orthogonal
// capacitive/inductive stages, one transformer-ratio vector per
// reciprocal pole, and a left/right ratio pair per nonreciprocal pole.
//
// Conventions: impedance kind uses C_r = 1, L_r = 1/w^2 (ratios in
// 1/sqrt(C) units); admittance kind uses L = 1, C = 1/w^2, R_mu = w_g
// (ratios in 1/sqrt(L) units).  The dc nonreciprocal stage E_inf is
// carried through verbatim, never synthesized into gyrators.
struct CauerSynthesis {
    Kind kind;

    struct OrthogonalStage {
        Mat transform;  // orthogonal, columns are stage directions
        Vec values;     // eigenvalues of the dc matrix (possibly zero)
    };
    OrthogonalStage cap_stage;  // from A_0 (Z) or D_inf (Y)
    OrthogonalStage ind_stage;  // from D_0 (Y only)

    struct ReciprocalStage {
        double omega;
        Vec ratio;  // r_gamma
    };
    struct NonreciprocalStage {
        double omega;     // w_g
        Vec ratio_left;   // n^L
        Vec ratio_right;  // n^R
    };
    std::vector<ReciprocalStage> reciprocal;
    std::vector<NonreciprocalStage> nonreciprocal;

    Mat nr_dc;  // E_inf carried through unsynthesized
    int n_ports = 0;
};

struct CauerOptions {
    double rank_tol = 1e-10;        // eigenvalues below tol*max are zero
    double consistency_tol = 1e-8;  // res_anti reproduction tolerance
};

// Transformer ratios and reactive elements from the response residues.
// Throws SingularDcResidueError for an impedance with singular A_0 (the
// admittance route always works), DegenerateResidueError when a residue
// fails its rank test or the antisymmetric part is inconsistent.
CauerSynthesis synthesize(const PoleResidueResponse& resp,
                          const CauerOptions& opts = {});

// Rebuild the pole-residue response from ratio outer products.
PoleResidueResponse reconstruct(const CauerSynthesis& syn,
                                ResponseOptions opts = {});

std::string cauer_to_json(const CauerSynthesis& syn);

}  // namespace imqed

#endif
