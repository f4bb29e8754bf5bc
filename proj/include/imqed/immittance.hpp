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

#ifndef IMQED_IMMITTANCE_HPP
#define IMQED_IMMITTANCE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "imqed/errors.hpp"
#include "imqed/linalg.hpp"

namespace imqed {

enum class Kind { Admittance, Impedance };

std::string to_string(Kind k);

// One ac pole of a lossless multiport response: frequency and the
// symmetric/antisymmetric residue matrices (D_beta/E_beta for an
// admittance, A_beta/B_beta for an impedance).
struct AcPole {
    double omega = 0.0;  // rad/s, > 0
    Mat res_sym;         // symmetric PSD
    Mat res_anti;        // antisymmetric

    // A pole is reciprocal iff its antisymmetric residue vanishes.
    bool reciprocal(double tol = 1e-10) const {
        double scale = res_sym.norm();
        return scale == 0.0 || res_anti.norm() < tol * scale;
    }
};

struct ResponseOptions {
    double pole_guard_rel = 1e-6;   // guard band around ac poles
    double min_gap_rel = 1e-6;      // minimum relative pole separation
    double sym_tol = 1e-10;         // (anti)symmetry tolerance
    double psd_tol = 1e-10;         // eigenvalue slack relative to trace
};

struct Violation {
    std::string what;
    double magnitude = 0.0;
};

// Frequency-resolved decomposition of a response; all four functions
// return complex n x n matrices at a given omega (rad/s).
struct ResponseParts {
    std::function<CMat(double)> dc;
    std::function<CMat(double)> ac;
    std::function<CMat(double)> reciprocal;
    std::function<CMat(double)> nonreciprocal;
};

// A lossless (possibly nonreciprocal) multiport immittance in
// pole-residue form,
//
//   Y(s) = D_0/s + D_inf s + E_inf + sum_b (D_b s + E_b)/(w_b^2 + s^2)
//   Z(s) = A_0/s             +        sum_b (A_b s + B_b)/(w_b^2 + s^2)
//
// For an admittance, ind_dc = D_0 (1/H), cap_dc = D_inf (F) and
// nr_dc = E_inf (S).  For an impedance only the 1/s pole survives
// (capacitively shunted ports): ind_dc = A_0 (1/F), cap_dc and nr_dc
// are identically zero.  Immutable after construction.
class PoleResidueResponse {
  public:
    PoleResidueResponse(Kind kind, int n_ports, Mat cap_dc, Mat ind_dc,
                        Mat nr_dc, std::vector<AcPole> poles,
                        ResponseOptions opts = {});

    Kind kind() const { return kind_; }
    int n_ports() const { return n_; }
    const Mat& cap_dc() const { return cap_dc_; }
    const Mat& ind_dc() const { return ind_dc_; }
    const Mat& nr_dc() const { return nr_dc_; }
    const std::vector<AcPole>& ac_poles() const { return poles_; }
    const ResponseOptions& options() const { return opts_; }

    // Full evaluation at s = i*omega.  Throws PoleProximityError inside a
    // pole guard band and NonFiniteError on overflow.
    CMat evaluate(double omega) const;

    // Evaluation at an arbitrary complex s (no pole guard; used for
    // residue extraction and dc fits).
    CMat evaluate_s(Complex s) const;

    ResponseParts split() const;

    // Report-only invariant check against the given tolerances (defaults,
    // not the construction-time ones); empty result means valid.
    std::vector<Violation> validate(const ResponseOptions& tol = {}) const;

    // True if omega lies within the guard band of some ac pole.
    bool near_pole(double omega) const;

  private:
    Kind kind_;
    int n_;
    Mat cap_dc_, ind_dc_, nr_dc_;
    std::vector<AcPole> poles_;
    ResponseOptions opts_;

    CMat dc_at(Complex s) const;
    CMat ac_at(Complex s) const;
    friend class ResponsePartsBuilder;
};

struct ResidueOptions {
    // Extrapolation offsets relative to omega0, evaluated at +/- eps so
    // the fit runs in eps^2.  Smaller offsets than ~1e-4 buy nothing:
    // the near-pole solves become roundoff-dominated.
    std::vector<double> offsets_rel = {1e-2, 3.162e-3, 1e-3, 3.162e-4, 1e-4};
    double not_a_pole_tol = 1e-10;
    double convergence_tol = 1e-6;
};

// Residue lim_{s->i w0} (s - i w0) F(s) of a matrix-valued rational
// function, by Richardson extrapolation along the real-s direction.
// Throws NotAPoleError / HigherOrderPoleError.
CMat residue_at(const std::function<CMat(Complex)>& evaluator, double omega0,
                const ResidueOptions& opts = {});

// Scattering matrix S = (Z + R0)^(-1) (Z - R0) at omega; an admittance
// input is inverted first.  Throws SingularConversionError.
CMat scattering(const PoleResidueResponse& resp, double r0, double omega);

// response.v1 JSON round-trip.
std::string response_to_json(const PoleResidueResponse& resp);
PoleResidueResponse response_from_json(const std::string& text);

}  // namespace imqed

#endif
