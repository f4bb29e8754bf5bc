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

#include <algorithm>
#include <cmath>
#include <limits>

#include "imqed/units.hpp"
#include "json.hpp"

namespace imqed {

std::string to_string(Kind k) {
    return k == Kind::Admittance ? "admittance" : "impedance";
}

static void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}

PoleResidueResponse::PoleResidueResponse(Kind kind, int n_ports, Mat cap_dc,
                                         Mat ind_dc, Mat nr_dc,
                                         std::vector<AcPole> poles,
                                         ResponseOptions opts)
    : kind_(kind),
      n_(n_ports),
      cap_dc_(std::move(cap_dc)),
      ind_dc_(std::move(ind_dc)),
      nr_dc_(std::move(nr_dc)),
      poles_(std::move(poles)),
      opts_(opts) {
    require(n_ > 0, "n_ports must be positive");
    if (cap_dc_.size() == 0) cap_dc_ = Mat::Zero(n_, n_);
    if (ind_dc_.size() == 0) ind_dc_ = Mat::Zero(n_, n_);
    if (nr_dc_.size() == 0) nr_dc_ = Mat::Zero(n_, n_);
    require(cap_dc_.rows() == n_ && cap_dc_.cols() == n_, "cap_dc shape");
    require(ind_dc_.rows() == n_ && ind_dc_.cols() == n_, "ind_dc shape");
    require(nr_dc_.rows() == n_ && nr_dc_.cols() == n_, "nr_dc shape");

    require(rel_asymmetry(cap_dc_) < opts_.sym_tol, "cap_dc not symmetric");
    require(rel_asymmetry(ind_dc_) < opts_.sym_tol, "ind_dc not symmetric");
    require(rel_symmetry(nr_dc_) < opts_.sym_tol, "nr_dc not antisymmetric");
    require(is_psd(cap_dc_, opts_.psd_tol), "cap_dc not PSD");
    require(is_psd(ind_dc_, opts_.psd_tol), "ind_dc not PSD");
    if (kind_ == Kind::Impedance) {
        // B_inf = 0 and no pole at infinity for capacitively shunted ports.
        require(nr_dc_.norm() == 0.0 ||
                    nr_dc_.norm() < opts_.sym_tol * (1.0 + ind_dc_.norm()),
                "impedance response must have zero antisymmetric dc part");
        require(cap_dc_.norm() == 0.0 ||
                    cap_dc_.norm() < opts_.sym_tol * (1.0 + ind_dc_.norm()),
                "impedance response must have no pole at infinity");
    }

    double prev = 0.0;
    for (const auto& p : poles_) {
        require(p.omega > 0.0, "pole frequency must be positive");
        require(p.res_sym.rows() == n_ && p.res_sym.cols() == n_ &&
                    p.res_anti.rows() == n_ && p.res_anti.cols() == n_,
                "residue shape");
        require(rel_asymmetry(p.res_sym) < opts_.sym_tol,
                "res_sym not symmetric");
        require(rel_symmetry(p.res_anti) < opts_.sym_tol,
                "res_anti not antisymmetric");
        require(is_psd(p.res_sym, opts_.psd_tol), "res_sym not PSD");
        if (prev > 0.0) {
            if (p.omega <= prev ||
                (p.omega - prev) < opts_.min_gap_rel * p.omega) {
                throw DegeneratePoleError(
                    "pole frequencies must be strictly increasing with a "
                    "minimum relative gap of " +
                    std::to_string(opts_.min_gap_rel));
            }
        }
        prev = p.omega;
    }
}

CMat PoleResidueResponse::dc_at(Complex s) const {
    CMat out = CMat::Zero(n_, n_);
    out += ind_dc_.cast<Complex>() / s;
    out += cap_dc_.cast<Complex>() * s;
    out += nr_dc_.cast<Complex>();
    return out;
}

CMat PoleResidueResponse::ac_at(Complex s) const {
    CMat out = CMat::Zero(n_, n_);
    for (const auto& p : poles_) {
        Complex den = p.omega * p.omega + s * s;
        out += (p.res_sym.cast<Complex>() * s +
                p.res_anti.cast<Complex>()) /
               den;
    }
    return out;
}

CMat PoleResidueResponse::evaluate_s(Complex s) const {
    return dc_at(s) + ac_at(s);
}

bool PoleResidueResponse::near_pole(double omega) const {
    for (const auto& p : poles_) {
        if (std::abs(omega - p.omega) < opts_.pole_guard_rel * p.omega)
            return true;
    }
    return false;
}

CMat PoleResidueResponse::evaluate(double omega) const {
    require(omega >= 0.0, "omega must be nonnegative");
    for (const auto& p : poles_) {
        if (std::abs(omega - p.omega) < opts_.pole_guard_rel * p.omega)
            throw PoleProximityError(omega, p.omega);
    }
    CMat out = evaluate_s(Complex(0.0, omega));
    if (!all_finite(out)) throw NonFiniteError("response overflow");
    return out;
}

ResponseParts PoleResidueResponse::split() const {
    // Capture by value; the response is an immutable value type.
    PoleResidueResponse self = *this;
    ResponseParts parts;
    parts.dc = [self](double w) { return self.dc_at(Complex(0.0, w)); };
    parts.ac = [self](double w) { return self.ac_at(Complex(0.0, w)); };
    parts.reciprocal = [self](double w) {
        return sym_part(self.evaluate(w));
    };
    parts.nonreciprocal = [self](double w) {
        return antisym_part(self.evaluate(w));
    };
    return parts;
}

std::vector<Violation> PoleResidueResponse::validate(
        const ResponseOptions& tol) const {
    std::vector<Violation> out;
    auto check = [&](bool ok, const std::string& what, double mag) {
        if (!ok) out.push_back({what, mag});
    };
    check(rel_asymmetry(cap_dc_) < tol.sym_tol, "cap_dc not symmetric",
          rel_asymmetry(cap_dc_));
    check(rel_asymmetry(ind_dc_) < tol.sym_tol, "ind_dc not symmetric",
          rel_asymmetry(ind_dc_));
    check(rel_symmetry(nr_dc_) < tol.sym_tol, "nr_dc not antisymmetric",
          rel_symmetry(nr_dc_));
    check(is_psd(cap_dc_, tol.psd_tol), "cap_dc not PSD",
          min_eigenvalue_sym(cap_dc_));
    check(is_psd(ind_dc_, tol.psd_tol), "ind_dc not PSD",
          min_eigenvalue_sym(ind_dc_));
    int idx = 0;
    double prev = 0.0;
    for (const auto& p : poles_) {
        std::string tag = "pole " + std::to_string(idx);
        check(p.omega > 0.0, tag + ": nonpositive frequency", p.omega);
        check(rel_asymmetry(p.res_sym) < tol.sym_tol,
              tag + ": res_sym not symmetric", rel_asymmetry(p.res_sym));
        check(rel_symmetry(p.res_anti) < tol.sym_tol,
              tag + ": res_anti not antisymmetric", rel_symmetry(p.res_anti));
        check(is_psd(p.res_sym, tol.psd_tol), tag + ": residue not PSD",
              min_eigenvalue_sym(p.res_sym));
        if (idx > 0)
            check(p.omega - prev >= tol.min_gap_rel * p.omega,
                  tag + ": pole gap below minimum", p.omega - prev);
        prev = p.omega;
        ++idx;
    }
    if (kind_ == Kind::Impedance) {
        check(nr_dc_.norm() <= tol.sym_tol * (1.0 + ind_dc_.norm()),
              "impedance with nonzero antisymmetric dc part", nr_dc_.norm());
        check(cap_dc_.norm() <= tol.sym_tol * (1.0 + ind_dc_.norm()),
              "impedance with pole at infinity", cap_dc_.norm());
    }
    return out;
}

CMat residue_at(const std::function<CMat(Complex)>& evaluator, double omega0,
                const ResidueOptions& opts) {
    require(omega0 > 0.0, "residue_at: omega0 must be positive");
    const int m = static_cast<int>(opts.offsets_rel.size());
    require(m >= 3, "residue_at: need at least three offsets");

    // Symmetric +/- offsets: the even average of (s - i w0) F(s) keeps
    // only Res + c2 eps^2 + c4 eps^4 + ..., so the extrapolation runs in
    // eps^2 and the smallest offsets never get roundoff-dominated.
    std::vector<CMat> even(m), odd(m);
    std::vector<double> eps(m);
    double f_scale = 0.0;
    for (int k = 0; k < m; ++k) {
        eps[k] = opts.offsets_rel[k] * omega0;
        CMat fp = evaluator(Complex(eps[k], omega0));
        CMat fmn = evaluator(Complex(-eps[k], omega0));
        if (!all_finite(fp) || !all_finite(fmn))
            throw NonFiniteError("residue_at: evaluator overflow");
        CMat gp = fp * Complex(eps[k], 0.0);
        CMat gm = fmn * Complex(-eps[k], 0.0);
        even[k] = 0.5 * (gp + gm);
        odd[k] = 0.5 * (gp - gm);
        f_scale = std::max(f_scale, eps[k] * fp.norm());
    }

    // Poles of order > 1 make the even or odd part diverge as eps -> 0.
    bool shrinking = eps.front() > eps.back();
    int lo = shrinking ? m - 1 : 0, hi = shrinking ? 0 : m - 1;
    if (odd[lo].norm() > 10.0 * (odd[hi].norm() + 1e-300) &&
        odd[lo].norm() > 1e-3 * even[lo].norm()) {
        throw HigherOrderPoleError(
            "residue_at: odd part of (s - i w0) F(s) diverges, pole order "
            "> 1");
    }
    if (even[lo].norm() > 10.0 * (even[hi].norm() + 1e-300) &&
        even[hi].norm() > 0.0) {
        throw HigherOrderPoleError(
            "residue_at: (s - i w0) F(s) diverges, pole order > 2");
    }

    // Neville extrapolation in eps^2 to eps -> 0.
    std::vector<CMat> tab = even;
    std::vector<double> x(m);
    for (int k = 0; k < m; ++k) x[k] = eps[k] * eps[k];
    CMat prev_diag = tab[0];
    double last_step = std::numeric_limits<double>::infinity();
    for (int level = 1; level < m; ++level) {
        for (int k = 0; k + level < m; ++k) {
            tab[k] = tab[k + 1] +
                     (tab[k + 1] - tab[k]) * (x[k + level] /
                                              (x[k] - x[k + level]));
        }
        CMat diag = tab[0];
        last_step = (diag - prev_diag).norm() /
                    std::max(diag.norm(), 1e-300);
        prev_diag = diag;
    }
    CMat res = tab[0];

    if (f_scale == 0.0 ||
        res.norm() < opts.not_a_pole_tol * std::max(f_scale, 1e-300)) {
        throw NotAPoleError("residue_at: extrapolated residue vanishes");
    }
    if (last_step > opts.convergence_tol) {
        throw HigherOrderPoleError(
            "residue_at: extrapolation failed to converge (rel step " +
            std::to_string(last_step) + ")");
    }
    return res;
}

CMat scattering(const PoleResidueResponse& resp, double r0, double omega) {
    require(r0 > 0.0, "scattering: reference impedance must be positive");
    CMat z;
    if (resp.kind() == Kind::Impedance) {
        z = resp.evaluate(omega);
    } else {
        CMat y = resp.evaluate(omega);
        Eigen::FullPivLU<CMat> lu(y);
        if (!lu.isInvertible())
            throw SingularConversionError(
                "scattering: admittance is singular at this frequency");
        z = lu.inverse();
    }
    CMat id = CMat::Identity(resp.n_ports(), resp.n_ports());
    Eigen::FullPivLU<CMat> lu(z + r0 * id);
    if (!lu.isInvertible())
        throw SingularConversionError("scattering: Z + R0*I is singular");
    return lu.solve(z - r0 * id);
}

// ---------------------------------------------------------------------
// response.v1 JSON
// ---------------------------------------------------------------------

using nlohmann::json;

static json mat_to_json(const Mat& m) {
    json arr = json::array();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
    return arr;
}

static Mat mat_from_json(const json& arr, int n) {
    require(static_cast<int>(arr.size()) == n * n,
            "response.v1: matrix size mismatch");
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = arr[i * n + j].get<double>();
    return m;
}

std::string response_to_json(const PoleResidueResponse& resp) {
    json j;
    j["schema"] = "response.v1";
    j["kind"] = to_string(resp.kind());
    j["n_ports"] = resp.n_ports();
    bool y = resp.kind() == Kind::Admittance;
    j["units"] = {
        {"omega_ghz", "pole frequency / 2pi, GHz"},
        {"cap_dc", y ? "F" : "absent"},
        {"ind_dc", y ? "1/H" : "1/F"},
        {"nr_dc", y ? "S" : "zero"},
        {"res_sym", y ? "S * rad/s" : "Ohm * rad/s"},
        {"res_anti", y ? "S * (rad/s)^2" : "Ohm * (rad/s)^2"},
        {"layout", "row-major"},
    };
    j["cap_dc"] = mat_to_json(resp.cap_dc());
    j["ind_dc"] = mat_to_json(resp.ind_dc());
    j["nr_dc"] = mat_to_json(resp.nr_dc());
    json poles = json::array();
    for (const auto& p : resp.ac_poles()) {
        poles.push_back({{"omega_ghz", radps_to_ghz(p.omega)},
                         {"res_sym", mat_to_json(p.res_sym)},
                         {"res_anti", mat_to_json(p.res_anti)}});
    }
    j["poles"] = poles;
    return j.dump(2);
}

PoleResidueResponse response_from_json(const std::string& text) {
    json j = json::parse(text);
    require(j.contains("units"), "response.v1: missing units header");
    require(j.value("schema", "response.v1") == "response.v1",
            "response.v1: unknown schema");
    std::string kind_s = j.at("kind").get<std::string>();
    Kind kind;
    if (kind_s == "admittance")
        kind = Kind::Admittance;
    else if (kind_s == "impedance")
        kind = Kind::Impedance;
    else
        throw ConfigError("response.v1: kind must be admittance|impedance");
    int n = j.at("n_ports").get<int>();
    Mat cap = mat_from_json(j.at("cap_dc"), n);
    Mat ind = mat_from_json(j.at("ind_dc"), n);
    Mat nr = mat_from_json(j.at("nr_dc"), n);
    std::vector<AcPole> poles;
    for (const auto& pj : j.at("poles")) {
        AcPole p;
        p.omega = ghz_to_radps(pj.at("omega_ghz").get<double>());
        p.res_sym = mat_from_json(pj.at("res_sym"), n);
        p.res_anti = mat_from_json(pj.at("res_anti"), n);
        poles.push_back(std::move(p));
    }
    return PoleResidueResponse(kind, n, cap, ind, nr, std::move(poles));
}

}  // namespace imqed
