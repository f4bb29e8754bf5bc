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

#include <algorithm>
#include <cmath>

#include "imqed/units.hpp"
#include "json.hpp"

namespace imqed {

namespace {

// Deterministic eigenvector gauge: largest-magnitude entry positive.
void fix_sign(Vec& v) {
    int idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    if (v(idx) < 0.0) v = -v;
}

CauerSynthesis::OrthogonalStage orthogonal_stage(const Mat& m) {
    CauerSynthesis::OrthogonalStage st;
    if (m.size() == 0 || m.norm() == 0.0) {
        int n = static_cast<int>(m.rows());
        st.transform = Mat::Identity(n, n);
        st.values = Vec::Zero(n);
        return st;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(sym_part(m));
    st.transform = es.eigenvectors();
    st.values = es.eigenvalues();
    for (int c = 0; c < st.transform.cols(); ++c) {
        Vec col = st.transform.col(c);
        fix_sign(col);
        st.transform.col(c) = col;
    }
    return st;
}

}  // namespace

CauerSynthesis synthesize(const PoleResidueResponse& resp,
                          const CauerOptions& opts) {
    CauerSynthesis syn;
    syn.kind = resp.kind();
    syn.n_ports = resp.n_ports();
    syn.nr_dc = resp.nr_dc();

    if (resp.kind() == Kind::Impedance) {
        // A_0 = U^T Cbar^-1 U needs a nonsingular A_0; a port with direct
        // inductive coupling or a shunt inductor kills a row of A_0.
        Eigen::SelfAdjointEigenSolver<Mat> es(sym_part(resp.ind_dc()));
        double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
        if (lmax == 0.0 ||
            es.eigenvalues().minCoeff() < opts.rank_tol * lmax)
            throw SingularDcResidueError(
                "A_0 singular: the impedance route cannot produce an "
                "unconstrained Hamiltonian here; use the admittance route");
        syn.cap_stage = orthogonal_stage(resp.ind_dc());
        syn.ind_stage.transform = Mat::Identity(syn.n_ports, syn.n_ports);
        syn.ind_stage.values = Vec::Zero(syn.n_ports);
    } else {
        syn.cap_stage = orthogonal_stage(resp.cap_dc());
        syn.ind_stage = orthogonal_stage(resp.ind_dc());
    }

    for (const auto& p : resp.ac_poles()) {
        Eigen::SelfAdjointEigenSolver<Mat> es(sym_part(p.res_sym));
        const Vec& ev = es.eigenvalues();
        double lmax = ev.cwiseAbs().maxCoeff();
        std::vector<int> nonzero;
        for (int k = 0; k < ev.size(); ++k)
            if (ev(k) > opts.rank_tol * lmax) nonzero.push_back(k);

        if (p.reciprocal()) {
            if (nonzero.size() != 1)
                throw DegenerateResidueError(
                    "reciprocal pole at " + std::to_string(p.omega) +
                    " rad/s has residue rank " +
                    std::to_string(nonzero.size()) + ", expected 1");
            Vec v = es.eigenvectors().col(nonzero[0]);
            fix_sign(v);
            syn.reciprocal.push_back(
                {p.omega, std::sqrt(ev(nonzero[0])) * v});
            continue;
        }

        if (nonzero.size() != 2)
            throw DegenerateResidueError(
                "nonreciprocal pole at " + std::to_string(p.omega) +
                " rad/s has symmetric residue rank " +
                std::to_string(nonzero.size()) + ", expected 2");
        Vec v1 = es.eigenvectors().col(nonzero[1]);  // larger eigenvalue
        Vec v2 = es.eigenvectors().col(nonzero[0]);
        double l1 = ev(nonzero[1]), l2 = ev(nonzero[0]);
        Vec nl = std::sqrt(l1) * v1;
        Vec nr = std::sqrt(l2) * v2;
        // Orientation of the (n_L, n_R) pair from the antisymmetric
        // residue.  When l1 = l2 any orthonormal basis of the eigenspace
        // works: the antisymmetric 2-form on that space is rotation
        // invariant and only its sign and magnitude must match.
        auto anti_form = [&](const Vec& a, const Vec& b) -> Mat {
            Mat e = a * b.transpose() - b * a.transpose();
            if (resp.kind() == Kind::Admittance)
                return p.omega * e;  // E = w (nL nR^T - nR nL^T)
            return -p.omega * e;     // B = w (nR nL^T - nL nR^T)
        };
        Mat cand = anti_form(nl, nr);
        double denom = cand.squaredNorm();
        if (denom == 0.0)
            throw DegenerateResidueError(
                "nonreciprocal pole with vanishing antisymmetric form");
        double c = (p.res_anti.array() * cand.array()).sum() / denom;
        if (c < 0.0) {
            std::swap(nl, nr);
            std::swap(l1, l2);
            cand = anti_form(nl, nr);
            c = -c;
        }
        if (std::abs(c - 1.0) > opts.consistency_tol ||
            (p.res_anti - cand).norm() >
                opts.consistency_tol * p.res_anti.norm())
            throw DegenerateResidueError(
                "antisymmetric residue at " + std::to_string(p.omega) +
                " rad/s is inconsistent with its rank-2 symmetric part");
        fix_sign(nl);
        // keep the pair orientation: flipping n_L alone flips the form
        Mat after = anti_form(nl, nr);
        if ((p.res_anti - after).norm() > (p.res_anti + after).norm())
            nr = -nr;
        syn.nonreciprocal.push_back({p.omega, nl, nr});
    }
    return syn;
}

PoleResidueResponse reconstruct(const CauerSynthesis& syn,
                                ResponseOptions ropts) {
    int n = syn.n_ports;
    auto stage_matrix = [&](const CauerSynthesis::OrthogonalStage& st) {
        if (st.transform.size() == 0) return Mat::Zero(n, n).eval();
        return Mat(st.transform * st.values.asDiagonal() *
                   st.transform.transpose());
    };
    Mat cap_dc, ind_dc, nr_dc = syn.nr_dc;
    if (syn.kind == Kind::Admittance) {
        cap_dc = stage_matrix(syn.cap_stage);
        ind_dc = stage_matrix(syn.ind_stage);
    } else {
        cap_dc = Mat::Zero(n, n);
        ind_dc = stage_matrix(syn.cap_stage);
        nr_dc = Mat::Zero(n, n);
    }

    struct Entry {
        double omega;
        Mat sym, anti;
    };
    std::vector<Entry> entries;
    for (const auto& r : syn.reciprocal)
        entries.push_back(
            {r.omega, r.ratio * r.ratio.transpose(), Mat::Zero(n, n)});
    for (const auto& g : syn.nonreciprocal) {
        Mat sym = g.ratio_left * g.ratio_left.transpose() +
                  g.ratio_right * g.ratio_right.transpose();
        Mat e = g.ratio_left * g.ratio_right.transpose() -
                g.ratio_right * g.ratio_left.transpose();
        Mat anti = (syn.kind == Kind::Admittance ? g.omega : -g.omega) * e;
        entries.push_back({g.omega, sym, anti});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.omega < b.omega; });
    std::vector<AcPole> poles;
    for (auto& e : entries) {
        AcPole p;
        p.omega = e.omega;
        p.res_sym = sym_part(e.sym);
        p.res_anti = antisym_part(e.anti);
        poles.push_back(std::move(p));
    }
    return PoleResidueResponse(syn.kind, n, cap_dc, ind_dc, nr_dc,
                               std::move(poles), ropts);
}

std::string cauer_to_json(const CauerSynthesis& syn) {
    using nlohmann::json;
    json j;
    j["schema"] = "cauer.v1";
    j["kind"] = to_string(syn.kind);
    j["n_ports"] = syn.n_ports;
    j["conventions"] =
        syn.kind == Kind::Impedance
            ? "C_r = 1, L_r = 1/w^2; ratios in 1/sqrt(C)"
            : "L = 1, C = 1/w^2, R_mu = w_g; ratios in 1/sqrt(L)";
    auto vec_to_json = [](const Vec& v) {
        json a = json::array();
        for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
        return a;
    };
    auto mat_to_json = [](const Mat& m) {
        json a = json::array();
        for (int i = 0; i < m.rows(); ++i)
            for (int k = 0; k < m.cols(); ++k) a.push_back(m(i, k));
        return a;
    };
    j["cap_stage"] = {{"transform", mat_to_json(syn.cap_stage.transform)},
                      {"values", vec_to_json(syn.cap_stage.values)}};
    j["ind_stage"] = {{"transform", mat_to_json(syn.ind_stage.transform)},
                      {"values", vec_to_json(syn.ind_stage.values)}};
    json rec = json::array();
    for (const auto& r : syn.reciprocal)
        rec.push_back({{"omega_ghz", radps_to_ghz(r.omega)},
                       {"ratio", vec_to_json(r.ratio)}});
    j["reciprocal"] = rec;
    json nr = json::array();
    for (const auto& g : syn.nonreciprocal)
        nr.push_back({{"omega_ghz", radps_to_ghz(g.omega)},
                      {"ratio_left", vec_to_json(g.ratio_left)},
                      {"ratio_right", vec_to_json(g.ratio_right)}});
    j["nonreciprocal"] = nr;
    j["nr_dc"] = mat_to_json(syn.nr_dc);
    return j.dump(2);
}

}  // namespace imqed
