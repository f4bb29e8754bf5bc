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

#include <algorithm>
#include <cmath>
#include <limits>

#include "imqed/log.hpp"
#include "imqed/units.hpp"

namespace imqed {

Mat QuadraticSystem::j_form() const {
    int n = n_pairs();
    Mat j = Mat::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = Mat::Identity(n, n);
    j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    return j;
}

std::vector<int> QuadraticSystem::sector_pairs(Sector s) const {
    std::vector<int> out;
    for (int k = 0; k < n_pairs(); ++k)
        if (pairs[k].sector == s) out.push_back(k);
    return out;
}

double SymplecticMap::symplectic_defect() const {
    int n2 = static_cast<int>(s.rows());
    int n = n2 / 2;
    Mat j = Mat::Zero(n2, n2);
    j.topRightCorner(n, n) = Mat::Identity(n, n);
    j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    return (s * j * s.transpose() - j).norm() / j.norm();
}

Mat conjugate_form(const Mat& h, const Mat& s) {
    Eigen::PartialPivLU<Mat> lu(s);
    Mat sinv = lu.inverse();
    return sinv.transpose() * h * sinv;
}

Mat anticommutator_series(const Mat& h, const Mat& a_gen, int order) {
    int n = static_cast<int>(h.rows()) / 2;
    Mat j = Mat::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = Mat::Identity(n, n);
    j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    Mat d = j * a_gen;
    Mat term = h;
    Mat sum = h;
    double factorial = 1.0;
    for (int k = 1; k <= order; ++k) {
        Mat db = d * term;
        term = db + db.transpose();  // {D, B}_T keeps symmetry
        factorial *= k;
        sum += term / factorial;
    }
    return sum;
}

Mat conjugate_exact(const Mat& h, const Mat& a_gen) {
    int n = static_cast<int>(h.rows()) / 2;
    Mat j = Mat::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = Mat::Identity(n, n);
    j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    Mat left = (j * a_gen).exp();
    Mat right = (-a_gen * j).exp();
    return left * h * right;
}

namespace {

struct Split {
    std::vector<int> a, b;  // pair indices
};

Split make_split(const QuadraticSystem& sys, const std::vector<int>& a_pairs) {
    Split sp;
    sp.a = a_pairs;
    std::vector<bool> in_a(sys.n_pairs(), false);
    for (int k : a_pairs) in_a[k] = true;
    for (int k = 0; k < sys.n_pairs(); ++k)
        if (!in_a[k]) sp.b.push_back(k);
    return sp;
}

// Solve {J A, H0}_T = -M for the off-diagonal generator A, with H0 the
// diagonal part of the quadratic form and M symmetric with support only
// on the (a,b) cross blocks.
Mat solve_generator(const QuadraticSystem& sys, const Split& sp, const Mat& m,
                    const SwOptions& opts,
                    std::vector<std::string>* warnings) {
    int n = sys.n_pairs();
    const Mat& h = sys.h;
    Mat a_gen = Mat::Zero(2 * n, 2 * n);

    double wmax2 = 0.0;
    for (int k = 0; k < n; ++k)
        wmax2 = std::max(wmax2, h(sys.x_index(k), sys.x_index(k)) *
                                    h(sys.p_index(k), sys.p_index(k)));

    double kmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (int alpha : sp.a) {
        int xa = sys.x_index(alpha), pa = sys.p_index(alpha);
        double wxa = h(xa, xa), wpa = h(pa, pa);
        for (int beta : sp.b) {
            int xb = sys.x_index(beta), pb = sys.p_index(beta);
            double wxb = h(xb, xb), wpb = h(pb, pb);
            double theta = wxa * wpa - wxb * wpb;
            double kxx = m(xa, xb), kxp = m(xa, pb);
            double kpx = m(pa, xb), kpp = m(pa, pb);
            double knorm = std::max({std::abs(kxx), std::abs(kxp),
                                     std::abs(kpx), std::abs(kpp)});
            if (knorm == 0.0) continue;
            if (std::abs(theta) < opts.resonant_tol * wmax2)
                throw ResonantPairError(alpha, beta, theta);
            a_gen(xa, xb) = (wpa * kxp - wpb * kpx) / theta;
            a_gen(xa, pb) = (-wpa * kxx - wxb * kpp) / theta;
            a_gen(pa, xb) = (wxa * kpp + wpb * kxx) / theta;
            a_gen(pa, pb) = (-wxa * kpx + wxb * kxp) / theta;
            a_gen(xb, xa) = a_gen(xa, xb);
            a_gen(pb, xa) = a_gen(xa, pb);
            a_gen(xb, pa) = a_gen(pa, xb);
            a_gen(pb, pa) = a_gen(pa, pb);
            kmax = std::max(kmax, knorm);
            double gap = std::abs(std::sqrt(wxa * wpa) -
                                  std::sqrt(std::abs(wxb * wpb)));
            dmin = std::min(dmin, gap);
        }
    }
    if (warnings && kmax > 0.0 && kmax > opts.warn_ratio * dmin) {
        warnings->push_back("perturbative ratio k/Delta = " +
                            std::to_string(kmax / dmin) +
                            " exceeds the warn threshold");
        log_warn(warnings->back());
    }
    return a_gen;
}

// Split h into diagonal H0, diagonal-sector off-diagonal H'_D and the
// cross-sector part H_ND.
void split_form(const QuadraticSystem& sys, const Split& sp, Mat* h0,
                Mat* hd_prime, Mat* hnd) {
    int n2 = sys.dim();
    *h0 = Mat::Zero(n2, n2);
    h0->diagonal() = sys.h.diagonal();
    *hd_prime = Mat::Zero(n2, n2);
    *hnd = Mat::Zero(n2, n2);
    std::vector<int> sector(sys.n_pairs());
    for (int k : sp.a) sector[k] = 0;
    for (int k : sp.b) sector[k] = 1;
    auto pair_of = [&](int idx) { return idx % sys.n_pairs(); };
    for (int i = 0; i < n2; ++i) {
        for (int j = 0; j < n2; ++j) {
            if (i == j) continue;
            double v = sys.h(i, j);
            if (v == 0.0) continue;
            if (sector[pair_of(i)] == sector[pair_of(j)])
                (*hd_prime)(i, j) = v;
            else
                (*hnd)(i, j) = v;
        }
    }
}

}  // namespace

SymplecticMap sw_generator(const QuadraticSystem& sys,
                           const std::vector<int>& a_pairs,
                           const SwOptions& opts) {
    Split sp = make_split(sys, a_pairs);
    Mat h0, hdp, hnd;
    split_form(sys, sp, &h0, &hdp, &hnd);
    Mat a1 = solve_generator(sys, sp, hnd, opts, nullptr);
    SymplecticMap map;
    map.generator = a1;
    map.s = Mat((a1 * sys.j_form()).exp());
    return map;
}

SwResult sw_block_diagonalize(const QuadraticSystem& sys,
                              const std::vector<int>& a_pairs,
                              const SwOptions& opts) {
    Split sp = make_split(sys, a_pairs);
    Mat h0, hdp, hnd;
    split_form(sys, sp, &h0, &hdp, &hnd);

    SwResult out;
    Mat a1 = solve_generator(sys, sp, hnd, opts, &out.warnings);
    Mat j = sys.j_form();
    Mat ja1 = j * a1;

    Mat c1 = ja1 * hnd;
    Mat h_eff = h0 + hdp + 0.5 * (c1 + c1.transpose());

    Mat a_total = a1;
    if (opts.order >= 3 && hdp.norm() > 0.0) {
        // A^(2) from {J A2, H0}_T = -{J A1, H'_D}_T
        Mat m2 = ja1 * hdp;
        m2 = Mat(m2 + m2.transpose().eval());
        Mat a2 = solve_generator(sys, sp, m2, opts, nullptr);
        Mat c2 = (j * a2) * hnd;
        h_eff += c2 + c2.transpose();
        Mat inner = ja1 * hdp;
        inner = Mat(inner + inner.transpose().eval());
        Mat c3 = ja1 * inner;
        h_eff += 0.5 * (c3 + c3.transpose());
        a_total += a2;
    }
    out.h_effective = h_eff;
    out.map.generator = a_total;
    out.map.s = Mat((a_total * j).exp());

    // Residual cross-sector block and per-sector effective forms.
    auto gather = [&](const std::vector<int>& pairs_idx) {
        int m = static_cast<int>(pairs_idx.size());
        Mat block(2 * m, 2 * m);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) {
                block(i, k) = h_eff(sys.x_index(pairs_idx[i]),
                                    sys.x_index(pairs_idx[k]));
                block(i, m + k) = h_eff(sys.x_index(pairs_idx[i]),
                                        sys.p_index(pairs_idx[k]));
                block(m + i, k) = h_eff(sys.p_index(pairs_idx[i]),
                                        sys.x_index(pairs_idx[k]));
                block(m + i, m + k) = h_eff(sys.p_index(pairs_idx[i]),
                                            sys.p_index(pairs_idx[k]));
            }
        return block;
    };
    out.h_eff_a = gather(sp.a);
    out.h_eff_b = gather(sp.b);
    // Residual cross block of the exactly conjugated form; the truncated
    // series above is block diagonal by construction.
    Mat h_conj = conjugate_form(sys.h, out.map.s);
    double resid = 0.0;
    for (int alpha : sp.a)
        for (int beta : sp.b)
            for (int i : {sys.x_index(alpha), sys.p_index(alpha)})
                for (int k : {sys.x_index(beta), sys.p_index(beta)})
                    resid += h_conj(i, k) * h_conj(i, k);
    out.offdiag_residual = std::sqrt(2.0 * resid);
    return out;
}

QuadraticSystem eliminate_nondynamical(const QuadraticSystem& sys,
                                       Elimination kind) {
    int n = sys.n_pairs();
    std::vector<int> qubits = sys.sector_pairs(Sector::Qubit);
    std::vector<int> inner;
    for (int k = 0; k < n; ++k)
        if (sys.pairs[k].sector == Sector::ReciprocalInner ||
            sys.pairs[k].sector == Sector::NonreciprocalInner)
            inner.push_back(k);
    std::vector<int> nr = sys.sector_pairs(Sector::NonreciprocalInner);
    if (nr.size() % 2 != 0)
        throw NotBlockStructuredError(
            "nonreciprocal pairs must come in (left, right) duos");
    std::vector<int> gyr_first;
    for (size_t i = 0; i < nr.size(); i += 2) {
        if (nr[i + 1] != nr[i] + 1)
            throw NotBlockStructuredError(
                "nonreciprocal duo pairs must be consecutive");
        gyr_first.push_back(nr[i]);
    }
    if (gyr_first.empty() && sys.sector_pairs(Sector::ReciprocalInner).empty())
        return sys;  // nothing to do

    Mat h = sys.h;
    int n2 = sys.dim();

    if (kind == Elimination::Exact) {
        // Triangular map p_q -> p_q - T x_I, p_I -> p_I - T^T x_q with
        // T = -C * H[p_q, x_I] recovered from the assembled form.
        int nq = static_cast<int>(qubits.size());
        int ni = static_cast<int>(inner.size());
        if (nq > 0 && ni > 0) {
            Mat hpp(nq, nq), hpx(nq, ni);
            for (int i = 0; i < nq; ++i) {
                for (int k = 0; k < nq; ++k)
                    hpp(i, k) = h(sys.p_index(qubits[i]),
                                  sys.p_index(qubits[k]));
                for (int k = 0; k < ni; ++k)
                    hpx(i, k) = h(sys.p_index(qubits[i]),
                                  sys.x_index(inner[k]));
            }
            Mat t = -hpp.ldlt().solve(hpx);  // C * hpx with C = hpp^-1
            Mat s = Mat::Identity(n2, n2);
            for (int i = 0; i < nq; ++i)
                for (int k = 0; k < ni; ++k) {
                    s(sys.p_index(qubits[i]), sys.x_index(inner[k])) = -t(i, k);
                    s(sys.p_index(inner[k]), sys.x_index(qubits[i])) = -t(i, k);
                }
            h = conjugate_form(h, s);
        }
    }

    // Reciprocal rescale and gyrator-duo mixing.
    Mat s_i = Mat::Identity(n2, n2);
    for (int k : sys.sector_pairs(Sector::ReciprocalInner)) {
        double w = sys.pairs[k].omega;
        s_i(sys.x_index(k), sys.x_index(k)) = std::sqrt(w);
        s_i(sys.p_index(k), sys.p_index(k)) = 1.0 / std::sqrt(w);
    }
    for (int g : gyr_first) {
        double w = sys.pairs[g].omega;
        double rw = std::sqrt(w);
        int xl = sys.x_index(g), xr = sys.x_index(g + 1);
        int pl = sys.p_index(g), pr = sys.p_index(g + 1);
        // [[I/2, -Sx], [Sx/2, I]] * diag(sqrt(w), 1/sqrt(w))
        s_i(xl, xl) = 0.5 * rw;
        s_i(xr, xr) = 0.5 * rw;
        s_i(xl, pr) = -1.0 / rw;
        s_i(xr, pl) = -1.0 / rw;
        s_i(pl, xr) = 0.5 * rw;
        s_i(pr, xl) = 0.5 * rw;
        s_i(pl, pl) = 1.0 / rw;
        s_i(pr, pr) = 1.0 / rw;
    }
    h = conjugate_form(h, s_i);

    // The R partner of every duo is now at zero frequency; in the exact
    // variant it has also decoupled.
    std::vector<int> drop;
    for (int g : gyr_first) drop.push_back(g + 1);
    double scale = h.norm();
    if (kind == Elimination::Exact) {
        for (int d : drop) {
            double coupling = 0.0;
            for (int i = 0; i < n2; ++i) {
                if (i == sys.x_index(d) || i == sys.p_index(d)) continue;
                coupling = std::max(coupling,
                                    std::abs(h(sys.x_index(d), i)));
                coupling = std::max(coupling,
                                    std::abs(h(sys.p_index(d), i)));
            }
            if (coupling > 1e-10 * scale)
                throw NotBlockStructuredError(
                    "nondynamical mode failed to decouple exactly "
                    "(residual " +
                    std::to_string(coupling / scale) + ")");
        }
    }

    std::vector<bool> keep(n, true);
    for (int d : drop) keep[d] = false;
    std::vector<int> kept;
    for (int k = 0; k < n; ++k)
        if (keep[k]) kept.push_back(k);
    int nk = static_cast<int>(kept.size());
    QuadraticSystem out;
    out.h = Mat::Zero(2 * nk, 2 * nk);
    out.pairs.resize(nk);
    for (int i = 0; i < nk; ++i) {
        out.pairs[i] = sys.pairs[kept[i]];
        for (int k = 0; k < nk; ++k) {
            out.h(i, k) = h(sys.x_index(kept[i]), sys.x_index(kept[k]));
            out.h(i, nk + k) = h(sys.x_index(kept[i]), sys.p_index(kept[k]));
            out.h(nk + i, k) = h(sys.p_index(kept[i]), sys.x_index(kept[k]));
            out.h(nk + i, nk + k) =
                h(sys.p_index(kept[i]), sys.p_index(kept[k]));
        }
    }
    return out;
}

QuadraticSystem rescale_balanced(const QuadraticSystem& sys) {
    int n = sys.n_pairs();
    Vec dx(2 * n);
    QuadraticSystem out = sys;
    for (int k = 0; k < n; ++k) {
        double kx = sys.h(sys.x_index(k), sys.x_index(k));
        double kp = sys.h(sys.p_index(k), sys.p_index(k));
        if (kx <= 0.0 || kp <= 0.0)
            throw NumericalError(
                "rescale_balanced: nonpositive diagonal stiffness");
        double a2 = kHbar * std::sqrt(kp / kx);
        dx(sys.x_index(k)) = std::sqrt(a2);
        dx(sys.p_index(k)) = kHbar / std::sqrt(a2);
        out.pairs[k].z_scale = a2 / kHbar;
        out.pairs[k].omega = std::sqrt(kx * kp);
    }
    out.h = (dx.asDiagonal() * sys.h * dx.asDiagonal()) / kHbar;
    return out;
}

std::vector<double> normal_modes(const QuadraticSystem& sys, double tol) {
    Mat flow = sys.j_form() * sys.h;
    Eigen::EigenSolver<Mat> es(flow);
    double scale = 0.0;
    for (int k = 0; k < es.eigenvalues().size(); ++k)
        scale = std::max(scale, std::abs(es.eigenvalues()(k)));
    std::vector<double> out;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
        Complex lambda = es.eigenvalues()(k);
        if (std::abs(lambda) < tol * scale) continue;
        if (std::abs(lambda.real()) > tol * scale)
            throw UnstableSystemError(
                "J*H eigenvalue leaves the imaginary axis; the quadratic "
                "form is not positive on the dynamical subspace");
        if (lambda.imag() > 0.0) out.push_back(lambda.imag());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace imqed
