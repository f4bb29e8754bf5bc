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

#include "imqed/dissipation.hpp"

#include <cmath>

#include "imqed/effective.hpp"
#include "imqed/units.hpp"

namespace imqed {

namespace {

// Reciprocal dc part of a response block at complex frequency i*omega.
CMat dc_reciprocal(const PoleResidueResponse& resp, double omega) {
    Complex s(0.0, omega);
    return resp.ind_dc().cast<Complex>() / s +
           resp.cap_dc().cast<Complex>() * s;
}

CMat take_block(const CMat& m, const std::vector<int>& rows,
                const std::vector<int>& cols) {
    CMat out(rows.size(), cols.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
            out(i, j) = m(rows[i], cols[j]);
    return out;
}

}  // namespace

CMat drive_filter(const PoleResidueResponse& resp, const PortLayout& layout,
                  double omega) {
    int nd = layout.n_drive();
    CMat out = CMat::Zero(nd, nd);
    CMat dc = dc_reciprocal(resp, omega);
    if (resp.kind() == Kind::Admittance)
        dc += resp.nr_dc().cast<Complex>();
    CMat dc_d = take_block(dc, layout.drive_rows, layout.drive_rows);
    for (int d = 0; d < nd; ++d) {
        if (resp.kind() == Kind::Admittance)
            out(d, d) = 1.0 / layout.z0[d];
        else
            out(d, d) = layout.z0[d];
    }
    return out + dc_d;
}

CMat decay_matrix(const PoleResidueResponse& resp, const PortLayout& layout,
                  const Vec& omega_bar, const Mat& jd_rescale) {
    int n = layout.n_junction(), nd = layout.n_drive();
    CMat gamma = CMat::Zero(n, n);
    if (nd == 0) return gamma;

    // Dressed qubit-drive response rows, evaluated at each qubit's own
    // frequency.
    CMat rows(n, nd);
    for (int i = 0; i < n; ++i) {
        CMat full = jd_rescale.cast<Complex>() *
                    take_block(resp.evaluate(omega_bar(i)),
                               layout.junction_rows, layout.drive_rows);
        rows.row(i) = full.row(i);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double w_avg = 0.5 * (omega_bar(i) + omega_bar(j));
            CMat filt = drive_filter(resp, layout, w_avg);
            Eigen::FullPivLU<CMat> lu(filt);
            if (!lu.isInvertible())
                throw SingularAtFrequencyError(
                    "drive filter not invertible at the average qubit "
                    "frequency");
            Mat kernel = lu.inverse().real();
            kernel = sym_part(kernel);
            Complex g = 0.0;
            for (int d = 0; d < nd; ++d)
                for (int dp = 0; dp < nd; ++dp)
                    g += kernel(d, dp) * rows(i, d) * std::conj(rows(j, dp));
            if (resp.kind() == Kind::Impedance)
                g *= omega_bar(i) * omega_bar(j);
            gamma(i, j) = g;
            gamma(j, i) = std::conj(g);
        }
        gamma(i, i) = gamma(i, i).real();
    }
    return gamma;
}

Vec purcell_rates(const CMat& gamma) {
    Vec out(gamma.rows());
    for (int i = 0; i < gamma.rows(); ++i) out(i) = gamma(i, i).real();
    return out;
}

double purcell_kappa(double omega, double c_k, double c_d, double c_p,
                     double z0) {
    double wz = omega * z0 * (c_d + c_k);
    return omega * omega * c_k * c_k * z0 / (c_p * (1.0 + wz * wz));
}

std::pair<double, double> purcell_weak_coupling(const PurcellChainParams& p) {
    double w = p.omega_bar;
    double denom_ro = (1.0 + w * w * (p.c_d + p.c_k) * (p.c_d + p.c_k) *
                                 p.z0 * p.z0) *
                      p.c_j * p.c_p * p.c_p * p.c_r * p.c_r;
    double num_ro = p.z0 * p.c_rp * p.c_rp * p.c_jr * p.c_jr * p.c_k * p.c_k *
                    std::pow(w, 10);
    double dr2 = (p.omega_r * p.omega_r - w * w);
    double df2 = (p.omega_f * p.omega_f - w * w);
    double t1_ro_inv = num_ro / (denom_ro * dr2 * dr2 * df2 * df2);

    double wzd = w * p.z0 * (p.c_d + p.c_jd);
    double t1_d_inv =
        p.z0 * w * w * p.c_jd * p.c_jd / (p.c_j * (1.0 + wzd * wzd));
    return {t1_ro_inv, t1_d_inv};
}

Mat crosstalk(const CMat& alpha, const std::vector<int>& line_of_qubit) {
    int n = static_cast<int>(alpha.rows());
    Mat x(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int d = line_of_qubit[j];
            double denom = std::abs(alpha(j, d));
            if (denom == 0.0)
                throw ZeroDenominatorError(
                    "crosstalk: qubit " + std::to_string(j) +
                    " is not driven by its own line");
            double num = std::abs(alpha(i, d));
            double db =
                num == 0.0 ? -300.0 : 20.0 * std::log10(num / denom);
            x(i, j) = std::max(db, -300.0);
        }
    }
    return x;
}

DriveAmplitudeResult drive_amplitudes(const PoleResidueResponse& resp,
                                      const PortLayout& layout,
                                      const Vec& omega_bar,
                                      const Mat& jd_rescale, double omega_d) {
    int n = layout.n_junction(), nd = layout.n_drive();
    DriveAmplitudeResult out;
    out.alpha_plus = CMat::Zero(n, nd);
    out.alpha_minus = CMat::Zero(n, nd);
    auto parts = resp.split();
    for (int sign = 0; sign < 2; ++sign) {
        double wd = sign == 0 ? omega_d : -omega_d;
        CMat filt = drive_filter(resp, layout, wd);
        Eigen::FullPivLU<CMat> lu(filt);
        if (!lu.isInvertible())
            throw SingularAtFrequencyError(
                "drive filter not invertible at the drive frequency");
        CMat filt_inv = lu.inverse();
        CMat num(n, nd);
        for (int i = 0; i < n; ++i) {
            // ac part (reciprocal + nonreciprocal incl. E_inf) at the
            // qubit frequency, reciprocal dc block at the drive frequency.
            CMat ac = parts.ac(omega_bar(i));
            if (resp.kind() == Kind::Admittance)
                ac += resp.nr_dc().cast<Complex>();
            CMat dc = dc_reciprocal(resp, wd);
            if (resp.kind() == Kind::Impedance)
                dc *= wd / omega_bar(i);
            CMat row = jd_rescale.cast<Complex>() *
                       take_block(ac + dc, layout.junction_rows,
                                  layout.drive_rows);
            num.row(i) = row.row(i);
        }
        CMat alpha = num * filt_inv;
        if (sign == 0)
            out.alpha_plus = alpha;
        else
            out.alpha_minus = alpha;
    }
    return out;
}

}  // namespace imqed
