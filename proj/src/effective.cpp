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

#include "imqed/effective.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "imqed/dissipation.hpp"
#include "imqed/log.hpp"
#include "imqed/units.hpp"
#include "json.hpp"

namespace imqed {

std::string to_string(Route r) {
    switch (r) {
        case Route::Y: return "y";
        case Route::Z: return "z";
        case Route::Auto: return "auto";
    }
    return "?";
}

std::string to_string(DirectMode m) {
    switch (m) {
        case DirectMode::Numeric: return "numeric";
        case DirectMode::Perturbative: return "perturbative";
        case DirectMode::None: return "none";
    }
    return "?";
}

PortLayout layout_from_circuit(const Circuit& c) {
    PortLayout out;
    for (int k = 0; k < c.n_ports(); ++k) {
        if (const auto* j = std::get_if<JunctionPort>(&c.ports[k])) {
            out.junction_rows.push_back(k);
            out.junction.push_back({j->label, j->e_j, j->c_j});
        } else {
            const auto& d = std::get<DrivePort>(c.ports[k]);
            out.drive_rows.push_back(k);
            out.z0.push_back(d.z0);
        }
    }
    return out;
}

double dressed_frequency(double omega_tilde, double e_c_radps, double zeta) {
    double r = e_c_radps / omega_tilde;
    double root = std::sqrt(1.0 + zeta);
    return omega_tilde * root *
           (1.0 - r / (std::pow(1.0 + zeta, 1.5) - r));
}

double dressed_frequency_residual(double omega_bar, double omega_tilde,
                                  double e_c_radps, double zeta) {
    return omega_bar * omega_bar -
           omega_tilde * omega_tilde *
               (1.0 + zeta - 2.0 * e_c_radps / omega_bar);
}

double lamb_shifted_frequency(const PoleResidueResponse& resp, int row,
                              double omega_bar, double c_eff) {
    CMat ac = resp.split().ac(omega_bar);
    if (resp.kind() == Kind::Admittance)
        return omega_bar - ac(row, row).imag() / (2.0 * c_eff);
    // Z route: divide by 2 L_bar = 2 / (C w^2).
    return omega_bar -
           ac(row, row).imag() * c_eff * omega_bar * omega_bar / 2.0;
}

namespace {

// Response numerator entering the hopping: everything except the
// reciprocal dc part, at s = i omega.
CMat hopping_numerator(const PoleResidueResponse& resp, double omega) {
    CMat out = resp.split().ac(omega);
    if (resp.kind() == Kind::Admittance)
        out += resp.nr_dc().cast<Complex>();
    return out;
}

}  // namespace

Complex hopping(const PoleResidueResponse& resp, int row_i, int row_j,
                double wbar_i, double wbar_j, double c_i, double c_j) {
    CMat yi = hopping_numerator(resp, wbar_i);
    CMat yj = hopping_numerator(resp, wbar_j);
    Complex pref(0.0, 0.25 * std::sqrt(wbar_i * wbar_j / (c_i * c_j)));
    if (resp.kind() == Kind::Admittance)
        return pref *
               (yi(row_i, row_j) / wbar_i + yj(row_i, row_j) / wbar_j);
    // Z route carries 1/sqrt(Lbar_i Lbar_j) = sqrt(C_i C_j) w_i w_j.
    Complex prefz(0.0, 0.25 * std::sqrt(wbar_i * wbar_j * c_i * c_j));
    return prefz *
           (wbar_j * yi(row_i, row_j) + wbar_i * yj(row_i, row_j));
}

double cross_kerr(double omega_bar, double delta, double e_c,
                  double pole_omega, double g_qq, double g_qpi) {
    double lor = pole_omega / (pole_omega * pole_omega -
                               omega_bar * omega_bar);
    return 2.0 * delta * (1.0 - 2.0 * e_c / omega_bar) * lor * lor *
           (g_qq * g_qq + g_qpi * g_qpi);
}

namespace {

struct Dressing {
    Mat w_rows;      // junction response transform (rows; W Y W^T on JJ)
    Vec omega_lin;   // linear junction-sector frequencies (rad/s)
    Vec omega_tilde; // bare-plasma part per mode (rad/s)
    Vec c_diag;      // per-mode capacitance for E_C (F)
    Mat j_extra;     // real direct-coupling additions to J
};

Mat junction_block(const Mat& m, const std::vector<int>& rows) {
    Mat out(rows.size(), rows.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows.size(); ++j)
            out(i, j) = m(rows[i], rows[j]);
    return out;
}

// Greedy column-to-junction matching so dressed modes keep port labels.
std::vector<int> match_modes(const Mat& overlap) {
    int n = static_cast<int>(overlap.rows());
    std::vector<int> col_of_row(n, -1);
    std::vector<bool> used(n, false);
    for (int pass = 0; pass < n; ++pass) {
        double best = -1.0;
        int bi = -1, bc = -1;
        for (int i = 0; i < n; ++i) {
            if (col_of_row[i] >= 0) continue;
            for (int c = 0; c < n; ++c) {
                if (used[c]) continue;
                if (std::abs(overlap(i, c)) > best) {
                    best = std::abs(overlap(i, c));
                    bi = i;
                    bc = c;
                }
            }
        }
        col_of_row[bi] = bc;
        used[bc] = true;
    }
    return col_of_row;
}

Dressing make_dressing(const PoleResidueResponse& resp,
                       const PortLayout& layout, Route route,
                       DirectMode mode, std::vector<std::string>* warnings,
                       double warn_ratio) {
    int n = layout.n_junction();
    Dressing d;
    d.j_extra = Mat::Zero(n, n);

    // Junction-sector capacitance matrix.
    Mat c_jj;
    if (route == Route::Y) {
        c_jj = junction_block(resp.cap_dc(), layout.junction_rows);
    } else {
        Eigen::FullPivLU<Mat> lu(resp.ind_dc());
        if (!lu.isInvertible())
            throw SingularDcResidueError(
                "A_0 singular: use admittance route");
        Mat c_full = lu.inverse();
        c_jj = junction_block(c_full, layout.junction_rows);
    }

    Vec l_tilde_inv(n);
    for (int i = 0; i < n; ++i)
        l_tilde_inv(i) = 1.0 / layout.junction[i].l_tilde();
    Mat l_resp_inv = Mat::Zero(n, n);
    if (route == Route::Y)
        l_resp_inv = junction_block(resp.ind_dc(), layout.junction_rows);

    if (mode == DirectMode::Numeric) {
        Eigen::SelfAdjointEigenSolver<Mat> esc(c_jj);
        Mat o_c = esc.eigenvectors();
        Vec c_bar = esc.eigenvalues();
        Mat half = Mat(c_bar.cwiseSqrt().cwiseInverse().asDiagonal()) *
                   o_c.transpose();
        Mat stiff = Mat(l_resp_inv);
        stiff.diagonal() += l_tilde_inv;
        Mat k = half * stiff * half.transpose();
        Eigen::SelfAdjointEigenSolver<Mat> eso(k);
        Mat o_w = eso.eigenvectors();
        Mat w = o_w.transpose() * half;  // O_W^T Cbar^-1/2 O_C^T
        // permute dressed modes back onto junction labels
        Mat overlap = o_c * o_w;
        auto col = match_modes(overlap);
        Mat w_sorted(n, n);
        Vec wl(n), wt(n), cd(n);
        Mat jpart = half * Mat(l_tilde_inv.asDiagonal()) * half.transpose();
        Mat jplasma = o_w.transpose() * jpart * o_w;
        for (int i = 0; i < n; ++i) {
            int c = col[i];
            Mat row = w.row(c);
            if (overlap(i, c) < 0.0) row = -row;
            w_sorted.row(i) = row;
            wl(i) = std::sqrt(eso.eigenvalues()(c));
            wt(i) = std::sqrt(jplasma(c, c));
            cd(i) = c_jj(i, i);
        }
        if (route == Route::Z) {
            // Zbar = W_z Z W_z^T with W_z = O_W^T Cbar^1/2 O_C^T.
            Mat halfp = Mat(c_bar.cwiseSqrt().asDiagonal()) *
                        o_c.transpose();
            Mat wz = o_w.transpose() * halfp;
            for (int i = 0; i < n; ++i) {
                int c = col[i];
                Mat row = wz.row(c);
                if (overlap(i, c) < 0.0) row = -row;
                w_sorted.row(i) = row;
            }
        }
        d.w_rows = w_sorted;
        d.omega_lin = wl;
        d.omega_tilde = wt;
        d.c_diag = cd;
    } else {
        // Perturbative / none: diagonal dressing, off-diagonal direct
        // couplings added to J (perturbative) or ignored (none).
        Mat c_inv = c_jj.inverse();
        Vec c_delta(n), wlin(n), wt(n);
        for (int i = 0; i < n; ++i) {
            c_delta(i) = 1.0 / c_inv(i, i);
            wt(i) = std::sqrt(l_tilde_inv(i) / c_delta(i));
            wlin(i) = std::sqrt((l_tilde_inv(i) + l_resp_inv(i, i)) /
                                c_delta(i));
        }
        Mat w = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i)
            w(i, i) = route == Route::Y ? 1.0 / std::sqrt(c_delta(i))
                                        : std::sqrt(c_delta(i));
        d.w_rows = w;
        d.omega_lin = wlin;
        d.omega_tilde = wt;
        d.c_diag = c_delta;

        double direct_ratio = 0.0;
        if (mode == DirectMode::Perturbative) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    double ww = std::sqrt(wlin(i) * wlin(j));
                    double cc = std::sqrt(c_delta(i) * c_delta(j));
                    double o_cx = ww * cc * c_inv(i, j);
                    double o_lx = l_resp_inv(i, j) / (ww * cc);
                    d.j_extra(i, j) += 0.5 * (o_cx + o_lx);
                    direct_ratio = std::max(
                        direct_ratio, std::abs(o_cx + o_lx) /
                                          std::abs(wlin(i) - wlin(j) +
                                                   1e-300));
                }
            }
            if (warnings && direct_ratio > warn_ratio)
                warnings->push_back(
                    "direct coupling ratio " + std::to_string(direct_ratio) +
                    " beyond the perturbative comfort zone");
        }
    }

    // Second-order correction from direct nonreciprocal port coupling.
    if (route == Route::Y) {
        Mat e_inf = junction_block(resp.nr_dc(), layout.junction_rows);
        if (e_inf.norm() > 0.0) {
            Mat ybar_g;
            if (mode == DirectMode::Numeric) {
                // dressed with the same W (its C^-1/2 content)
                ybar_g = d.w_rows * e_inf * d.w_rows.transpose();
            } else {
                Mat cinvh = d.c_diag.cwiseSqrt().cwiseInverse().asDiagonal();
                ybar_g = cinvh * e_inf * cinvh;
            }
            for (int i = 0; i < d.j_extra.rows(); ++i)
                for (int j = 0; j < d.j_extra.cols(); ++j) {
                    double v = (ybar_g.transpose() * ybar_g)(i, j) /
                               (4.0 * std::sqrt(d.omega_lin(i) *
                                                d.omega_lin(j)));
                    if (i != j) d.j_extra(i, j) += 0.5 * v;
                }
        }
    }
    return d;
}

}  // namespace

EffectiveModel build_effective_model(const PoleResidueResponse& resp,
                                     const PortLayout& layout,
                                     const BuildOptions& opts) {
    Route route = opts.route;
    if (route == Route::Auto)
        route = resp.kind() == Kind::Admittance ? Route::Y : Route::Z;
    if ((route == Route::Y) != (resp.kind() == Kind::Admittance))
        throw InvalidRouteError("response kind does not match the route");
    if (route == Route::Z && layout.shunt_inductance_declared)
        throw InvalidRouteError(
            "shunting inductance with the impedance route: extract the "
            "shunting inductance out of the response and dress the bare "
            "junction inductance instead, or use the admittance route");

    EffectiveModel m;
    m.route = route;
    m.direct_mode = opts.direct_mode;
    int n = layout.n_junction();
    m.n_qubits = n;

    Dressing dress = make_dressing(resp, layout, route, opts.direct_mode,
                                   &m.warnings, opts.warn_direct_ratio);

    m.omega_bar.resize(n);
    m.omega.resize(n);
    m.delta.resize(n);
    m.e_c.resize(n);
    m.c_eff = dress.c_diag;
    m.zeta.resize(n);
    for (int i = 0; i < n; ++i) {
        double e_c = opts.include_anharmonicity
                         ? charging_energy_radps(dress.c_diag(i))
                         : 0.0;
        double wt = dress.omega_tilde(i);
        if (e_c / wt > opts.nontransmon_warn)
            m.warnings.push_back("qubit " + std::to_string(i) +
                                 " outside the transmon regime: E_C/w_J = " +
                                 std::to_string(e_c / wt));
        double zeta_eff =
            dress.omega_lin(i) * dress.omega_lin(i) / (wt * wt) - 1.0;
        m.zeta(i) = zeta_eff;
        m.e_c(i) = e_c;
        m.omega_bar(i) = dressed_frequency(wt, e_c, zeta_eff);
        m.delta(i) = -e_c * (wt * wt) / (m.omega_bar(i) * m.omega_bar(i));
    }

    // Lamb shifts and hopping from the dressed response.
    auto parts = resp.split();
    auto dressed_jj = [&](double w) {
        CMat full = parts.ac(w);
        if (route == Route::Y) full += resp.nr_dc().cast<Complex>();
        if (route == Route::Z && opts.direct_mode != DirectMode::Numeric)
            full += resp.ind_dc().cast<Complex>() / Complex(0.0, w);
        CMat jj(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                jj(i, j) =
                    full(layout.junction_rows[i], layout.junction_rows[j]);
        return CMat(dress.w_rows.cast<Complex>() * jj *
                    dress.w_rows.transpose().cast<Complex>());
    };

    m.j_matrix = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        CMat di = dressed_jj(m.omega_bar(i));
        if (route == Route::Y) {
            m.omega(i) = m.omega_bar(i) - di(i, i).imag() / 2.0;
        } else {
            m.omega(i) =
                m.omega_bar(i) * (1.0 - m.omega_bar(i) * di(i, i).imag() / 2.0);
        }
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            CMat dj = dressed_jj(m.omega_bar(j));
            Complex jij;
            if (route == Route::Y) {
                jij = Complex(0.0, 0.25) *
                      std::sqrt(m.omega_bar(i) * m.omega_bar(j)) *
                      (di(i, j) / m.omega_bar(i) + dj(i, j) / m.omega_bar(j));
            } else {
                jij = Complex(0.0, 0.25) *
                      std::sqrt(m.omega_bar(i) * m.omega_bar(j)) *
                      (m.omega_bar(j) * di(i, j) + m.omega_bar(i) * dj(i, j));
            }
            m.j_matrix(i, j) = jij + 0.5 * (dress.j_extra(i, j) +
                                            dress.j_extra(j, i));
        }
    }
    // enforce J_ji = conj(J_ij) exactly
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Complex avg = 0.5 * (m.j_matrix(i, j) +
                                 std::conj(m.j_matrix(j, i)));
            m.j_matrix(i, j) = avg;
            m.j_matrix(j, i) = std::conj(avg);
        }

    // Inner modes and dispersive shifts from the Cauer ratios.
    CauerSynthesis syn = synthesize(resp);
    auto dressed_ratio = [&](const Vec& full) {
        Vec jr(n);
        for (int i = 0; i < n; ++i) jr(i) = full(layout.junction_rows[i]);
        return Vec(dress.w_rows * jr);
    };
    auto add_mode = [&](double w_mode, bool reciprocal, const Vec& gl,
                        const Vec& gr) {
        InnerMode mode;
        mode.omega = w_mode;
        mode.reciprocal = reciprocal;
        mode.chi.resize(n);
        for (int i = 0; i < n; ++i) {
            double wb = m.omega_bar(i);
            double g_scale_q, g_scale_pi;
            if (route == Route::Y) {
                // g = sqrt(wb/w) ratio_i / sqrt(C_i); the 1/sqrt(C) lives
                // in the dressed ratio already.
                g_scale_q = std::sqrt(wb / w_mode) * gl(i);
                g_scale_pi = std::sqrt(wb / w_mode) * gr(i);
            } else {
                g_scale_q = std::sqrt(wb * w_mode) * gl(i);
                g_scale_pi = std::sqrt(wb * w_mode) * gr(i);
            }
            mode.chi(i) = cross_kerr(wb, m.delta(i), m.e_c(i), w_mode,
                                     g_scale_q, g_scale_pi);
        }
        m.inner_modes.push_back(std::move(mode));
    };
    for (const auto& r : syn.reciprocal)
        add_mode(r.omega, true, dressed_ratio(r.ratio), Vec::Zero(n));
    for (const auto& g : syn.nonreciprocal)
        add_mode(g.omega, false, dressed_ratio(g.ratio_left),
                 dressed_ratio(g.ratio_right));
    std::sort(m.inner_modes.begin(), m.inner_modes.end(),
              [](const InnerMode& a, const InnerMode& b) {
                  return a.omega < b.omega;
              });

    // Dissipative sector.
    int nd = layout.n_drive();
    m.gamma = CMat::Zero(n, n);
    m.crosstalk_db = Mat::Zero(n, n);
    if (opts.with_dissipation && nd > 0) {
        Mat jd_rescale = dress.w_rows;
        if (route == Route::Z) {
            // gamma and drive rows carry w_i sqrt(C_i) Z factors; the
            // omega factor is applied inside decay_matrix.
        }
        m.gamma_uses_dressed_response =
            opts.direct_mode == DirectMode::Numeric;
        m.gamma = decay_matrix(resp, layout, m.omega_bar, jd_rescale);
        if (!is_psd(m.gamma.real(), 1e-10) ||
            m.gamma.imag().diagonal().norm() > 1e-12 * m.gamma.norm()) {
            // Hermitian by construction; PSD asserted via eigenvalues.
        }
        Eigen::SelfAdjointEigenSolver<CMat> eg(m.gamma);
        if (eg.eigenvalues().minCoeff() <
            -1e-12 * std::max(m.gamma.real().trace(), 0.0) - 1e-300)
            throw NumericalError("decay matrix failed the PSD check");

        // secular grouping on |w_i - w_j| <= c min(gamma_ii, gamma_jj)
        std::vector<int> parent(n);
        for (int i = 0; i < n; ++i) parent[i] = i;
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double gi = m.gamma(i, i).real(), gj = m.gamma(j, j).real();
                if (std::abs(m.omega_bar(i) - m.omega_bar(j)) <=
                    opts.secular_c * std::min(gi, gj))
                    parent[find(j)] = find(i);
            }
        std::map<int, std::vector<int>> groups;
        for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
        for (auto& [root, members] : groups)
            m.secular_groups.push_back(members);

        if (opts.tone) {
            const auto& tone = *opts.tone;
            auto amps = drive_amplitudes(resp, layout, m.omega_bar,
                                         jd_rescale, tone.omega_d);
            m.alpha = amps.alpha_plus;
            m.drives.assign(n, std::vector<DriveEnvelope>(nd));
            for (int i = 0; i < n; ++i) {
                for (int d = 0; d < nd; ++d) {
                    DriveEnvelope env;
                    env.omega_d = tone.omega_d;
                    double pref;
                    Complex unit;
                    if (route == Route::Y) {
                        pref = tone.v_volt /
                               (2.0 * std::sqrt(2.0) * layout.z0[d] *
                                std::sqrt(kHbar * m.omega_bar(i)));
                        unit = Complex(0.0, -1.0);
                    } else {
                        pref = tone.v_volt * std::sqrt(m.omega_bar(i) / kHbar) /
                               (2.0 * std::sqrt(2.0));
                        unit = Complex(-1.0, 0.0);
                    }
                    env.coef_plus = unit * pref * amps.alpha_plus(i, d);
                    env.coef_minus = -unit * pref * amps.alpha_minus(i, d);
                    m.drives[i][d] = env;
                }
            }
            std::vector<int> line(n);
            for (int i = 0; i < n; ++i) line[i] = std::min(i, nd - 1);
            m.crosstalk_db = crosstalk(m.alpha, line);
        }
    } else {
        for (int i = 0; i < n; ++i) m.secular_groups.push_back({i});
    }
    return m;
}

EffectiveModel build_effective_model(const Circuit& c,
                                     const BuildOptions& opts) {
    PortLayout layout = layout_from_circuit(c);
    Route route = opts.route;
    std::optional<PoleResidueResponse> resp;
    if (route == Route::Z || route == Route::Auto) {
        try {
            PoleResidueResponse z = extract_pole_residue(c, Kind::Impedance);
            // the impedance route needs a nonsingular A_0
            Eigen::FullPivLU<Mat> lu(z.ind_dc());
            if (!lu.isInvertible())
                throw SingularDcResidueError(
                    "A_0 singular: use admittance route");
            resp = std::move(z);
            route = Route::Z;
        } catch (const Error& e) {
            if (route == Route::Z) throw;
            log_info(std::string("auto route: impedance failed (") +
                     e.what() + "), falling back to admittance");
            route = Route::Y;
        }
    }
    if (!resp) resp = extract_pole_residue(c, Kind::Admittance);
    BuildOptions o2 = opts;
    o2.route = route;
    return build_effective_model(*resp, layout, o2);
}

// --------------------------------------------------------------------
// Phase-space assembly (admittance route)
// --------------------------------------------------------------------

PhaseSpaceModel assemble_phase_space(const PoleResidueResponse& resp,
                                     const PortLayout& layout,
                                     Elimination elim,
                                     bool include_junction_l) {
    if (resp.kind() != Kind::Admittance)
        throw InvalidRouteError(
            "phase-space assembly uses the admittance response");
    int n = layout.n_junction();
    // Junction-sector sub-response.
    const auto& rows = layout.junction_rows;
    auto sub = [&](const Mat& m) { return junction_block(m, rows); };
    std::vector<AcPole> poles;
    for (const auto& p : resp.ac_poles()) {
        AcPole q;
        q.omega = p.omega;
        q.res_sym = sub(p.res_sym);
        q.res_anti = sub(p.res_anti);
        poles.push_back(std::move(q));
    }
    PoleResidueResponse jresp(Kind::Admittance, n, sub(resp.cap_dc()),
                              sub(resp.ind_dc()), sub(resp.nr_dc()), poles);
    CauerSynthesis syn = synthesize(jresp);

    int nrec = static_cast<int>(syn.reciprocal.size());
    int ngyr = static_cast<int>(syn.nonreciprocal.size());
    int np = n + nrec + 2 * ngyr;
    Mat h = Mat::Zero(2 * np, 2 * np);
    auto xi = [&](int k) { return k; };
    auto pi_ = [&](int k) { return np + k; };

    Mat c_jj = sub(resp.cap_dc());
    Mat c_inv = c_jj.inverse();
    Mat e_inf = sub(resp.nr_dc());
    Mat l_inv = sub(resp.ind_dc());

    // transformer matrix T = [r_1 .. r_m | nL_1 nR_1 .. ] (n x (m+2l))
    int ni = nrec + 2 * ngyr;
    Mat t = Mat::Zero(n, ni);
    for (int g = 0; g < nrec; ++g) t.col(g) = syn.reciprocal[g].ratio;
    for (int g = 0; g < ngyr; ++g) {
        t.col(nrec + 2 * g) = syn.nonreciprocal[g].ratio_left;
        t.col(nrec + 2 * g + 1) = syn.nonreciprocal[g].ratio_right;
    }
    // Z_e: zero on reciprocal coordinates, w_g W per gyrator duo.
    Mat z_e = Mat::Zero(ni, ni);
    for (int g = 0; g < ngyr; ++g) {
        double w = syn.nonreciprocal[g].omega;
        int a = nrec + 2 * g, b = nrec + 2 * g + 1;
        z_e(a, b) = -w;
        z_e(b, a) = w;
    }
    Mat c_i_inv = Mat::Zero(ni, ni);
    for (int g = 0; g < nrec; ++g)
        c_i_inv(g, g) = syn.reciprocal[g].omega * syn.reciprocal[g].omega;

    // H = 1/2 (q - Yg x/2 - T Q)^T C^-1 (.) + 1/2 x^T (L^-1 + Lt^-1) x
    //   + 1/2 (Pi - Z_e Q / 2)^T (.) + 1/2 Q^T C_I^-1 Q
    Mat half_yg = 0.5 * e_inf;
    // junction block
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            h(pi_(a), pi_(b)) += c_inv(a, b);
            h(xi(a), xi(b)) += l_inv(a, b) +
                               (half_yg.transpose() * c_inv * half_yg)(a, b);
        }
    if (include_junction_l)
        for (int a = 0; a < n; ++a)
            h(xi(a), xi(a)) += 1.0 / layout.junction[a].l_tilde();
    Mat qx = -c_inv * half_yg;  // couples q_a to x_b
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            h(pi_(a), xi(b)) += qx(a, b);
            h(xi(b), pi_(a)) += qx(a, b);
        }
    Mat qq_inner = -c_inv * t;  // q_a to Q_k
    Mat xq_inner = half_yg.transpose() * c_inv * t;  // x_a to Q_k
    Mat tt = t.transpose() * c_inv * t;
    for (int a = 0; a < n; ++a)
        for (int k = 0; k < ni; ++k) {
            h(pi_(a), xi(n + k)) += qq_inner(a, k);
            h(xi(n + k), pi_(a)) += qq_inner(a, k);
            h(xi(a), xi(n + k)) += xq_inner(a, k);
            h(xi(n + k), xi(a)) += xq_inner(a, k);
        }
    for (int k = 0; k < ni; ++k)
        for (int l = 0; l < ni; ++l) {
            h(xi(n + k), xi(n + l)) +=
                tt(k, l) + c_i_inv(k, l) +
                0.25 * (z_e.transpose() * z_e)(k, l);
            h(pi_(n + k), pi_(n + l)) += (k == l) ? 1.0 : 0.0;
            // -Pi^T Z_e Q / 2
            h(pi_(n + k), xi(n + l)) += -0.5 * z_e(k, l);
            h(xi(n + l), pi_(n + k)) += -0.5 * z_e(k, l);
        }

    QuadraticSystem raw;
    raw.h = h;
    for (int a = 0; a < n; ++a)
        raw.pairs.push_back(
            {Sector::Qubit, layout.junction[a].label, 0.0, 0.0});
    for (int g = 0; g < nrec; ++g)
        raw.pairs.push_back({Sector::ReciprocalInner,
                             "r" + std::to_string(g),
                             syn.reciprocal[g].omega, 0.0});
    for (int g = 0; g < ngyr; ++g) {
        raw.pairs.push_back({Sector::NonreciprocalInner,
                             "gL" + std::to_string(g),
                             syn.nonreciprocal[g].omega, 0.0});
        raw.pairs.push_back({Sector::NonreciprocalInner,
                             "gR" + std::to_string(g),
                             syn.nonreciprocal[g].omega, 0.0});
    }

    QuadraticSystem reduced = eliminate_nondynamical(raw, elim);
    QuadraticSystem balanced = rescale_balanced(reduced);

    PhaseSpaceModel out;
    out.system = std::move(balanced);
    if (include_junction_l) {
        for (int a = 0; a < n; ++a) {
            double z = out.system.pairs[a].z_scale;
            double c4 = -layout.junction[a].e_j * kHbar * z * z /
                        (24.0 * kPhi0 * kPhi0 * kPhi0 * kPhi0);
            out.quartics.push_back({a, c4});
        }
    }
    return out;
}

CMat j_matrix_from_phase_space(const PoleResidueResponse& resp,
                               const PortLayout& layout, Elimination elim,
                               const SwOptions& sw) {
    PhaseSpaceModel psm = assemble_phase_space(resp, layout, elim, true);
    auto qubits = psm.system.sector_pairs(Sector::Qubit);
    auto res = sw_block_diagonalize(psm.system, qubits, sw);
    int n = static_cast<int>(qubits.size());
    CMat j = CMat::Zero(n, n);
    const Mat& ha = res.h_eff_a;  // (x..x, p..p) over qubit pairs
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (i == k) continue;
            double re = 0.5 * (ha(i, k) + ha(n + i, n + k));
            double im = 0.5 * (ha(i, n + k) - ha(k, n + i));
            j(i, k) = Complex(re, im);
        }
    return j;
}

// --------------------------------------------------------------------
// model.v1 JSON
// --------------------------------------------------------------------

std::string model_to_json(const EffectiveModel& m) {
    using nlohmann::json;
    json j;
    j["schema"] = "model.v1";
    j["units"] = {{"frequencies", "GHz (omega/2pi)"},
                  {"rates", "GHz (gamma/2pi)"},
                  {"complex", "[re, im]"}};
    j["route"] = to_string(m.route);
    j["direct_mode"] = to_string(m.direct_mode);
    j["gamma_response"] =
        m.gamma_uses_dressed_response ? "dressed" : "bare";
    json qubits = json::array();
    for (int i = 0; i < m.n_qubits; ++i) {
        qubits.push_back({{"omega_ghz", radps_to_ghz(m.omega(i))},
                          {"omega_bar_ghz", radps_to_ghz(m.omega_bar(i))},
                          {"delta_ghz", radps_to_ghz(m.delta(i))},
                          {"e_c_ghz", radps_to_ghz(m.e_c(i))},
                          {"zeta", m.zeta(i)},
                          {"c_eff_ff", m.c_eff(i) * 1e15}});
    }
    j["qubits"] = qubits;
    auto cmat_to_json = [](const CMat& c) {
        json arr = json::array();
        for (int i = 0; i < c.rows(); ++i)
            for (int k = 0; k < c.cols(); ++k)
                arr.push_back({c(i, k).real(), c(i, k).imag()});
        return arr;
    };
    json jm = cmat_to_json(m.j_matrix / (kTwoPi * 1e9));
    j["j_matrix_ghz"] = jm;
    json thetas = json::array();
    for (int i = 0; i < m.n_qubits; ++i)
        for (int k = 0; k < m.n_qubits; ++k)
            if (i != k && std::abs(m.j_matrix(i, k)) > 0.0)
                thetas.push_back({{"i", i},
                                  {"j", k},
                                  {"theta_rad", m.theta(i, k)}});
    j["hopping_phases"] = thetas;
    json inner = json::array();
    for (const auto& mode : m.inner_modes) {
        json chi = json::array();
        for (int i = 0; i < mode.chi.size(); ++i)
            chi.push_back(radps_to_ghz(mode.chi(i)));
        inner.push_back({{"omega_ghz", radps_to_ghz(mode.omega)},
                         {"reciprocal", mode.reciprocal},
                         {"chi_ghz", chi}});
    }
    j["inner_modes"] = inner;
    j["gamma_ghz"] = cmat_to_json(m.gamma / (kTwoPi * 1e9));
    json groups = json::array();
    for (const auto& g : m.secular_groups) groups.push_back(g);
    j["secular_groups"] = groups;
    if (m.alpha.size() > 0) j["alpha"] = cmat_to_json(m.alpha);
    if (m.crosstalk_db.size() > 0) {
        json x = json::array();
        for (int i = 0; i < m.crosstalk_db.rows(); ++i)
            for (int k = 0; k < m.crosstalk_db.cols(); ++k)
                x.push_back(m.crosstalk_db(i, k));
        j["crosstalk_db"] = x;
    }
    j["warnings"] = m.warnings;
    return j.dump(2);
}

}  // namespace imqed
