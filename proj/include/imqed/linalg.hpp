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

#ifndef IMQED_LINALG_HPP
#define IMQED_LINALG_HPP

#include <Eigen/Dense>
#include <complex>

namespace imqed {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline Mat sym_part(const Mat& m) { return 0.5 * (m + m.transpose()); }
inline Mat antisym_part(const Mat& m) { return 0.5 * (m - m.transpose()); }
inline CMat sym_part(const CMat& m) { return 0.5 * (m + m.transpose()); }
inline CMat antisym_part(const CMat& m) { return 0.5 * (m - m.transpose()); }

inline double rel_asymmetry(const Mat& m) {
    double scale = m.norm();
    if (scale == 0.0) return 0.0;
    return (m - m.transpose()).norm() / scale;
}

inline double rel_symmetry(const Mat& m) {
    double scale = m.norm();
    if (scale == 0.0) return 0.0;
    return (m + m.transpose()).norm() / scale;
}

// Smallest eigenvalue of a symmetric matrix (input symmetrized first).
inline double min_eigenvalue_sym(const Mat& m) {
    if (m.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(sym_part(m));
    return es.eigenvalues().minCoeff();
}

// PSD within the slack lambda_min >= -tol_rel * trace (trace >= 0 assumed).
inline bool is_psd(const Mat& m, double tol_rel = 1e-10) {
    if (m.rows() == 0) return true;
    double tr = m.trace();
    double slack = tol_rel * std::max(tr, m.norm());
    return min_eigenvalue_sym(m) >= -slack;
}

inline bool all_finite(const Mat& m) { return m.allFinite(); }
inline bool all_finite(const CMat& m) {
    return m.real().allFinite() && m.imag().allFinite();
}

}  // namespace imqed

#endif
