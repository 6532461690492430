/*
   Copyright 2026 The freqflux Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "freqflux/errors.hpp"

namespace freqflux {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Reciprocal 1-norm condition estimates below this are treated as singular.
inline constexpr double kSingularRcond = 1e-12;

inline double inf_norm(const Mat& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double inf_norm(const Vec& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// LU factorization that refuses to hand back a factorization of a matrix
/// whose estimated reciprocal condition number is below `min_rcond`.
template <typename MatrixType>
class CheckedLu {
public:
    CheckedLu(const MatrixType& m, std::string name, double min_rcond = kSingularRcond,
              const std::string& hint = {})
        : lu_(m), name_(std::move(name)) {
        if (m.rows() != m.cols()) {
            throw Error(ErrorKind::dimension_mismatch, name_ + " is not square");
        }
        rcond_ = m.rows() == 0 ? 1.0 : lu_.rcond();
        if (!(rcond_ >= min_rcond)) {
            throw SingularMatrixError(name_, rcond_, hint);
        }
    }

    double rcond() const { return rcond_; }
    double condition_estimate() const { return 1.0 / rcond_; }

    template <typename Rhs>
    auto solve(const Rhs& rhs) const {
        return lu_.solve(rhs).eval();
    }

    MatrixType inverse() const { return lu_.inverse(); }

private:
    Eigen::PartialPivLU<MatrixType> lu_;
    std::string name_;
    double rcond_ = 0.0;
};

using RealLu = CheckedLu<Mat>;
using ComplexLu = CheckedLu<CMat>;

struct PseudoInverse {
    Mat matrix;
    Eigen::Index rank = 0;
    double tolerance = 0.0;  ///< absolute singular-value cutoff actually used
};

/// Moore-Penrose pseudo-inverse via SVD; singular values below
/// `relative_tolerance * sigma_max` are treated as zero.
inline PseudoInverse pseudo_inverse(const Mat& a, double relative_tolerance = 1e-10) {
    PseudoInverse out;
    if (a.size() == 0) {
        out.matrix = Mat::Zero(a.cols(), a.rows());
        return out;
    }
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& s = svd.singularValues();
    out.tolerance = relative_tolerance * s(0);
    Vec inv = Vec::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > out.tolerance) {
            inv(i) = 1.0 / s(i);
            ++out.rank;
        }
    }
    out.matrix = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    return out;
}

}  // namespace freqflux
