#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace ds3::detail {

// LDLT-based rank check: a symmetric matrix counts as numerically singular
// when the smallest pivot falls below rel_tol times the largest.
inline bool ldlt_near_singular(const Eigen::LDLT<Eigen::MatrixXd>& ldlt,
                               double rel_tol = 1e-12) {
    if (ldlt.info() != Eigen::Success) return true;
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    const double dmax = d.maxCoeff();
    if (!(dmax > 0.0)) return true;
    return d.minCoeff() <= rel_tol * dmax;
}

// (A' A) with the lower triangle copied from the upper one, so the result is
// exactly symmetric in floating point.
inline Eigen::MatrixXd exact_symmetric_gram(const Eigen::MatrixXd& a) {
    Eigen::MatrixXd g = a.transpose() * a;
    for (Eigen::Index r = 0; r < g.rows(); ++r)
        for (Eigen::Index c = r + 1; c < g.cols(); ++c) g(c, r) = g(r, c);
    return g;
}

}  // namespace ds3::detail
