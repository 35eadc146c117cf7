#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace ds3 {

/// Influence-function covariance: mean of phi phi' over the contributions.
/// Contributions are mean-zero at the solved estimate by construction, so no
/// centering is applied.
struct CovarianceEstimate {
    Eigen::MatrixXd v_hat;
    Eigen::Index m_used = 0;
};

CovarianceEstimate empirical_covariance(const Eigen::MatrixXd& contribs);

struct TestResult {
    double statistic = 0.0;
    double threshold = 0.0;
    bool reject = false;
    std::pair<Eigen::Index, Eigen::Index> dof;  // (q, m_used - q)
    double alpha = 0.0;
};

/// One-sample Hotelling-style test of theta_hat against theta0 using the
/// influence covariance. The default statistic is the F-scaled quadratic form
///   m (m - q) / (q (m - 1)) * d' V^-1 d,   d = theta_hat - theta0,
/// compared against the (1 - alpha) F quantile with (q, m - q) degrees of
/// freedom; at q = 1 it reduces to the squared z statistic. With
/// literal_formula the statistic is the bare quadratic form d' V^-1 d against
/// the same threshold, kept for auditability.
TestResult hotelling_test(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& theta0,
                          const CovarianceEstimate& cov, double alpha,
                          bool literal_formula = false);

/// Per-coordinate normal-theory intervals:
///   theta_j +/- normal_quantile(1 - alpha/2) * sqrt(v_jj / m_used).
std::vector<std::pair<double, double>> wald_intervals(const Eigen::VectorXd& theta_hat,
                                                      const CovarianceEstimate& cov,
                                                      double alpha);

}  // namespace ds3
