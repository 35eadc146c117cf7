#include "ds3/inference.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

#include "ds3/distributions.hpp"
#include "ds3/error.hpp"
#include "sym_solve.hpp"

namespace ds3 {

CovarianceEstimate empirical_covariance(const Eigen::MatrixXd& contribs) {
    const Eigen::Index m = contribs.rows();
    if (m < 2) throw InsufficientDataError("covariance needs at least 2 contributions");
    if (!contribs.allFinite()) throw DataError("non-finite influence contribution");
    CovarianceEstimate cov;
    cov.v_hat = detail::exact_symmetric_gram(contribs) / static_cast<double>(m);
    cov.m_used = m;
    return cov;
}

TestResult hotelling_test(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& theta0,
                          const CovarianceEstimate& cov, double alpha, bool literal_formula) {
    const Eigen::Index q = theta_hat.size();
    if (theta0.size() != q) throw ShapeError("hotelling test: hypothesis dimension mismatch");
    if (cov.v_hat.rows() != q || cov.v_hat.cols() != q)
        throw ShapeError("hotelling test: covariance dimension mismatch");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must be in (0, 1)");
    const Eigen::Index m = cov.m_used;
    if (m <= q) throw InsufficientDataError("hotelling test needs m_used > q");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov.v_hat,
                                                       Eigen::EigenvaluesOnly);
    const double trace = cov.v_hat.trace();
    if (!(eig.eigenvalues().minCoeff() > 1e-12 * trace))
        throw SingularError("singular influence covariance");

    const Eigen::VectorXd d = theta_hat - theta0;
    const double quad = d.dot(Eigen::LDLT<Eigen::MatrixXd>(cov.v_hat).solve(d));

    TestResult result;
    result.alpha = alpha;
    result.dof = {q, m - q};
    if (literal_formula) {
        result.statistic = quad;
    } else {
        // F-scaled quadratic form; equals the squared z statistic at q = 1.
        const double md = static_cast<double>(m);
        const double qd = static_cast<double>(q);
        result.statistic = quad * md * (md - qd) / (qd * (md - 1.0));
    }
    result.threshold = f_quantile(q, m - q, 1.0 - alpha);
    result.reject = result.statistic >= result.threshold;
    return result;
}

std::vector<std::pair<double, double>> wald_intervals(const Eigen::VectorXd& theta_hat,
                                                      const CovarianceEstimate& cov,
                                                      double alpha) {
    const Eigen::Index q = theta_hat.size();
    if (cov.v_hat.rows() != q) throw ShapeError("wald intervals: covariance dimension mismatch");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must be in (0, 1)");
    if (cov.m_used < 1) throw InsufficientDataError("wald intervals: no contributions");
    const double z = normal_quantile(1.0 - alpha / 2.0);
    std::vector<std::pair<double, double>> intervals;
    intervals.reserve(static_cast<std::size_t>(q));
    for (Eigen::Index j = 0; j < q; ++j) {
        const double vjj = cov.v_hat(j, j);
        if (vjj < 0.0) throw DataError("negative covariance diagonal");
        const double half = z * std::sqrt(vjj / static_cast<double>(cov.m_used));
        intervals.emplace_back(theta_hat(j) - half, theta_hat(j) + half);
    }
    return intervals;
}

}  // namespace ds3
