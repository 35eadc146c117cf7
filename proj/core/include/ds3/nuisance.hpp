#pragma once

#include <Eigen/Core>

namespace ds3 {

/// Numerically stable logistic function exp(x) / (1 + exp(x)).
double expit(double x);

/// Inverse of expit on (0, 1).
double logit(double p);

/// Linear projection model fitted by least squares. coef is (p+1) x k with
/// the intercept row first.
struct ProjectionFit {
    Eigen::MatrixXd coef;
    bool ridge_used = false;
};

/// Column-wise least squares of y on [1, x]. If the Gram matrix is
/// numerically singular the fit is retried with a ridge term (ridge_eps
/// relative to the mean non-intercept diagonal) and ridge_used is set.
/// Requires at least p + 2 rows.
ProjectionFit fit_projection_ols(const Eigen::MatrixXd& x_labeled,
                                 const Eigen::MatrixXd& y_labeled,
                                 double ridge_eps);

/// Row i of the result is [1, x_i] * coef.
Eigen::MatrixXd predict_projection(const ProjectionFit& fit, const Eigen::MatrixXd& x);

enum class PropensityKind { constant, offset_logistic };

/// Fitted labeling-probability model.
struct PropensityFit {
    PropensityKind kind = PropensityKind::constant;
    double rate = 1.0;           // constant kind
    double offset = 0.0;         // offset_logistic kind, fixed (not fitted)
    double intercept = 0.0;      // offset_logistic kind, 0 unless fitted
    Eigen::VectorXd gamma;       // offset_logistic kind
    bool converged = true;
    int iterations = 0;
};

/// rate = mean(r_train). Errors if r_train is empty or all-zero.
PropensityFit fit_propensity_constant(const Eigen::VectorXi& r_train);

/// Bernoulli MLE of P(r = 1 | x) = expit(offset + [intercept +] x' gamma)
/// via iteratively reweighted least squares with step-halving whenever the
/// log-likelihood would decrease. converged is true iff the max coefficient
/// change fell below tol within max_iter iterations; coefficients running
/// past 1e6 in absolute value are treated as separation and flagged
/// converged = false. A singular weighted Gram falls back to a small ridge.
PropensityFit fit_propensity_offset_logistic(const Eigen::MatrixXd& x_train,
                                             const Eigen::VectorXi& r_train,
                                             double offset,
                                             bool include_intercept,
                                             double tol,
                                             int max_iter);

/// Model probabilities clamped to [floor, 1].
Eigen::VectorXd predict_propensity(const PropensityFit& fit, const Eigen::MatrixXd& x,
                                   double floor);

/// Bernoulli log-likelihood of r under the fitted model, evaluated on (x, r).
double propensity_log_likelihood(const PropensityFit& fit, const Eigen::MatrixXd& x,
                                 const Eigen::VectorXi& r);

}  // namespace ds3
