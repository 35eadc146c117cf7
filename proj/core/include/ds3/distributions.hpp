#pragma once

#include <Eigen/Core>

namespace ds3 {

/// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1].
/// Continued-fraction evaluation, accurate to ~1e-14 relative.
double regularized_incomplete_beta(double a, double b, double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF, absolute error below 1e-10. Rational
/// initial guess refined by Newton steps on the CDF. Exactly antisymmetric:
/// normal_quantile(p) == -normal_quantile(1 - p) whenever both arguments are
/// computed as p and 1 - p in double precision.
double normal_quantile(double prob);

/// CDF of the F distribution with (d1, d2) degrees of freedom.
double f_cdf(Eigen::Index d1, Eigen::Index d2, double x);

/// Quantile of the F distribution with (d1, d2) degrees of freedom: the x
/// with I_t(d1/2, d2/2) = prob at t = d1 x / (d1 x + d2), solved by bracketed
/// Newton on the inverse incomplete beta to absolute tolerance 1e-10.
double f_quantile(Eigen::Index d1, Eigen::Index d2, double prob);

}  // namespace ds3
