#pragma once

#include <Eigen/Core>

#include <string>

#include "ds3/dataset.hpp"

namespace ds3 {

/// Held-out nuisance predictions assembled per observation: mu_hat is m x k,
/// pi_hat is m with entries in (0, 1].
struct NuisancePredictions {
    Eigen::MatrixXd mu_hat;
    Eigen::VectorXd pi_hat;
};

enum class TargetKind { mean, ols_coef };
enum class EstimatorKind { naive, or_only, ipw_only, ds3 };

const char* to_string(TargetKind t) noexcept;
const char* to_string(EstimatorKind e) noexcept;
TargetKind parse_target_kind(const std::string& s);
EstimatorKind parse_estimator_kind(const std::string& s);

/// Dimension q of the estimate: k for the mean target, p for ols_coef.
Eigen::Index target_dimension(const ObservedDataset& data, TargetKind target);

/// Second-moment matrix of the covariates with its inverse.
struct SigmaHat {
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd inverse;
};

/// mean over all m rows of x x'; inverse by symmetric factorization.
/// A numerically singular matrix raises SingularError (the ols_coef estimand
/// is undefined there).
SigmaHat sigma_hat(const ObservedDataset& data);

/// Same moment restricted to labeled rows; backs the naive ols_coef kind.
SigmaHat sigma_hat_labeled(const ObservedDataset& data);

/// Point estimate for the requested target/estimator combination.
///
/// mean target: naive averages y over labeled rows; or_only averages mu_hat;
/// ipw_only averages r y / pi over all rows; ds3 averages the augmented
/// pseudo-outcome mu + (r/pi)(y - mu).
///
/// ols_coef target (k = 1): the same pseudo-outcomes psi go through
/// SigmaHat^-1 mean(x_i psi_i); the naive kind is ordinary least squares of
/// y on x over labeled rows only.
Eigen::VectorXd solve_target(const ObservedDataset& data, const NuisancePredictions& preds,
                             TargetKind target, EstimatorKind estimator);

/// Per-observation influence contributions at theta. For the naive kind the
/// matrix has one row per labeled observation; otherwise one per row of the
/// dataset. sigma must be present exactly when target == ols_coef.
Eigen::MatrixXd influence_contributions(const ObservedDataset& data,
                                        const NuisancePredictions& preds,
                                        TargetKind target, EstimatorKind estimator,
                                        const Eigen::VectorXd& theta,
                                        const SigmaHat* sigma);

/// Covariate augmentation with externally supplied prediction columns:
/// returns a dataset whose covariates are [x | f_values]; r and y unchanged.
/// f_values must have m rows and finite entries; d = 0 returns the dataset
/// unchanged.
ObservedDataset augment_with_predictions(const ObservedDataset& data,
                                         const Eigen::MatrixXd& f_values);

}  // namespace ds3
