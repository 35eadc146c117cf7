#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ds3/dataset.hpp"
#include "ds3/inference.hpp"
#include "ds3/targets.hpp"

namespace ds3 {

enum class ProjectionModel { ols, zero };
enum class PropensityModel { constant, offset_logistic, known };

const char* to_string(ProjectionModel m) noexcept;
const char* to_string(PropensityModel m) noexcept;
ProjectionModel parse_projection_model(const std::string& s);
PropensityModel parse_propensity_model(const std::string& s);

struct EstimationConfig {
    TargetKind target = TargetKind::mean;
    EstimatorKind estimator = EstimatorKind::ds3;
    ProjectionModel projection_model = ProjectionModel::ols;
    PropensityModel propensity_model = PropensityModel::offset_logistic;
    int j_folds = 5;
    std::uint64_t seed = 0;
    double propensity_floor = 0.0;  // 0 -> automatic 1 / (2m)
    double alpha = 0.05;
    double irls_tol = 1e-8;
    int irls_max_iter = 100;
    bool literal_hotelling = false;
    bool propensity_intercept = false;
    double ridge_eps = 1e-10;
};

struct FoldDiagnostics {
    int fold = 0;
    bool propensity_fitted = false;
    bool propensity_converged = true;
    int propensity_iterations = 0;
    bool projection_fitted = false;
    bool projection_ridge_used = false;
};

struct EstimateReport {
    Eigen::VectorXd theta_hat;
    CovarianceEstimate v_hat;
    NuisancePredictions predictions;  // pooled held-out predictions, floored
    std::vector<std::pair<double, double>> intervals;
    Eigen::Index m = 0;
    Eigen::Index n_labeled = 0;
    double labeled_fraction = 0.0;
    double overlap_index = 0.0;          // 1 / mean(1 / pi_hat), in (0, 1]
    double effective_sample_size = 0.0;  // m * overlap_index
    Eigen::Index clipped_count = 0;
    std::vector<FoldDiagnostics> folds;
    double alpha = 0.0;
    TargetKind target = TargetKind::mean;
    EstimatorKind estimator = EstimatorKind::ds3;
};

/// Cross-fitted estimation: assigns stratified folds, fits the projection on
/// the labeled rows of each training complement and the propensity on all of
/// its rows (skipped when known), assembles held-out predictions with the
/// propensity floored, solves the pooled estimating equation once, and
/// derives covariance, intervals and overlap diagnostics at the solution.
/// Deterministic given (data, config, known_pi).
EstimateReport run_estimation(const ObservedDataset& data, const EstimationConfig& config,
                              const std::optional<Eigen::VectorXd>& known_pi = std::nullopt);

/// Same pipeline with a caller-supplied partition instead of the seeded one.
EstimateReport run_estimation_with_folds(const ObservedDataset& data,
                                         const EstimationConfig& config,
                                         const FoldAssignment& folds,
                                         const std::optional<Eigen::VectorXd>& known_pi =
                                             std::nullopt);

/// Prediction-powered estimation: identical to run_estimation on the dataset
/// augmented with the prediction columns.
EstimateReport run_ppi(const ObservedDataset& data, const Eigen::MatrixXd& f_values,
                       const EstimationConfig& config,
                       const std::optional<Eigen::VectorXd>& known_pi = std::nullopt);

}  // namespace ds3
