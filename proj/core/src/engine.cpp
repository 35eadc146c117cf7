#include "ds3/engine.hpp"

#include <cmath>
#include <limits>

#include "ds3/error.hpp"
#include "ds3/nuisance.hpp"

namespace ds3 {

const char* to_string(ProjectionModel m) noexcept {
    switch (m) {
        case ProjectionModel::ols: return "ols";
        case ProjectionModel::zero: return "zero";
    }
    return "?";
}

const char* to_string(PropensityModel m) noexcept {
    switch (m) {
        case PropensityModel::constant: return "constant";
        case PropensityModel::offset_logistic: return "offset_logistic";
        case PropensityModel::known: return "known";
    }
    return "?";
}

ProjectionModel parse_projection_model(const std::string& s) {
    if (s == "ols") return ProjectionModel::ols;
    if (s == "zero") return ProjectionModel::zero;
    throw ConfigError("unknown projection model: " + s);
}

PropensityModel parse_propensity_model(const std::string& s) {
    if (s == "constant") return PropensityModel::constant;
    if (s == "offset_logistic") return PropensityModel::offset_logistic;
    if (s == "known") return PropensityModel::known;
    throw ConfigError("unknown propensity model: " + s);
}

namespace {

void check_config(const EstimationConfig& cfg) {
    if (cfg.j_folds < 2) throw ConfigError("j_folds must be at least 2");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
    if (cfg.propensity_floor < 0.0 || cfg.propensity_floor >= 1.0)
        throw ConfigError("propensity_floor must be 0 (auto) or in (0, 1)");
    if (cfg.irls_max_iter < 1) throw ConfigError("irls_max_iter must be positive");
    if (!(cfg.irls_tol > 0.0)) throw ConfigError("irls_tol must be positive");
    if (cfg.ridge_eps < 0.0) throw ConfigError("ridge_eps must be nonnegative");
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& a, const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), a.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = a.row(rows[i]);
    return out;
}

Eigen::VectorXi take_rows(const Eigen::VectorXi& a, const std::vector<Eigen::Index>& rows) {
    Eigen::VectorXi out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = a(rows[i]);
    return out;
}

}  // namespace

EstimateReport run_estimation_with_folds(const ObservedDataset& data,
                                         const EstimationConfig& config,
                                         const FoldAssignment& folds,
                                         const std::optional<Eigen::VectorXd>& known_pi) {
    check_config(config);
    const Eigen::Index m = data.m();
    if (config.propensity_model == PropensityModel::known) {
        if (!known_pi) throw ConfigError("known propensity model requires propensity values");
        if (known_pi->size() != m)
            throw ConfigError("known propensity vector length must equal the row count");
        for (Eigen::Index i = 0; i < m; ++i)
            if (!((*known_pi)(i) > 0.0 && (*known_pi)(i) <= 1.0))
                throw ConfigError("known propensity values must lie in (0, 1]");
    }
    if (static_cast<Eigen::Index>(folds.fold_of.size()) != m)
        throw ShapeError("fold assignment length must equal the row count");

    const double floor =
        config.propensity_floor > 0.0 ? config.propensity_floor : 1.0 / (2.0 * static_cast<double>(m));

    NuisancePredictions preds;
    preds.mu_hat = Eigen::MatrixXd::Zero(m, data.k());
    preds.pi_hat = Eigen::VectorXd::Ones(m);

    EstimateReport report;
    report.folds.reserve(static_cast<std::size_t>(folds.j_folds));

    for (int j = 0; j < folds.j_folds; ++j) {
        FoldDiagnostics diag;
        diag.fold = j;
        const std::vector<Eigen::Index> fold = folds.fold_rows(j);
        const std::vector<Eigen::Index> comp = folds.complement_rows(j);
        const Eigen::MatrixXd fold_x = take_rows(data.x(), fold);

        if (config.projection_model == ProjectionModel::ols) {
            std::vector<Eigen::Index> comp_labeled;
            for (Eigen::Index i : comp)
                if (data.r()(i) == 1) comp_labeled.push_back(i);
            if (static_cast<Eigen::Index>(comp_labeled.size()) < data.p() + 2)
                throw InsufficientDataError("projection unfittable on the complement of fold " +
                                            std::to_string(j));
            ProjectionFit fit;
            try {
                fit = fit_projection_ols(take_rows(data.x(), comp_labeled),
                                         take_rows(data.y(), comp_labeled), config.ridge_eps);
            } catch (const InsufficientDataError&) {
                throw InsufficientDataError("projection unfittable on the complement of fold " +
                                            std::to_string(j));
            }
            diag.projection_fitted = true;
            diag.projection_ridge_used = fit.ridge_used;
            const Eigen::MatrixXd mu = predict_projection(fit, fold_x);
            for (std::size_t i = 0; i < fold.size(); ++i)
                preds.mu_hat.row(fold[i]) = mu.row(static_cast<Eigen::Index>(i));
        }
        // ProjectionModel::zero leaves mu_hat at zero: the deliberately
        // misspecified projection used in robustness experiments.

        switch (config.propensity_model) {
            case PropensityModel::known:
                for (Eigen::Index i : fold) preds.pi_hat(i) = (*known_pi)(i);
                break;
            case PropensityModel::constant: {
                const PropensityFit fit = fit_propensity_constant(take_rows(data.r(), comp));
                diag.propensity_fitted = true;
                for (Eigen::Index i : fold) preds.pi_hat(i) = fit.rate;
                break;
            }
            case PropensityModel::offset_logistic: {
                const Eigen::VectorXi comp_r = take_rows(data.r(), comp);
                const Eigen::Index comp_ones = comp_r.sum();
                if (comp_ones == comp_r.size()) {
                    // Fully labeled complement: the labeling model degenerates
                    // to certainty.
                    diag.propensity_fitted = true;
                    for (Eigen::Index i : fold) preds.pi_hat(i) = 1.0;
                    break;
                }
                const double offset = std::log(static_cast<double>(comp_ones) /
                                               static_cast<double>(comp_r.size()));
                const PropensityFit fit = fit_propensity_offset_logistic(
                    take_rows(data.x(), comp), comp_r, offset, config.propensity_intercept,
                    config.irls_tol, config.irls_max_iter);
                diag.propensity_fitted = true;
                diag.propensity_converged = fit.converged;
                diag.propensity_iterations = fit.iterations;
                // Raw model probabilities here; the pooled pass below applies
                // the floor so clamped predictions can be counted.
                const Eigen::VectorXd pi =
                    predict_propensity(fit, fold_x, std::numeric_limits<double>::min());
                for (std::size_t i = 0; i < fold.size(); ++i)
                    preds.pi_hat(fold[i]) = pi(static_cast<Eigen::Index>(i));
                break;
            }
        }
        report.folds.push_back(diag);
    }

    // Floor every pooled propensity prediction; count the clamped ones.
    report.clipped_count = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (preds.pi_hat(i) <= floor) {
            if (preds.pi_hat(i) < floor) ++report.clipped_count;
            preds.pi_hat(i) = floor;
        } else if (preds.pi_hat(i) > 1.0) {
            preds.pi_hat(i) = 1.0;
        }
    }
    if (!preds.mu_hat.allFinite() || !preds.pi_hat.allFinite())
        throw DataError("non-finite nuisance prediction");

    report.theta_hat = solve_target(data, preds, config.target, config.estimator);

    SigmaHat sigma;
    const SigmaHat* sigma_ptr = nullptr;
    if (config.target == TargetKind::ols_coef) {
        sigma = config.estimator == EstimatorKind::naive ? sigma_hat_labeled(data)
                                                         : sigma_hat(data);
        sigma_ptr = &sigma;
    }
    const Eigen::MatrixXd contribs = influence_contributions(
        data, preds, config.target, config.estimator, report.theta_hat, sigma_ptr);
    report.v_hat = empirical_covariance(contribs);
    if (config.estimator == EstimatorKind::naive) {
        // The naive estimator's contributions exist only on labeled rows;
        // unlabeled rows count as zero contributions so every estimator kind
        // is scaled by the full sample, matching the pooled covariance
        // definition used for the comparison studies.
        report.v_hat.v_hat *=
            static_cast<double>(data.n_labeled()) / static_cast<double>(m);
        report.v_hat.m_used = m;
    }
    report.intervals = wald_intervals(report.theta_hat, report.v_hat, config.alpha);

    report.m = m;
    report.n_labeled = data.n_labeled();
    report.labeled_fraction = labeled_fraction(data);
    report.predictions = preds;
    double inv_sum = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) inv_sum += 1.0 / preds.pi_hat(i);
    report.overlap_index = static_cast<double>(m) / inv_sum;
    report.effective_sample_size = static_cast<double>(m) * report.overlap_index;
    report.alpha = config.alpha;
    report.target = config.target;
    report.estimator = config.estimator;
    return report;
}

EstimateReport run_estimation(const ObservedDataset& data, const EstimationConfig& config,
                              const std::optional<Eigen::VectorXd>& known_pi) {
    check_config(config);
    const FoldAssignment folds = assign_folds(data, config.j_folds, config.seed);
    return run_estimation_with_folds(data, config, folds, known_pi);
}

EstimateReport run_ppi(const ObservedDataset& data, const Eigen::MatrixXd& f_values,
                       const EstimationConfig& config,
                       const std::optional<Eigen::VectorXd>& known_pi) {
    return run_estimation(augment_with_predictions(data, f_values), config, known_pi);
}

}  // namespace ds3
