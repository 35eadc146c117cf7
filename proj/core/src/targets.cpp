#include "ds3/targets.hpp"

#include <Eigen/Cholesky>

#include <cmath>

#include "ds3/error.hpp"
#include "sym_solve.hpp"

namespace ds3 {

const char* to_string(TargetKind t) noexcept {
    switch (t) {
        case TargetKind::mean: return "mean";
        case TargetKind::ols_coef: return "ols_coef";
    }
    return "?";
}

const char* to_string(EstimatorKind e) noexcept {
    switch (e) {
        case EstimatorKind::naive: return "naive";
        case EstimatorKind::or_only: return "or_only";
        case EstimatorKind::ipw_only: return "ipw_only";
        case EstimatorKind::ds3: return "ds3";
    }
    return "?";
}

TargetKind parse_target_kind(const std::string& s) {
    if (s == "mean") return TargetKind::mean;
    if (s == "ols_coef") return TargetKind::ols_coef;
    throw ConfigError("unknown target kind: " + s);
}

EstimatorKind parse_estimator_kind(const std::string& s) {
    if (s == "naive") return EstimatorKind::naive;
    if (s == "or_only") return EstimatorKind::or_only;
    if (s == "ipw_only") return EstimatorKind::ipw_only;
    if (s == "ds3") return EstimatorKind::ds3;
    throw ConfigError("unknown estimator kind: " + s);
}

Eigen::Index target_dimension(const ObservedDataset& data, TargetKind target) {
    return target == TargetKind::mean ? data.k() : data.p();
}

namespace {

void check_predictions(const ObservedDataset& data, const NuisancePredictions& preds,
                       EstimatorKind estimator) {
    if (preds.mu_hat.rows() != data.m() || preds.mu_hat.cols() != data.k())
        throw ShapeError("nuisance predictions: mu_hat shape mismatch");
    if (preds.pi_hat.size() != data.m())
        throw ShapeError("nuisance predictions: pi_hat length mismatch");
    if (!preds.mu_hat.allFinite()) throw DataError("non-finite projection prediction");
    if (estimator == EstimatorKind::ipw_only || estimator == EstimatorKind::ds3) {
        for (Eigen::Index i = 0; i < preds.pi_hat.size(); ++i) {
            const double pi = preds.pi_hat(i);
            if (!(pi > 0.0 && pi <= 1.0))
                throw DataError("propensity prediction outside (0, 1]");
        }
    }
}

void check_target(const ObservedDataset& data, TargetKind target) {
    if (target == TargetKind::ols_coef && data.k() != 1)
        throw ConfigError("ols_coef target requires a single outcome column");
}

SigmaHat sigma_from_rows(const ObservedDataset& data, const std::vector<Eigen::Index>* rows) {
    const Eigen::Index m = rows ? static_cast<Eigen::Index>(rows->size()) : data.m();
    const Eigen::Index p = data.p();
    if (m < p) throw InsufficientDataError("second-moment matrix needs at least p rows");
    Eigen::MatrixXd xs;
    if (rows) {
        xs.resize(m, p);
        for (Eigen::Index i = 0; i < m; ++i) xs.row(i) = data.x().row((*rows)[static_cast<std::size_t>(i)]);
    } else {
        xs = data.x();
    }
    SigmaHat s;
    s.matrix = detail::exact_symmetric_gram(xs) / static_cast<double>(m);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(s.matrix);
    if (detail::ldlt_near_singular(ldlt))
        throw SingularError("singular covariate second-moment matrix");
    s.inverse = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    return s;
}

// The augmented pseudo-outcome is evaluated as (1 - w) mu + w y with
// w = r / pi, which reduces bit-exactly to the inverse-weighted outcome when
// mu is zero and to y itself when w is one. Outcome cells of unlabeled rows
// are never touched.
Eigen::MatrixXd pseudo_outcomes(const ObservedDataset& data, const NuisancePredictions& preds,
                                EstimatorKind estimator) {
    const Eigen::Index m = data.m();
    const Eigen::Index k = data.k();
    Eigen::MatrixXd psi(m, k);
    switch (estimator) {
        case EstimatorKind::or_only:
            psi = preds.mu_hat;
            break;
        case EstimatorKind::ipw_only:
            for (Eigen::Index i = 0; i < m; ++i) {
                if (data.r()(i) == 1)
                    psi.row(i) = data.y().row(i) / preds.pi_hat(i);
                else
                    psi.row(i).setZero();
            }
            break;
        case EstimatorKind::ds3:
            for (Eigen::Index i = 0; i < m; ++i) {
                if (data.r()(i) == 1) {
                    const double w = 1.0 / preds.pi_hat(i);
                    psi.row(i) = (1.0 - w) * preds.mu_hat.row(i) + w * data.y().row(i);
                } else {
                    psi.row(i) = preds.mu_hat.row(i);
                }
            }
            break;
        case EstimatorKind::naive:
            throw ConfigError("naive estimator has no pooled pseudo-outcome");
    }
    return psi;
}

Eigen::VectorXd column_mean_over(const Eigen::MatrixXd& values,
                                 const std::vector<Eigen::Index>& rows) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(values.cols());
    for (Eigen::Index i : rows) acc += values.row(i).transpose();
    return acc / static_cast<double>(rows.size());
}

Eigen::VectorXd solve_moment(const SigmaHat& sigma, const Eigen::VectorXd& b) {
    return Eigen::LDLT<Eigen::MatrixXd>(sigma.matrix).solve(b);
}

}  // namespace

SigmaHat sigma_hat(const ObservedDataset& data) { return sigma_from_rows(data, nullptr); }

SigmaHat sigma_hat_labeled(const ObservedDataset& data) {
    const std::vector<Eigen::Index> rows = data.labeled_rows();
    return sigma_from_rows(data, &rows);
}

Eigen::VectorXd solve_target(const ObservedDataset& data, const NuisancePredictions& preds,
                             TargetKind target, EstimatorKind estimator) {
    check_target(data, target);
    if (estimator != EstimatorKind::naive) check_predictions(data, preds, estimator);

    if (target == TargetKind::mean) {
        if (estimator == EstimatorKind::naive)
            return column_mean_over(data.y(), data.labeled_rows());
        const Eigen::MatrixXd psi = pseudo_outcomes(data, preds, estimator);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(data.k());
        for (Eigen::Index i = 0; i < data.m(); ++i) acc += psi.row(i).transpose();
        return acc / static_cast<double>(data.m());
    }

    // ols_coef
    if (estimator == EstimatorKind::naive) {
        const SigmaHat sigma = sigma_hat_labeled(data);
        const std::vector<Eigen::Index> rows = data.labeled_rows();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(data.p());
        for (Eigen::Index i : rows) b += data.x().row(i).transpose() * data.y()(i, 0);
        b /= static_cast<double>(rows.size());
        return solve_moment(sigma, b);
    }
    const SigmaHat sigma = sigma_hat(data);
    const Eigen::MatrixXd psi = pseudo_outcomes(data, preds, estimator);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(data.p());
    for (Eigen::Index i = 0; i < data.m(); ++i) b += data.x().row(i).transpose() * psi(i, 0);
    b /= static_cast<double>(data.m());
    return solve_moment(sigma, b);
}

Eigen::MatrixXd influence_contributions(const ObservedDataset& data,
                                        const NuisancePredictions& preds, TargetKind target,
                                        EstimatorKind estimator, const Eigen::VectorXd& theta,
                                        const SigmaHat* sigma) {
    check_target(data, target);
    if (estimator != EstimatorKind::naive) check_predictions(data, preds, estimator);
    const Eigen::Index q = target_dimension(data, target);
    if (theta.size() != q) throw ShapeError("influence contributions: theta dimension mismatch");
    if ((target == TargetKind::ols_coef) != (sigma != nullptr))
        throw ShapeError("sigma must be present exactly for the ols_coef target");

    if (target == TargetKind::mean) {
        if (estimator == EstimatorKind::naive) {
            const std::vector<Eigen::Index> rows = data.labeled_rows();
            Eigen::MatrixXd contribs(static_cast<Eigen::Index>(rows.size()), q);
            for (std::size_t i = 0; i < rows.size(); ++i)
                contribs.row(static_cast<Eigen::Index>(i)) =
                    data.y().row(rows[i]) - theta.transpose();
            return contribs;
        }
        const Eigen::MatrixXd psi = pseudo_outcomes(data, preds, estimator);
        return psi.rowwise() - theta.transpose();
    }

    // ols_coef: contribution row i is sigma^-1 x_i (psi_i - x_i' theta).
    if (sigma->matrix.rows() != data.p() || sigma->inverse.rows() != data.p())
        throw ShapeError("influence contributions: sigma dimension mismatch");
    if (estimator == EstimatorKind::naive) {
        const std::vector<Eigen::Index> rows = data.labeled_rows();
        Eigen::MatrixXd contribs(static_cast<Eigen::Index>(rows.size()), q);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Eigen::Index row = rows[i];
            const double s = data.y()(row, 0) - data.x().row(row).dot(theta);
            contribs.row(static_cast<Eigen::Index>(i)) =
                s * (sigma->inverse * data.x().row(row).transpose()).transpose();
        }
        return contribs;
    }
    const Eigen::MatrixXd psi = pseudo_outcomes(data, preds, estimator);
    Eigen::MatrixXd contribs(data.m(), q);
    for (Eigen::Index i = 0; i < data.m(); ++i) {
        const double s = psi(i, 0) - data.x().row(i).dot(theta);
        contribs.row(i) = s * (sigma->inverse * data.x().row(i).transpose()).transpose();
    }
    return contribs;
}

ObservedDataset augment_with_predictions(const ObservedDataset& data,
                                         const Eigen::MatrixXd& f_values) {
    if (f_values.cols() == 0) return data;
    if (f_values.rows() != data.m())
        throw ShapeError("prediction columns must cover every observation");
    if (!f_values.allFinite()) throw DataError("non-finite prediction value");
    Eigen::MatrixXd x(data.m(), data.p() + f_values.cols());
    x.leftCols(data.p()) = data.x();
    x.rightCols(f_values.cols()) = f_values;
    return ObservedDataset(std::move(x), data.r(), data.y());
}

}  // namespace ds3
