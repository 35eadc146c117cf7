#include "ds3/nuisance.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

#include "ds3/error.hpp"
#include "sym_solve.hpp"

namespace ds3 {

double expit(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("logit requires p in (0, 1)");
    return std::log(p) - std::log1p(-p);
}

namespace {

// log(1 + exp(eta)) without overflow.
double softplus(double eta) {
    if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
    return std::log1p(std::exp(eta));
}

double bernoulli_ll(const Eigen::VectorXd& eta, const Eigen::VectorXi& r) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        ll += (r(i) == 1 ? eta(i) : 0.0) - softplus(eta(i));
    return ll;
}

// Solves g c = rhs for a symmetric g; on a numerically singular g retries
// with ridge_rel times the mean diagonal added. Returns whether ridge kicked in.
bool solve_symmetric_with_fallback(Eigen::MatrixXd g, const Eigen::MatrixXd& rhs,
                                   double ridge_rel, Eigen::Index skip_diag,
                                   Eigen::MatrixXd& out) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
    if (!detail::ldlt_near_singular(ldlt)) {
        out = ldlt.solve(rhs);
        return false;
    }
    double scale = 0.0;
    Eigen::Index counted = 0;
    for (Eigen::Index i = skip_diag; i < g.rows(); ++i) {
        scale += g(i, i);
        ++counted;
    }
    scale = counted > 0 ? scale / static_cast<double>(counted) : 1.0;
    if (!(scale > 0.0)) scale = 1.0;
    for (Eigen::Index i = skip_diag; i < g.rows(); ++i) g(i, i) += ridge_rel * scale;
    out = Eigen::LDLT<Eigen::MatrixXd>(g).solve(rhs);
    return true;
}

}  // namespace

ProjectionFit fit_projection_ols(const Eigen::MatrixXd& x_labeled,
                                 const Eigen::MatrixXd& y_labeled, double ridge_eps) {
    const Eigen::Index n = x_labeled.rows();
    const Eigen::Index p = x_labeled.cols();
    if (y_labeled.rows() != n) throw ShapeError("projection fit: row count mismatch");
    if (!x_labeled.allFinite() || !y_labeled.allFinite())
        throw DataError("projection fit: non-finite input");
    if (n < p + 2)
        throw InsufficientDataError("projection fit needs at least p + 2 = " +
                                    std::to_string(p + 2) + " rows, got " + std::to_string(n));
    if (ridge_eps < 0.0) throw ConfigError("ridge_eps must be nonnegative");

    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = x_labeled;

    const Eigen::MatrixXd gram = detail::exact_symmetric_gram(design);
    const Eigen::MatrixXd rhs = design.transpose() * y_labeled;

    ProjectionFit fit;
    fit.ridge_used =
        solve_symmetric_with_fallback(gram, rhs, ridge_eps, /*skip_diag=*/1, fit.coef);
    return fit;
}

Eigen::MatrixXd predict_projection(const ProjectionFit& fit, const Eigen::MatrixXd& x) {
    if (x.cols() + 1 != fit.coef.rows())
        throw ShapeError("projection predict: covariate dimension mismatch");
    return (x * fit.coef.bottomRows(fit.coef.rows() - 1)).rowwise() + fit.coef.row(0);
}

PropensityFit fit_propensity_constant(const Eigen::VectorXi& r_train) {
    if (r_train.size() == 0) throw DegenerateDataError("constant propensity: empty indicator");
    const double ones = static_cast<double>(r_train.sum());
    if (ones == 0.0) throw DegenerateDataError("constant propensity: no labeled rows");
    PropensityFit fit;
    fit.kind = PropensityKind::constant;
    fit.rate = ones / static_cast<double>(r_train.size());
    return fit;
}

PropensityFit fit_propensity_offset_logistic(const Eigen::MatrixXd& x_train,
                                             const Eigen::VectorXi& r_train, double offset,
                                             bool include_intercept, double tol, int max_iter) {
    const Eigen::Index n = x_train.rows();
    const Eigen::Index p = x_train.cols();
    if (r_train.size() != n) throw ShapeError("offset logistic: row count mismatch");
    if (!std::isfinite(offset)) throw DataError("offset logistic: non-finite offset");
    if (!x_train.allFinite()) throw DataError("offset logistic: non-finite covariates");
    const int ones = r_train.sum();
    if (ones == 0 || ones == n)
        throw DegenerateDataError("offset logistic needs both labeled and unlabeled rows");

    const Eigen::Index d = p + (include_intercept ? 1 : 0);
    Eigen::MatrixXd design(n, d);
    if (include_intercept) {
        design.col(0).setOnes();
        design.rightCols(p) = x_train;
    } else {
        design = x_train;
    }

    Eigen::VectorXd coef = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, offset);
    double ll = bernoulli_ll(eta, r_train);

    PropensityFit fit;
    fit.kind = PropensityKind::offset_logistic;
    fit.offset = offset;
    fit.converged = false;

    for (int it = 1; it <= max_iter; ++it) {
        fit.iterations = it;
        Eigen::VectorXd prob(n), w(n), z(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            prob(i) = expit(eta(i));
            w(i) = std::max(prob(i) * (1.0 - prob(i)), 1e-10);
            z(i) = (eta(i) - offset) + (static_cast<double>(r_train(i)) - prob(i)) / w(i);
        }
        const Eigen::MatrixXd wd = w.asDiagonal() * design;
        Eigen::MatrixXd gram = design.transpose() * wd;
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index c = r + 1; c < d; ++c) gram(c, r) = gram(r, c);
        const Eigen::MatrixXd rhs = design.transpose() * (w.asDiagonal() * z);
        Eigen::MatrixXd sol;
        solve_symmetric_with_fallback(gram, rhs, 1e-10, /*skip_diag=*/0, sol);
        Eigen::VectorXd cand = sol.col(0);

        // Step-halving keeps the log-likelihood non-decreasing.
        Eigen::VectorXd cand_eta = Eigen::VectorXd::Constant(n, offset) + design * cand;
        double cand_ll = bernoulli_ll(cand_eta, r_train);
        for (int h = 0; h < 30 && cand_ll < ll; ++h) {
            cand = 0.5 * (coef + cand);
            cand_eta = Eigen::VectorXd::Constant(n, offset) + design * cand;
            cand_ll = bernoulli_ll(cand_eta, r_train);
        }

        const double delta = (cand - coef).cwiseAbs().maxCoeff();
        coef = cand;
        eta = cand_eta;
        ll = cand_ll;

        if (coef.cwiseAbs().maxCoeff() > 1e6) {
            // Separation: the likelihood keeps improving along a divergent
            // direction. Keep the current fit, flag non-convergence.
            fit.converged = false;
            break;
        }
        if (delta < tol) {
            fit.converged = true;
            break;
        }
    }

    if (include_intercept) {
        fit.intercept = coef(0);
        fit.gamma = coef.tail(p);
    } else {
        fit.gamma = coef;
    }
    return fit;
}

Eigen::VectorXd predict_propensity(const PropensityFit& fit, const Eigen::MatrixXd& x,
                                   double floor) {
    if (!(floor > 0.0 && floor < 1.0)) throw DomainError("propensity floor must be in (0, 1)");
    if (!x.allFinite()) throw DataError("propensity predict: non-finite covariates");
    const Eigen::Index m = x.rows();
    Eigen::VectorXd out(m);
    if (fit.kind == PropensityKind::constant) {
        out.setConstant(std::clamp(fit.rate, floor, 1.0));
        return out;
    }
    if (x.cols() != fit.gamma.size())
        throw ShapeError("propensity predict: covariate dimension mismatch");
    const Eigen::VectorXd eta =
        (x * fit.gamma).array() + fit.offset + fit.intercept;
    for (Eigen::Index i = 0; i < m; ++i) out(i) = std::clamp(expit(eta(i)), floor, 1.0);
    return out;
}

double propensity_log_likelihood(const PropensityFit& fit, const Eigen::MatrixXd& x,
                                 const Eigen::VectorXi& r) {
    if (x.rows() != r.size()) throw ShapeError("log-likelihood: row count mismatch");
    Eigen::VectorXd eta(x.rows());
    if (fit.kind == PropensityKind::constant) {
        const double e = logit(std::clamp(fit.rate, 1e-15, 1.0 - 1e-15));
        eta.setConstant(e);
    } else {
        if (x.cols() != fit.gamma.size())
            throw ShapeError("log-likelihood: covariate dimension mismatch");
        eta = (x * fit.gamma).array() + fit.offset + fit.intercept;
    }
    return bernoulli_ll(eta, r);
}

}  // namespace ds3
