#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ds3/error.hpp"
#include "ds3/nuisance.hpp"
#include "ds3/rng.hpp"
#include "oracles.hpp"

using namespace ds3;

TEST_CASE("expit: symmetry, frozen value, stability, monotonicity") {
    CHECK(expit(0.0) == 0.5);
    for (double x : {-700.0, -30.0, -2.5, -1e-8, 0.3, 12.0, 345.0, 700.0}) {
        CHECK(expit(x) + expit(-x) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::isfinite(expit(x)));
    }
    CHECK(std::abs(expit(std::log(0.1)) - 1.0 / 11.0) < 1e-15);
    double prev = 0.0;
    for (double x = -20.0; x <= 20.0; x += 0.25) {
        const double v = expit(x);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("expit inverts logit") {
    for (double p = 1e-8; p < 1.0 - 1e-8; p = p < 0.1 ? p * 3.7 : p + 0.07)
        CHECK(std::abs(expit(logit(p)) - p) < 1e-12);
    CHECK_THROWS_AS(logit(0.0), DomainError);
    CHECK_THROWS_AS(logit(1.0), DomainError);
}

TEST_CASE("projection fit interpolates a noiseless line") {
    Eigen::MatrixXd x(6, 1);
    x << -2, -1, 0, 1, 2, 3;
    Eigen::MatrixXd y = 2.0 + 3.0 * x.array();
    const ProjectionFit fit = fit_projection_ols(x, y, 1e-10);
    CHECK_FALSE(fit.ridge_used);
    CHECK(std::abs(fit.coef(0, 0) - 2.0) < 1e-10);
    CHECK(std::abs(fit.coef(1, 0) - 3.0) < 1e-10);
}

TEST_CASE("projection fit falls back to ridge on duplicated columns") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(20, 2);
    for (Eigen::Index i = 0; i < 20; ++i) {
        x(i, 0) = normal(gen);
        x(i, 1) = x(i, 0);
    }
    Eigen::MatrixXd y(20, 1);
    for (Eigen::Index i = 0; i < 20; ++i) y(i, 0) = normal(gen);
    const ProjectionFit fit = fit_projection_ols(x, y, 1e-10);
    CHECK(fit.ridge_used);
    CHECK(fit.coef.allFinite());
}

TEST_CASE("projection fit matches an independent dense solve") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(50, 3), y(50, 2);
    for (Eigen::Index i = 0; i < 50; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = normal(gen);
        for (Eigen::Index j = 0; j < 2; ++j) y(i, j) = normal(gen);
    }
    const ProjectionFit fit = fit_projection_ols(x, y, 1e-10);
    Eigen::MatrixXd design(50, 4);
    design.col(0).setOnes();
    design.rightCols(3) = x;
    const Eigen::MatrixXd gram = design.transpose() * design;
    const Eigen::MatrixXd inv = oracles::gauss_jordan_inverse(gram);
    const Eigen::MatrixXd expected = inv * (design.transpose() * y);
    CHECK((fit.coef - expected).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("projection fit errors") {
    Eigen::MatrixXd x(3, 2), y(3, 1);
    x.setRandom();
    y.setRandom();
    CHECK_THROWS_AS(fit_projection_ols(x, y, 1e-10), InsufficientDataError);
    Eigen::MatrixXd x2 = Eigen::MatrixXd::Random(10, 2);
    Eigen::MatrixXd y2 = Eigen::MatrixXd::Random(10, 1);
    y2(4, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit_projection_ols(x2, y2, 1e-10), DataError);
}

TEST_CASE("projection residuals are orthogonal to the design without ridge") {
    std::mt19937_64 gen(9);
    std::normal_distribution<double> normal;
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::MatrixXd x(30, 3), y(30, 2);
        for (Eigen::Index i = 0; i < 30; ++i) {
            for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = normal(gen);
            for (Eigen::Index j = 0; j < 2; ++j) y(i, j) = 5.0 * normal(gen);
        }
        const ProjectionFit fit = fit_projection_ols(x, y, 1e-10);
        REQUIRE_FALSE(fit.ridge_used);
        Eigen::MatrixXd design(30, 4);
        design.col(0).setOnes();
        design.rightCols(3) = x;
        const Eigen::MatrixXd resid = y - design * fit.coef;
        const double scale =
            std::max(1.0, (design.cwiseAbs().transpose() * y.cwiseAbs()).maxCoeff());
        CHECK((design.transpose() * resid).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    }
}

TEST_CASE("constant propensity") {
    Eigen::VectorXi r(4);
    r << 1, 0, 0, 1;
    CHECK(fit_propensity_constant(r).rate == 0.5);
    Eigen::VectorXi ones = Eigen::VectorXi::Ones(3);
    CHECK(fit_propensity_constant(ones).rate == 1.0);
    Eigen::VectorXi big(1100);
    big.setZero();
    big.head(100).setOnes();
    CHECK(fit_propensity_constant(big).rate == doctest::Approx(100.0 / 1100.0).epsilon(1e-15));
    Eigen::VectorXi zeros = Eigen::VectorXi::Zero(5);
    CHECK_THROWS_AS(fit_propensity_constant(zeros), DegenerateDataError);
}

namespace {

// Data from the offset-logistic model itself.
void simulate_offset_logistic(SeededRng& rng, Eigen::Index m, const Eigen::VectorXd& gamma,
                              double offset, Eigen::MatrixXd& x, Eigen::VectorXi& r) {
    const Eigen::Index p = gamma.size();
    x.resize(m, p);
    r.resize(m);
    for (;;) {
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.standard_normal();
            r(i) = rng.bernoulli(expit(offset + x.row(i).dot(gamma))) ? 1 : 0;
        }
        const int ones = r.sum();
        if (ones > 0 && ones < m) return;
    }
}

}  // namespace

TEST_CASE("offset logistic recovers the null model") {
    SeededRng rng(21);
    const double offset = std::log(0.1);
    Eigen::MatrixXd x;
    Eigen::VectorXi r;
    simulate_offset_logistic(rng, 5000, Eigen::VectorXd::Zero(2), offset, x, r);
    const PropensityFit fit = fit_propensity_offset_logistic(x, r, offset, false, 1e-8, 100);
    CHECK(fit.converged);
    // Monte Carlo slack: ~4 standard errors of the MLE at this sample size.
    CHECK(fit.gamma.cwiseAbs().maxCoeff() < 0.3);
    const Eigen::VectorXd pred = predict_propensity(fit, x, 1e-12);
    CHECK(std::abs(pred.mean() - expit(offset)) < 0.02);
}

TEST_CASE("offset logistic beats the truth in sample") {
    SeededRng rng(22);
    const double offset = std::log(0.1);
    Eigen::VectorXd gamma_star(2);
    gamma_star << 0.7, -1.2;
    Eigen::MatrixXd x;
    Eigen::VectorXi r;
    simulate_offset_logistic(rng, 200, gamma_star, offset, x, r);
    const PropensityFit fit = fit_propensity_offset_logistic(x, r, offset, false, 1e-8, 100);
    PropensityFit truth = fit;
    truth.gamma = gamma_star;
    truth.intercept = 0.0;
    CHECK(propensity_log_likelihood(fit, x, r) >=
          propensity_log_likelihood(truth, x, r) - 1e-10);
}

TEST_CASE("offset logistic matches a brute-force likelihood maximizer") {
    // Fixed 8-row fixture, p = 2, no intercept.
    Eigen::MatrixXd x(8, 2);
    x << 0.5, -1.0,
        -0.3, 0.8,
        1.2, 0.1,
        -0.7, -0.6,
        0.9, 1.5,
        -1.4, 0.4,
        0.2, -0.9,
        0.6, 0.3;
    Eigen::VectorXi r(8);
    r << 1, 0, 1, 0, 1, 0, 0, 1;
    const double offset = std::log(0.5);

    const auto ll = [&](double g1, double g2) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < 8; ++i) {
            const double eta = offset + g1 * x(i, 0) + g2 * x(i, 1);
            acc += (r(i) == 1 ? eta : 0.0) -
                   (eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)));
        }
        return acc;
    };

    // Coarse grid, then coordinate-wise ternary refinement.
    double best1 = 0.0, best2 = 0.0, best = ll(0.0, 0.0);
    for (double g1 = -4.0; g1 <= 4.0; g1 += 0.05)
        for (double g2 = -4.0; g2 <= 4.0; g2 += 0.05)
            if (const double v = ll(g1, g2); v > best) {
                best = v;
                best1 = g1;
                best2 = g2;
            }
    double span = 0.05;
    for (int round = 0; round < 60; ++round) {
        for (int coord = 0; coord < 2; ++coord) {
            double lo = (coord == 0 ? best1 : best2) - span;
            double hi = (coord == 0 ? best1 : best2) + span;
            for (int it = 0; it < 80; ++it) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                const double v1 = coord == 0 ? ll(m1, best2) : ll(best1, m1);
                const double v2 = coord == 0 ? ll(m2, best2) : ll(best1, m2);
                (v1 < v2 ? lo : hi) = v1 < v2 ? m1 : m2;
            }
            (coord == 0 ? best1 : best2) = 0.5 * (lo + hi);
        }
        span = std::max(span * 0.7, 1e-9);
    }

    const PropensityFit fit = fit_propensity_offset_logistic(x, r, offset, false, 1e-12, 200);
    CHECK(fit.converged);
    CHECK(std::abs(fit.gamma(0) - best1) < 1e-6);
    CHECK(std::abs(fit.gamma(1) - best2) < 1e-6);
}

TEST_CASE("IRLS log-likelihood is non-decreasing across iterations") {
    SeededRng rng(23);
    Eigen::VectorXd gamma_star(3);
    gamma_star << 1.5, -2.0, 0.5;
    const double offset = std::log(0.2);
    Eigen::MatrixXd x;
    Eigen::VectorXi r;
    simulate_offset_logistic(rng, 120, gamma_star, offset, x, r);
    double prev = -std::numeric_limits<double>::infinity();
    for (int iters = 1; iters <= 8; ++iters) {
        const PropensityFit fit = fit_propensity_offset_logistic(x, r, offset, false, 1e-14, iters);
        const double ll = propensity_log_likelihood(fit, x, r);
        CHECK(ll >= prev - 1e-9);
        prev = ll;
    }
}

TEST_CASE("perfect separation is flagged, not fatal") {
    Eigen::MatrixXd x(10, 1);
    Eigen::VectorXi r(10);
    for (Eigen::Index i = 0; i < 10; ++i) {
        r(i) = i < 5 ? 1 : 0;
        x(i, 0) = r(i) == 1 ? 1.0 : -1.0;
    }
    const PropensityFit fit = fit_propensity_offset_logistic(x, r, 0.0, false, 1e-10, 500);
    CHECK_FALSE(fit.converged);
    CHECK(fit.gamma.allFinite());
}

TEST_CASE("predict_propensity clamps into [floor, 1]") {
    PropensityFit constant;
    constant.kind = PropensityKind::constant;
    constant.rate = 0.3;
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 2);
    const Eigen::VectorXd p = predict_propensity(constant, x, 1e-6);
    for (Eigen::Index i = 0; i < 5; ++i) CHECK(p(i) == 0.3);

    PropensityFit logistic;
    logistic.kind = PropensityKind::offset_logistic;
    logistic.offset = std::log(0.1);
    logistic.gamma = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd q = predict_propensity(logistic, x, 1e-6);
    for (Eigen::Index i = 0; i < 5; ++i) CHECK(std::abs(q(i) - 1.0 / 11.0) < 1e-14);

    logistic.gamma << -30.0, 0.0;  // probability ~ 1e-13 at x1 = 1
    Eigen::MatrixXd far(1, 2);
    far << 1.0, 0.0;
    CHECK(predict_propensity(logistic, far, 1e-6)(0) == 1e-6);

    SeededRng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        logistic.gamma.setRandom();
        logistic.gamma *= 8.0;
        Eigen::MatrixXd xs(40, 2);
        for (Eigen::Index i = 0; i < 40; ++i)
            for (Eigen::Index j = 0; j < 2; ++j) xs(i, j) = rng.standard_normal();
        const Eigen::VectorXd preds = predict_propensity(logistic, xs, 1e-4);
        CHECK(preds.minCoeff() >= 1e-4);
        CHECK(preds.maxCoeff() <= 1.0);
    }
}
