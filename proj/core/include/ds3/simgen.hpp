#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>

#include "ds3/dataset.hpp"
#include "ds3/rng.hpp"
#include "ds3/targets.hpp"

namespace ds3 {

enum class PropensityScenario { decaying_mcar, decaying_offset };

const char* to_string(PropensityScenario s) noexcept;
PropensityScenario parse_propensity_scenario(const std::string& s);

/// Synthetic-data scenario. n and N are design sizes that parameterize the
/// labeling probability; the realized labeled count is Binomial.
struct ScenarioConfig {
    Eigen::Index n = 100;
    Eigen::Index N = 1000;
    Eigen::Index p = 10;
    Eigen::Index k = 2;
    PropensityScenario propensity_scenario = PropensityScenario::decaying_mcar;
    std::uint64_t seed = 0;
};

/// Ground truth drawn per replication. theta_star_mean is exactly zero
/// (outcomes are centered linear-Gaussian); theta_star_ols equals the single
/// outcome's coefficient column when k = 1 and is empty otherwise.
struct TrueParams {
    Eigen::MatrixXd beta;          // p x k
    Eigen::VectorXd gamma;         // p, decaying_offset only (empty otherwise)
    Eigen::VectorXd theta_star_mean;
    Eigen::VectorXd theta_star_ols;
};

/// Draws beta (column by column) then, under decaying_offset, gamma from the
/// stream. Split out from generate() so tests can alter the parameters (for
/// example force gamma = 0) before generating data.
TrueParams draw_true_params(const ScenarioConfig& scenario, SeededRng& rng);

/// Draws X (row-major), then residuals (row-major), then the label
/// indicators, in that order, and assembles the dataset. Outcomes follow
/// y = beta' x + eps; unlabeled outcome cells are masked.
ObservedDataset generate_data(const ScenarioConfig& scenario, const TrueParams& params,
                              SeededRng& rng);

/// Full generation with the documented stream order (beta, gamma, X, eps, R)
/// from a single mt19937_64 stream seeded with scenario.seed. Bitwise
/// deterministic given the seed.
std::pair<ObservedDataset, TrueParams> generate(const ScenarioConfig& scenario);

/// Labeling probability at a covariate vector:
/// decaying_mcar -> n / (n+N); decaying_offset -> expit(log(n/(n+N)) + x' gamma).
double true_propensity(const Eigen::VectorXd& x, const ScenarioConfig& scenario,
                       const TrueParams& params);

/// Ground-truth target value: zero vector for the mean, the coefficient
/// column for ols_coef (k = 1 only).
Eigen::VectorXd true_theta(const TrueParams& params, TargetKind target);

}  // namespace ds3
