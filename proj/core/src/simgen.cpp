#include "ds3/simgen.hpp"

#include <cmath>
#include <limits>

#include "ds3/error.hpp"
#include "ds3/nuisance.hpp"

namespace ds3 {

const char* to_string(PropensityScenario s) noexcept {
    switch (s) {
        case PropensityScenario::decaying_mcar: return "decaying_mcar";
        case PropensityScenario::decaying_offset: return "decaying_offset";
    }
    return "?";
}

PropensityScenario parse_propensity_scenario(const std::string& s) {
    if (s == "decaying_mcar") return PropensityScenario::decaying_mcar;
    if (s == "decaying_offset") return PropensityScenario::decaying_offset;
    throw ConfigError("unknown propensity scenario: " + s);
}

namespace {

void check_scenario(const ScenarioConfig& s) {
    if (s.n < 1 || s.N < 0) throw ConfigError("scenario requires n >= 1 and N >= 0");
    if (s.p < 1 || s.k < 1) throw ConfigError("scenario requires p >= 1 and k >= 1");
}

double design_rate(const ScenarioConfig& s) {
    return static_cast<double>(s.n) / static_cast<double>(s.n + s.N);
}

}  // namespace

TrueParams draw_true_params(const ScenarioConfig& scenario, SeededRng& rng) {
    check_scenario(scenario);
    TrueParams params;
    // beta column by column, each column a standard normal vector.
    params.beta.resize(scenario.p, scenario.k);
    for (Eigen::Index l = 0; l < scenario.k; ++l)
        for (Eigen::Index i = 0; i < scenario.p; ++i) params.beta(i, l) = rng.standard_normal();
    if (scenario.propensity_scenario == PropensityScenario::decaying_offset) {
        params.gamma.resize(scenario.p);
        for (Eigen::Index i = 0; i < scenario.p; ++i) params.gamma(i) = rng.standard_normal();
    }
    params.theta_star_mean = Eigen::VectorXd::Zero(scenario.k);
    if (scenario.k == 1) params.theta_star_ols = params.beta.col(0);
    return params;
}

ObservedDataset generate_data(const ScenarioConfig& scenario, const TrueParams& params,
                              SeededRng& rng) {
    check_scenario(scenario);
    if (params.beta.rows() != scenario.p || params.beta.cols() != scenario.k)
        throw ShapeError("true parameters inconsistent with scenario dimensions");
    if (scenario.propensity_scenario == PropensityScenario::decaying_offset &&
        params.gamma.size() != scenario.p)
        throw ShapeError("offset scenario requires a propensity coefficient vector");

    const Eigen::Index m = scenario.n + scenario.N;
    Eigen::MatrixXd x(m, scenario.p);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < scenario.p; ++j) x(i, j) = rng.standard_normal();

    Eigen::MatrixXd eps(m, scenario.k);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index l = 0; l < scenario.k; ++l) eps(i, l) = rng.standard_normal();

    Eigen::VectorXi r(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double pi = true_propensity(x.row(i).transpose(), scenario, params);
        r(i) = rng.bernoulli(pi) ? 1 : 0;
    }

    Eigen::MatrixXd y(m, scenario.k);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index i = 0; i < m; ++i) {
        if (r(i) == 1)
            y.row(i) = x.row(i) * params.beta + eps.row(i);
        else
            y.row(i).setConstant(nan);
    }
    return ObservedDataset(std::move(x), std::move(r), std::move(y));
}

std::pair<ObservedDataset, TrueParams> generate(const ScenarioConfig& scenario) {
    SeededRng rng(scenario.seed);
    TrueParams params = draw_true_params(scenario, rng);
    ObservedDataset data = generate_data(scenario, params, rng);
    return {std::move(data), std::move(params)};
}

double true_propensity(const Eigen::VectorXd& x, const ScenarioConfig& scenario,
                       const TrueParams& params) {
    check_scenario(scenario);
    if (scenario.propensity_scenario == PropensityScenario::decaying_mcar)
        return design_rate(scenario);
    if (params.gamma.size() != x.size())
        throw ShapeError("propensity coefficient dimension mismatch");
    return expit(std::log(design_rate(scenario)) + x.dot(params.gamma));
}

Eigen::VectorXd true_theta(const TrueParams& params, TargetKind target) {
    if (target == TargetKind::mean) return params.theta_star_mean;
    if (params.theta_star_ols.size() == 0)
        throw ConfigError("ols_coef ground truth requires a single outcome column");
    return params.theta_star_ols;
}

}  // namespace ds3
