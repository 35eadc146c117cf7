#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ds3/commands.hpp"

namespace {

std::optional<std::uint64_t> seed_from_env() {
    const char* env = std::getenv("DS3_SEED");
    if (!env || !*env) return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
        std::cerr << "error: DS3_SEED must be an unsigned integer\n";
        std::exit(3);
    }
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Doubly robust semi-supervised estimation under covariate-driven labeling"};
    app.require_subcommand(1);

    ds3::EstimateCommand estimate;
    std::string target, estimator, propensity, projection;
    int j_folds = 0;
    std::uint64_t seed = 0;
    double alpha = 0.0, floor = 0.0;
    bool literal = false;

    CLI::App* est = app.add_subcommand("estimate", "Estimate a target on one dataset");
    est->add_option("--data", estimate.data_path, "Dataset CSV (x1..xp,r,y1..yk)")->required();
    est->add_option("--config", estimate.config_path, "Estimation config file");
    est->add_option("--predictions", estimate.predictions_path,
                    "Prediction columns CSV (f1..fd) for the prediction-powered path");
    est->add_option("--known-pi", estimate.known_pi_path,
                    "Known labeling-probability column (one value per row)");
    est->add_option("--out", estimate.out_path, "Output JSON report path")->required();
    CLI::Option* o_target = est->add_option("--target", target, "mean | ols_coef");
    CLI::Option* o_est = est->add_option("--estimator", estimator, "naive | or_only | ipw_only | ds3");
    CLI::Option* o_prop = est->add_option("--propensity", propensity, "constant | offset_logistic | known");
    CLI::Option* o_proj = est->add_option("--projection", projection, "ols | zero");
    CLI::Option* o_folds = est->add_option("--folds", j_folds, "Cross-fitting fold count");
    CLI::Option* o_seed = est->add_option("--seed", seed, "Fold-assignment seed");
    CLI::Option* o_alpha = est->add_option("--alpha", alpha, "Significance level");
    CLI::Option* o_floor = est->add_option("--floor", floor, "Propensity floor (0 = auto)");
    CLI::Option* o_lit = est->add_flag("--literal-hotelling", literal,
                                       "Use the unscaled quadratic-form statistic");

    ds3::SimulateCommand simulate;
    CLI::App* sim = app.add_subcommand("simulate", "Run a Monte Carlo scenario grid");
    sim->add_option("--grid", simulate.grid_path, "Grid config file")->required();
    sim->add_option("--out", simulate.out_dir, "Output directory")->required();
    sim->add_option("--jobs", simulate.jobs, "Concurrent replications")->default_val(1);

    ds3::ReportCommand report;
    CLI::App* rep = app.add_subcommand("report", "Render Markdown tables from results files");
    rep->add_option("results", report.results_paths, "results.csv paths")->required();
    rep->add_option("--out", report.out_path, "Output Markdown path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 3;
    }

    if (est->parsed()) {
        if (*o_target) estimate.target = target;
        if (*o_est) estimate.estimator = estimator;
        if (*o_prop) estimate.propensity_model = propensity;
        if (*o_proj) estimate.projection_model = projection;
        if (*o_folds) estimate.j_folds = j_folds;
        if (*o_seed) estimate.seed = seed;
        if (*o_alpha) estimate.alpha = alpha;
        if (*o_floor) estimate.propensity_floor = floor;
        if (*o_lit) estimate.literal_hotelling = literal;
        return ds3::cmd_estimate(estimate, std::cerr);
    }
    if (sim->parsed()) {
        simulate.base_seed_override = seed_from_env();
        return ds3::cmd_simulate(simulate, std::cerr);
    }
    return ds3::cmd_report(report, std::cerr);
}
