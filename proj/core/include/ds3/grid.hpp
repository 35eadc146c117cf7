#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ds3/engine.hpp"
#include "ds3/simgen.hpp"

namespace ds3 {

/// One scenario cell of a simulation grid.
struct ScenarioSpec {
    std::string id;
    ScenarioConfig scenario;
    TargetKind target = TargetKind::mean;
};

/// Parsed simulation grid: scenarios crossed with estimator kinds, replicated
/// with seeds derived from base_seed.
struct GridSpec {
    std::vector<ScenarioSpec> scenarios;
    std::vector<EstimatorKind> estimators = {EstimatorKind::naive, EstimatorKind::or_only,
                                             EstimatorKind::ipw_only, EstimatorKind::ds3};
    int replications = 100;
    std::uint64_t base_seed = 20240101;
    double alpha = 0.05;
    ProjectionModel projection_model = ProjectionModel::ols;
    PropensityModel propensity_model = PropensityModel::offset_logistic;
    int j_folds = 5;
    double propensity_floor = 0.0;
    double irls_tol = 1e-8;
    int irls_max_iter = 100;
    bool literal_hotelling = false;
    bool propensity_intercept = false;
    double ridge_eps = 1e-10;
};

GridSpec parse_grid_file(const std::string& path);

/// One (scenario, estimator, replication) result row. status is "ok" or a
/// one-line failure description; numeric fields are meaningful only when ok.
struct ReplicationRow {
    std::string scenario_id;
    EstimatorKind estimator = EstimatorKind::ds3;
    std::uint64_t rep = 0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    double rmse = 0.0;
    bool covered = false;
    Eigen::Index n_labeled = 0;
    double overlap_index = 0.0;
    Eigen::VectorXd theta_hat;

    bool ok() const { return status == "ok"; }
};

/// Per-(scenario, estimator) aggregates over completed replications.
struct CellAggregate {
    std::string scenario_id;
    EstimatorKind estimator = EstimatorKind::ds3;
    int replications = 0;
    int completed = 0;
    double median_rmse = 0.0;
    double iqr_rmse = 0.0;
    double coverage = 0.0;
    double coverage_se = 0.0;
};

/// Runs every (scenario, estimator, replication) cell. Replications execute
/// concurrently up to `jobs` workers; the returned rows are in deterministic
/// (scenario, estimator, replication) order regardless of scheduling, and the
/// values are a pure function of (spec, base seed).
std::vector<ReplicationRow> run_grid(const GridSpec& spec, int jobs);

/// Linear-interpolation sample quantile (the common "type 7" definition).
double quantile_type7(std::vector<double> values, double prob);

/// Groups rows by (scenario, estimator) preserving first-appearance order and
/// aggregates the completed ones.
std::vector<CellAggregate> aggregate_rows(const std::vector<ReplicationRow>& rows);

void write_results_csv(std::ostream& out, const std::vector<ReplicationRow>& rows);
std::vector<ReplicationRow> read_results_csv(const std::string& path);
void write_aggregates_csv(std::ostream& out, const std::vector<CellAggregate>& cells);

/// Markdown summary: one table per scenario (sorted by scenario id) with
/// estimator rows of median RMSE, IQR, and coverage with 2-standard-error
/// bands.
std::string render_markdown_summary(const std::vector<CellAggregate>& cells);

}  // namespace ds3
