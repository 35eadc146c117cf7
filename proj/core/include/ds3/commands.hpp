#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ds3 {

/// `ds3 estimate` options. Flags override config-file values which override
/// defaults.
struct EstimateCommand {
    std::string data_path;
    std::string out_path;
    std::string config_path;       // optional
    std::string predictions_path;  // optional, enables the prediction-powered path
    std::string known_pi_path;     // required when propensity model is "known"
    std::optional<std::string> target;
    std::optional<std::string> estimator;
    std::optional<std::string> propensity_model;
    std::optional<std::string> projection_model;
    std::optional<int> j_folds;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha;
    std::optional<double> propensity_floor;
    std::optional<bool> literal_hotelling;
};

/// `ds3 simulate` options.
struct SimulateCommand {
    std::string grid_path;
    std::string out_dir;
    int jobs = 1;
    std::optional<std::uint64_t> base_seed_override;  // DS3_SEED
};

/// `ds3 report` options.
struct ReportCommand {
    std::vector<std::string> results_paths;
    std::string out_path;
};

/// Exit codes: 0 ok, 2 data error, 3 configuration error, 4 partial failure.
/// Errors print one line on `diag`.
int cmd_estimate(const EstimateCommand& cmd, std::ostream& diag);
int cmd_simulate(const SimulateCommand& cmd, std::ostream& diag);
int cmd_report(const ReportCommand& cmd, std::ostream& diag);

}  // namespace ds3
