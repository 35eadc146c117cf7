#include "ds3/commands.hpp"

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ds3/config_file.hpp"
#include "ds3/engine.hpp"
#include "ds3/error.hpp"
#include "ds3/grid.hpp"

namespace ds3 {

namespace {

using nlohmann::json;

EstimationConfig load_estimation_config(const std::string& path) {
    EstimationConfig cfg;
    if (path.empty()) return cfg;
    const std::vector<ConfigSection> sections = parse_config_file(path);
    bool saw = false;
    for (const ConfigSection& section : sections) {
        if (section.name != "estimation")
            throw ConfigError("unknown section [" + section.name + "] in estimation config");
        if (saw) throw ConfigError("duplicate [estimation] section");
        saw = true;
        SectionReader r(section);
        cfg.target = parse_target_kind(r.get_string("target", "mean"));
        cfg.estimator = parse_estimator_kind(r.get_string("estimator", "ds3"));
        cfg.projection_model = parse_projection_model(r.get_string("projection_model", "ols"));
        cfg.propensity_model =
            parse_propensity_model(r.get_string("propensity_model", "offset_logistic"));
        cfg.j_folds = static_cast<int>(r.get_int("j_folds", cfg.j_folds));
        cfg.seed = r.get_uint("seed", cfg.seed);
        const std::string floor = r.get_string("propensity_floor", "auto");
        if (floor != "auto") {
            errno = 0;
            char* end = nullptr;
            cfg.propensity_floor = std::strtod(floor.c_str(), &end);
            if (end != floor.c_str() + floor.size() || errno == ERANGE)
                throw ConfigError("propensity_floor expects 'auto' or a number");
        }
        cfg.alpha = r.get_double("alpha", cfg.alpha);
        cfg.irls_tol = r.get_double("irls_tol", cfg.irls_tol);
        cfg.irls_max_iter = static_cast<int>(r.get_int("irls_max_iter", cfg.irls_max_iter));
        cfg.literal_hotelling = r.get_bool("literal_hotelling", cfg.literal_hotelling);
        cfg.propensity_intercept = r.get_bool("propensity_intercept", cfg.propensity_intercept);
        cfg.ridge_eps = r.get_double("ridge_eps", cfg.ridge_eps);
        r.finish();
    }
    return cfg;
}

// Single-column propensity file: one value per line, optional `pi` header.
Eigen::VectorXd load_pi_column(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open propensity file: " + path);
    std::vector<double> values;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (first && line == "pi") {
            first = false;
            continue;
        }
        first = false;
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end != line.c_str() + line.size() || errno == ERANGE)
            throw ConfigError("unparseable propensity value '" + line + "' in " + path);
        values.push_back(v);
    }
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// Prediction columns: header f1,...,fd then one row per observation.
Eigen::MatrixXd load_predictions_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open predictions file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty predictions file: " + path);
    const auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        for (char c : s) {
            if (c == ',') {
                cells.push_back(cell);
                cell.clear();
            } else if (c != '\r' && c != ' ') {
                cell.push_back(c);
            }
        }
        cells.push_back(cell);
        return cells;
    };
    const std::vector<std::string> header = split(line);
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] != "f" + std::to_string(j + 1))
            throw SchemaError("predictions header must read f1,...,fd");
    const std::size_t d = header.size();
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != d) throw SchemaError("wrong cell count in predictions file");
        for (const std::string& cell : cells) {
            errno = 0;
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE)
                throw DataError("unparseable prediction value '" + cell + "'");
            values.push_back(v);
        }
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(values.size() / d);
    Eigen::MatrixXd f(rows, static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j)
            f(i, j) = values[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)];
    return f;
}

json report_to_json(const EstimateReport& report) {
    json out;
    out["target"] = to_string(report.target);
    out["estimator"] = to_string(report.estimator);
    out["q"] = report.theta_hat.size();
    out["theta_hat"] = std::vector<double>(report.theta_hat.data(),
                                           report.theta_hat.data() + report.theta_hat.size());
    json intervals = json::array();
    for (const auto& [lo, hi] : report.intervals) intervals.push_back({lo, hi});
    out["intervals"] = intervals;
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(report.v_hat.v_hat.size()));
    for (Eigen::Index r = 0; r < report.v_hat.v_hat.rows(); ++r)
        for (Eigen::Index c = 0; c < report.v_hat.v_hat.cols(); ++c)
            v.push_back(report.v_hat.v_hat(r, c));
    out["v_hat"] = {{"rows", report.v_hat.v_hat.rows()},
                    {"values_row_major", v},
                    {"m_used", report.v_hat.m_used}};
    out["m"] = report.m;
    out["n_labeled"] = report.n_labeled;
    out["labeled_fraction"] = report.labeled_fraction;
    out["overlap_index"] = report.overlap_index;
    out["effective_sample_size"] = report.effective_sample_size;
    out["clipped_count"] = report.clipped_count;
    out["alpha"] = report.alpha;
    json folds = json::array();
    for (const FoldDiagnostics& fd : report.folds) {
        folds.push_back({{"fold", fd.fold},
                         {"propensity_fitted", fd.propensity_fitted},
                         {"propensity_converged", fd.propensity_converged},
                         {"propensity_iterations", fd.propensity_iterations},
                         {"projection_fitted", fd.projection_fitted},
                         {"projection_ridge_used", fd.projection_ridge_used}});
    }
    out["folds"] = folds;
    return out;
}

int run_guarded(std::ostream& diag, const std::function<int()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        diag << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int cmd_estimate(const EstimateCommand& cmd, std::ostream& diag) {
    return run_guarded(diag, [&]() -> int {
        if (cmd.data_path.empty()) throw ConfigError("estimate requires a dataset path");
        if (cmd.out_path.empty()) throw ConfigError("estimate requires an output path");

        EstimationConfig cfg = load_estimation_config(cmd.config_path);
        if (cmd.target) cfg.target = parse_target_kind(*cmd.target);
        if (cmd.estimator) cfg.estimator = parse_estimator_kind(*cmd.estimator);
        if (cmd.propensity_model) cfg.propensity_model = parse_propensity_model(*cmd.propensity_model);
        if (cmd.projection_model) cfg.projection_model = parse_projection_model(*cmd.projection_model);
        if (cmd.j_folds) cfg.j_folds = *cmd.j_folds;
        if (cmd.seed) cfg.seed = *cmd.seed;
        if (cmd.alpha) cfg.alpha = *cmd.alpha;
        if (cmd.propensity_floor) cfg.propensity_floor = *cmd.propensity_floor;
        if (cmd.literal_hotelling) cfg.literal_hotelling = *cmd.literal_hotelling;

        const ObservedDataset data = load_csv(cmd.data_path);

        std::optional<Eigen::VectorXd> known_pi;
        if (cfg.propensity_model == PropensityModel::known) {
            if (cmd.known_pi_path.empty())
                throw ConfigError("known propensity model requires --known-pi");
            known_pi = load_pi_column(cmd.known_pi_path);
            if (known_pi->size() != data.m())
                throw ConfigError("propensity file has " + std::to_string(known_pi->size()) +
                                  " values; dataset has " + std::to_string(data.m()) + " rows");
        } else if (!cmd.known_pi_path.empty()) {
            throw ConfigError("--known-pi requires the known propensity model");
        }

        EstimateReport report;
        if (!cmd.predictions_path.empty()) {
            const Eigen::MatrixXd f = load_predictions_csv(cmd.predictions_path);
            report = run_ppi(data, f, cfg, known_pi);
        } else {
            report = run_estimation(data, cfg, known_pi);
        }

        std::ofstream out(cmd.out_path, std::ios::binary);
        if (!out) throw DataError("cannot open output file: " + cmd.out_path);
        out << report_to_json(report).dump(2) << "\n";
        if (!out) throw DataError("failed writing: " + cmd.out_path);
        return 0;
    });
}

int cmd_simulate(const SimulateCommand& cmd, std::ostream& diag) {
    return run_guarded(diag, [&]() -> int {
        if (cmd.grid_path.empty()) throw ConfigError("simulate requires a grid file");
        if (cmd.out_dir.empty()) throw ConfigError("simulate requires an output directory");
        GridSpec spec = parse_grid_file(cmd.grid_path);
        if (cmd.base_seed_override) spec.base_seed = *cmd.base_seed_override;

        const std::vector<ReplicationRow> rows = run_grid(spec, cmd.jobs);
        const std::vector<CellAggregate> cells = aggregate_rows(rows);

        std::filesystem::create_directories(cmd.out_dir);
        const auto write_file = [&](const std::string& name, const auto& writer) {
            const std::string path = cmd.out_dir + "/" + name;
            std::ofstream out(path, std::ios::binary);
            if (!out) throw DataError("cannot open output file: " + path);
            writer(out);
            if (!out) throw DataError("failed writing: " + path);
        };
        write_file("results.csv", [&](std::ostream& out) { write_results_csv(out, rows); });
        write_file("aggregate.csv", [&](std::ostream& out) { write_aggregates_csv(out, cells); });
        write_file("summary.md",
                   [&](std::ostream& out) { out << render_markdown_summary(cells); });

        std::size_t ok = 0;
        for (const ReplicationRow& row : rows)
            if (row.ok()) ++ok;
        const double completed =
            rows.empty() ? 1.0 : static_cast<double>(ok) / static_cast<double>(rows.size());
        if (completed < 0.95) {
            diag << "warning: only " << ok << "/" << rows.size()
                 << " replication cells completed\n";
            return 4;
        }
        return 0;
    });
}

int cmd_report(const ReportCommand& cmd, std::ostream& diag) {
    return run_guarded(diag, [&]() -> int {
        if (cmd.results_paths.empty()) throw ConfigError("report requires at least one results file");
        if (cmd.out_path.empty()) throw ConfigError("report requires an output path");
        std::vector<ReplicationRow> rows;
        for (const std::string& path : cmd.results_paths) {
            std::vector<ReplicationRow> part = read_results_csv(path);
            rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                        std::make_move_iterator(part.end()));
        }
        const std::vector<CellAggregate> cells = aggregate_rows(rows);
        std::ofstream out(cmd.out_path, std::ios::binary);
        if (!out) throw DataError("cannot open output file: " + cmd.out_path);
        out << render_markdown_summary(cells);
        if (!out) throw DataError("failed writing: " + cmd.out_path);
        return 0;
    });
}

}  // namespace ds3
