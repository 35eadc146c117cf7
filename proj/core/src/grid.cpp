#include "ds3/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "ds3/config_file.hpp"
#include "ds3/error.hpp"
#include "ds3/rng.hpp"

namespace ds3 {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool valid_scenario_id(const std::string& id) {
    if (id.empty()) return false;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
        if (!ok) return false;
    }
    return true;
}

double parse_floor(const std::string& s) {
    if (s == "auto") return 0.0;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw ConfigError("propensity_floor expects 'auto' or a number, got '" + s + "'");
    if (v < 0.0 || v >= 1.0) throw ConfigError("propensity_floor must be in [0, 1)");
    return v;
}

std::vector<EstimatorKind> parse_estimator_list(const std::string& s) {
    std::vector<EstimatorKind> kinds;
    std::string token;
    std::istringstream in(s);
    while (std::getline(in, token, ',')) {
        std::size_t b = token.find_first_not_of(" \t");
        std::size_t e = token.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        kinds.push_back(parse_estimator_kind(token.substr(b, e - b + 1)));
    }
    if (kinds.empty()) throw ConfigError("estimators list is empty");
    return kinds;
}

}  // namespace

GridSpec parse_grid_file(const std::string& path) {
    const std::vector<ConfigSection> sections = parse_config_file(path);
    GridSpec spec;
    bool saw_grid = false;
    TargetKind default_target = TargetKind::mean;
    for (const ConfigSection& section : sections) {
        if (section.name == "grid") {
            if (saw_grid) throw ConfigError("duplicate [grid] section");
            saw_grid = true;
            SectionReader r(section);
            spec.replications = static_cast<int>(r.get_int("replications", spec.replications));
            spec.base_seed = r.get_uint("base_seed", spec.base_seed);
            spec.alpha = r.get_double("alpha", spec.alpha);
            if (r.has("estimators")) spec.estimators = parse_estimator_list(r.require_string("estimators"));
            spec.j_folds = static_cast<int>(r.get_int("j_folds", spec.j_folds));
            default_target = parse_target_kind(r.get_string("target", "mean"));
            spec.projection_model =
                parse_projection_model(r.get_string("projection_model", "ols"));
            spec.propensity_model =
                parse_propensity_model(r.get_string("propensity_model", "offset_logistic"));
            spec.propensity_floor = parse_floor(r.get_string("propensity_floor", "auto"));
            spec.irls_tol = r.get_double("irls_tol", spec.irls_tol);
            spec.irls_max_iter = static_cast<int>(r.get_int("irls_max_iter", spec.irls_max_iter));
            spec.literal_hotelling = r.get_bool("literal_hotelling", spec.literal_hotelling);
            spec.propensity_intercept = r.get_bool("propensity_intercept", spec.propensity_intercept);
            spec.ridge_eps = r.get_double("ridge_eps", spec.ridge_eps);
            r.finish();
            continue;
        }
        if (section.name.rfind("scenario ", 0) == 0) {
            ScenarioSpec s;
            s.id = section.name.substr(9);
            if (!valid_scenario_id(s.id))
                throw ConfigError("invalid scenario id '" + s.id +
                                  "' (letters, digits, '_', '-', '.' only)");
            for (const ScenarioSpec& other : spec.scenarios)
                if (other.id == s.id) throw ConfigError("duplicate scenario id '" + s.id + "'");
            SectionReader r(section);
            s.scenario.n = r.require_int("n");
            s.scenario.N = r.require_int("N");
            s.scenario.p = r.get_int("p", 10);
            s.scenario.propensity_scenario =
                parse_propensity_scenario(r.require_string("propensity"));
            s.target = r.has("target") ? parse_target_kind(r.require_string("target"))
                                       : default_target;
            s.scenario.k = r.get_int("k", s.target == TargetKind::ols_coef ? 1 : 2);
            if (s.target == TargetKind::ols_coef && s.scenario.k != 1)
                throw ConfigError("scenario '" + s.id + "': ols_coef target requires k = 1");
            r.finish();
            spec.scenarios.push_back(std::move(s));
            continue;
        }
        throw ConfigError("unknown section [" + section.name + "] in grid file");
    }
    if (spec.scenarios.empty()) throw ConfigError("grid file declares no scenarios");
    if (spec.replications < 1) throw ConfigError("replications must be at least 1");
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
    return spec;
}

namespace {

std::string sanitize_status(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    if (s.empty()) s = "error";
    return s;
}

// All rows of one (scenario, replication) task, one per estimator kind.
std::vector<ReplicationRow> run_replication(const GridSpec& spec, const ScenarioSpec& scenario,
                                            int rep) {
    const std::uint64_t seed =
        replication_seed(spec.base_seed, scenario.id, static_cast<std::uint64_t>(rep));
    std::vector<ReplicationRow> rows;
    rows.reserve(spec.estimators.size());
    for (EstimatorKind est : spec.estimators) {
        ReplicationRow row;
        row.scenario_id = scenario.id;
        row.estimator = est;
        row.rep = static_cast<std::uint64_t>(rep);
        row.seed = seed;
        rows.push_back(std::move(row));
    }

    try {
        ScenarioConfig sc = scenario.scenario;
        sc.seed = seed;
        const auto [data, params] = generate(sc);
        const Eigen::VectorXd theta_star = true_theta(params, scenario.target);

        for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
            ReplicationRow& row = rows[e];
            try {
                EstimationConfig cfg;
                cfg.target = scenario.target;
                cfg.estimator = spec.estimators[e];
                cfg.projection_model = spec.projection_model;
                cfg.propensity_model = spec.propensity_model;
                cfg.j_folds = spec.j_folds;
                cfg.seed = seed;
                cfg.propensity_floor = spec.propensity_floor;
                cfg.alpha = spec.alpha;
                cfg.irls_tol = spec.irls_tol;
                cfg.irls_max_iter = spec.irls_max_iter;
                cfg.literal_hotelling = spec.literal_hotelling;
                cfg.propensity_intercept = spec.propensity_intercept;
                cfg.ridge_eps = spec.ridge_eps;

                const EstimateReport report = run_estimation(data, cfg);
                const TestResult test = hotelling_test(report.theta_hat, theta_star,
                                                       report.v_hat, spec.alpha,
                                                       spec.literal_hotelling);
                row.rmse = (report.theta_hat - theta_star).norm();
                row.covered = !test.reject;
                row.n_labeled = report.n_labeled;
                row.overlap_index = report.overlap_index;
                row.theta_hat = report.theta_hat;
                row.status = "ok";
            } catch (const std::exception& ex) {
                row.status = sanitize_status(ex.what());
            }
        }
    } catch (const std::exception& ex) {
        const std::string status = sanitize_status(ex.what());
        for (ReplicationRow& row : rows) row.status = status;
    }
    return rows;
}

}  // namespace

std::vector<ReplicationRow> run_grid(const GridSpec& spec, int jobs) {
    if (jobs < 1) jobs = 1;
    const std::size_t n_scen = spec.scenarios.size();
    const std::size_t n_tasks = n_scen * static_cast<std::size_t>(spec.replications);
    std::vector<std::vector<ReplicationRow>> task_rows(n_tasks);

    const auto run_task = [&](std::size_t t) {
        const std::size_t s = t / static_cast<std::size_t>(spec.replications);
        const int rep = static_cast<int>(t % static_cast<std::size_t>(spec.replications));
        task_rows[t] = run_replication(spec, spec.scenarios[s], rep);
    };

    if (jobs == 1 || n_tasks <= 1) {
        for (std::size_t t = 0; t < n_tasks; ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        const auto worker = [&] {
            for (;;) {
                const std::size_t t = next.fetch_add(1);
                if (t >= n_tasks) return;
                run_task(t);
            }
        };
        std::vector<std::thread> pool;
        const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n_tasks);
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    // Deterministic (scenario, estimator, replication) output order.
    std::vector<ReplicationRow> rows;
    rows.reserve(n_tasks * spec.estimators.size());
    for (std::size_t s = 0; s < n_scen; ++s) {
        for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
            for (int rep = 0; rep < spec.replications; ++rep) {
                const std::size_t t = s * static_cast<std::size_t>(spec.replications) +
                                      static_cast<std::size_t>(rep);
                rows.push_back(task_rows[t][e]);
            }
        }
    }
    return rows;
}

double quantile_type7(std::vector<double> values, double prob) {
    if (values.empty()) throw InsufficientDataError("quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile prob must be in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = prob * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - std::floor(h);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<CellAggregate> aggregate_rows(const std::vector<ReplicationRow>& rows) {
    std::vector<CellAggregate> cells;
    std::vector<std::vector<const ReplicationRow*>> grouped;
    for (const ReplicationRow& row : rows) {
        std::size_t g = 0;
        for (; g < cells.size(); ++g)
            if (cells[g].scenario_id == row.scenario_id && cells[g].estimator == row.estimator)
                break;
        if (g == cells.size()) {
            CellAggregate cell;
            cell.scenario_id = row.scenario_id;
            cell.estimator = row.estimator;
            cells.push_back(std::move(cell));
            grouped.emplace_back();
        }
        grouped[g].push_back(&row);
    }
    for (std::size_t g = 0; g < cells.size(); ++g) {
        CellAggregate& cell = cells[g];
        cell.replications = static_cast<int>(grouped[g].size());
        std::vector<double> rmse;
        double covered = 0.0;
        for (const ReplicationRow* row : grouped[g]) {
            if (!row->ok()) continue;
            rmse.push_back(row->rmse);
            covered += row->covered ? 1.0 : 0.0;
        }
        cell.completed = static_cast<int>(rmse.size());
        if (cell.completed > 0) {
            cell.median_rmse = quantile_type7(rmse, 0.5);
            cell.iqr_rmse = quantile_type7(rmse, 0.75) - quantile_type7(rmse, 0.25);
            cell.coverage = covered / static_cast<double>(cell.completed);
            cell.coverage_se = std::sqrt(cell.coverage * (1.0 - cell.coverage) /
                                         static_cast<double>(cell.completed));
        }
    }
    return cells;
}

void write_results_csv(std::ostream& out, const std::vector<ReplicationRow>& rows) {
    Eigen::Index max_q = 1;
    for (const ReplicationRow& row : rows) max_q = std::max(max_q, row.theta_hat.size());
    out << "scenario_id,estimator,seed,rmse,covered,n_labeled_realized,overlap_index";
    for (Eigen::Index j = 1; j <= max_q; ++j) out << ",theta_hat_" << j;
    out << ",status\n";
    for (const ReplicationRow& row : rows) {
        out << row.scenario_id << "," << to_string(row.estimator) << "," << row.seed << ",";
        if (row.ok()) {
            out << format_double(row.rmse) << "," << (row.covered ? 1 : 0) << ","
                << row.n_labeled << "," << format_double(row.overlap_index);
        } else {
            out << ",,,";
        }
        for (Eigen::Index j = 0; j < max_q; ++j) {
            out << ",";
            if (row.ok() && j < row.theta_hat.size()) out << format_double(row.theta_hat(j));
        }
        out << "," << (row.ok() ? "ok" : row.status) << "\n";
    }
}

std::vector<ReplicationRow> read_results_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open results file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty results file: " + path);

    const auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        for (char c : s) {
            if (c == ',') {
                cells.push_back(cell);
                cell.clear();
            } else if (c != '\r') {
                cell.push_back(c);
            }
        }
        cells.push_back(cell);
        return cells;
    };

    const std::vector<std::string> header = split(line);
    const std::vector<std::string> prefix = {"scenario_id",        "estimator",
                                             "seed",               "rmse",
                                             "covered",            "n_labeled_realized",
                                             "overlap_index"};
    if (header.size() < prefix.size() + 2)
        throw SchemaError("results header too short in " + path);
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (header[i] != prefix[i])
            throw SchemaError("unexpected results column '" + header[i] + "' in " + path);
    const std::size_t n_theta = header.size() - prefix.size() - 1;
    for (std::size_t j = 0; j < n_theta; ++j)
        if (header[prefix.size() + j] != "theta_hat_" + std::to_string(j + 1))
            throw SchemaError("unexpected results column '" + header[prefix.size() + j] +
                              "' in " + path);
    if (header.back() != "status") throw SchemaError("results file missing status column");

    std::vector<ReplicationRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != header.size())
            throw SchemaError("wrong cell count at " + path + ":" + std::to_string(lineno));
        ReplicationRow row;
        row.scenario_id = cells[0];
        row.estimator = parse_estimator_kind(cells[1]);
        row.seed = std::strtoull(cells[2].c_str(), nullptr, 10);
        row.status = cells.back();
        if (row.ok()) {
            row.rmse = std::strtod(cells[3].c_str(), nullptr);
            row.covered = cells[4] == "1";
            row.n_labeled = std::strtoll(cells[5].c_str(), nullptr, 10);
            row.overlap_index = std::strtod(cells[6].c_str(), nullptr);
            std::vector<double> theta;
            for (std::size_t j = 0; j < n_theta; ++j) {
                const std::string& cell = cells[prefix.size() + j];
                if (cell.empty()) break;
                theta.push_back(std::strtod(cell.c_str(), nullptr));
            }
            row.theta_hat = Eigen::Map<Eigen::VectorXd>(theta.data(),
                                                        static_cast<Eigen::Index>(theta.size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_aggregates_csv(std::ostream& out, const std::vector<CellAggregate>& cells) {
    out << "scenario_id,estimator,replications,completed,median_rmse,iqr_rmse,coverage,"
           "coverage_se\n";
    for (const CellAggregate& cell : cells) {
        out << cell.scenario_id << "," << to_string(cell.estimator) << "," << cell.replications
            << "," << cell.completed << "," << format_double(cell.median_rmse) << ","
            << format_double(cell.iqr_rmse) << "," << format_double(cell.coverage) << ","
            << format_double(cell.coverage_se) << "\n";
    }
}

std::string render_markdown_summary(const std::vector<CellAggregate>& cells) {
    std::map<std::string, std::vector<const CellAggregate*>> by_scenario;
    for (const CellAggregate& cell : cells) by_scenario[cell.scenario_id].push_back(&cell);

    const auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };

    std::ostringstream out;
    out << "# Simulation summary\n";
    for (const auto& [id, group] : by_scenario) {
        out << "\n## " << id << "\n\n";
        out << "| estimator | completed | median RMSE | IQR RMSE | coverage | +/- 2 SE |\n";
        out << "|---|---|---|---|---|---|\n";
        for (const CellAggregate* cell : group) {
            out << "| " << to_string(cell->estimator) << " | " << cell->completed << "/"
                << cell->replications << " | " << fmt(cell->median_rmse) << " | "
                << fmt(cell->iqr_rmse) << " | " << fmt(cell->coverage) << " | "
                << fmt(2.0 * cell->coverage_se) << " |\n";
        }
    }
    return out.str();
}

}  // namespace ds3
