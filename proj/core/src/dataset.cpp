#include "ds3/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "ds3/error.hpp"
#include "ds3/rng.hpp"

namespace ds3 {

namespace {

std::string trimmed(std::string s) {
    const auto is_space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_space(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && is_space(s[i])) ++i;
    return s.substr(i);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(trimmed(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.push_back(trimmed(cell));
    return cells;
}

double parse_double_cell(const std::string& cell, const std::string& context) {
    if (cell.empty()) throw DataError("empty numeric cell in " + context);
    // strtod handles both fixed and scientific notation.
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || errno == ERANGE)
        throw DataError("unparseable numeric cell '" + cell + "' in " + context);
    return v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ObservedDataset::ObservedDataset(Eigen::MatrixXd x, Eigen::VectorXi r, Eigen::MatrixXd y)
    : x_(std::move(x)), r_(std::move(r)), y_(std::move(y)) {
    const Eigen::Index m = x_.rows();
    if (m < 2) throw DataError("dataset needs at least 2 rows");
    if (x_.cols() < 1) throw DataError("dataset needs at least one covariate column");
    if (y_.cols() < 1) throw DataError("dataset needs at least one outcome column");
    if (r_.size() != m || y_.rows() != m)
        throw ShapeError("covariates, indicator and outcomes must have matching row counts");
    if (!x_.allFinite()) throw DataError("non-finite covariate value");
    n_labeled_ = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (r_(i) != 0 && r_(i) != 1) throw DataError("label indicator must be 0 or 1");
        if (r_(i) == 1) {
            ++n_labeled_;
            if (!y_.row(i).allFinite()) throw DataError("non-finite outcome on a labeled row");
        }
    }
    if (n_labeled_ == 0) throw DegenerateDataError("dataset has zero labeled rows");
}

std::vector<Eigen::Index> ObservedDataset::labeled_rows() const {
    std::vector<Eigen::Index> rows;
    rows.reserve(static_cast<std::size_t>(n_labeled_));
    for (Eigen::Index i = 0; i < m(); ++i)
        if (r_(i) == 1) rows.push_back(i);
    return rows;
}

ObservedDataset load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty dataset file: " + path);
    const std::vector<std::string> header = split_csv_line(line);

    // Header must read x1..xp, r, y1..yk in that exact order.
    Eigen::Index p = 0;
    std::size_t pos = 0;
    while (pos < header.size() && header[pos] == "x" + std::to_string(pos + 1)) {
        ++pos;
        ++p;
    }
    if (p < 1 || pos >= header.size() || header[pos] != "r")
        throw SchemaError("malformed header; expected x1,...,xp,r,y1,...,yk");
    ++pos;
    Eigen::Index k = 0;
    while (pos < header.size() && header[pos] == "y" + std::to_string(k + 1)) {
        ++pos;
        ++k;
    }
    if (k < 1 || pos != header.size())
        throw SchemaError("malformed header; expected x1,...,xp,r,y1,...,yk");

    std::vector<double> xv, yv;
    std::vector<int> rv;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trimmed(line).empty()) continue;
        ++row;
        const std::string context = "row " + std::to_string(row);
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != static_cast<std::size_t>(p + 1 + k))
            throw SchemaError("wrong cell count in " + context);
        for (Eigen::Index j = 0; j < p; ++j) {
            const double v = parse_double_cell(cells[static_cast<std::size_t>(j)], context);
            if (!std::isfinite(v)) throw DataError("non-finite covariate in " + context);
            xv.push_back(v);
        }
        const std::string& rc = cells[static_cast<std::size_t>(p)];
        int r;
        if (rc == "0")
            r = 0;
        else if (rc == "1")
            r = 1;
        else
            throw DataError("label indicator must be 0 or 1 in " + context);
        rv.push_back(r);
        for (Eigen::Index j = 0; j < k; ++j) {
            const std::string& cell = cells[static_cast<std::size_t>(p + 1 + j)];
            if (r == 1) {
                if (cell.empty()) throw DataError("missing labeled outcome in " + context);
                const double v = parse_double_cell(cell, context);
                if (!std::isfinite(v)) throw DataError("non-finite labeled outcome in " + context);
                yv.push_back(v);
            } else {
                // Unlabeled outcome cells are normally empty; a value here is
                // legal but never used.
                if (!cell.empty()) parse_double_cell(cell, context);
                yv.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
    }
    const Eigen::Index m = static_cast<Eigen::Index>(rv.size());
    if (m == 0) throw SchemaError("dataset file has no data rows: " + path);

    Eigen::MatrixXd x(m, p), y(m, k);
    Eigen::VectorXi r(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = xv[static_cast<std::size_t>(i * p + j)];
        r(i) = rv[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < k; ++j) y(i, j) = yv[static_cast<std::size_t>(i * k + j)];
    }
    return ObservedDataset(std::move(x), std::move(r), std::move(y));
}

void write_csv(const ObservedDataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    for (Eigen::Index j = 0; j < data.p(); ++j) out << "x" << (j + 1) << ",";
    out << "r";
    for (Eigen::Index j = 0; j < data.k(); ++j) out << ",y" << (j + 1);
    out << "\n";
    for (Eigen::Index i = 0; i < data.m(); ++i) {
        for (Eigen::Index j = 0; j < data.p(); ++j) out << format_double(data.x()(i, j)) << ",";
        out << data.r()(i);
        for (Eigen::Index j = 0; j < data.k(); ++j) {
            out << ",";
            if (data.r()(i) == 1) out << format_double(data.y()(i, j));
        }
        out << "\n";
    }
    if (!out) throw DataError("failed writing: " + path);
}

double labeled_fraction(const ObservedDataset& data) {
    return static_cast<double>(data.n_labeled()) / static_cast<double>(data.m());
}

std::vector<Eigen::Index> FoldAssignment::fold_rows(int j) const {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] == j) rows.push_back(static_cast<Eigen::Index>(i));
    return rows;
}

std::vector<Eigen::Index> FoldAssignment::complement_rows(int j) const {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] != j) rows.push_back(static_cast<Eigen::Index>(i));
    return rows;
}

namespace {

void fisher_yates(std::vector<Eigen::Index>& v, SeededRng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace

FoldAssignment assign_folds(const ObservedDataset& data, int j_folds, std::uint64_t seed) {
    const Eigen::Index m = data.m();
    const Eigen::Index n_lab = data.n_labeled();
    const Eigen::Index n_unlab = m - n_lab;
    if (j_folds < 2 || j_folds > n_lab)
        throw ConfigError("fold count must satisfy 2 <= J <= labeled count (" +
                          std::to_string(n_lab) + ")");
    if (n_unlab > 0 && j_folds > n_unlab)
        throw ConfigError("fold count must not exceed the unlabeled count (" +
                          std::to_string(n_unlab) + ")");

    std::vector<Eigen::Index> lab, unlab;
    for (Eigen::Index i = 0; i < m; ++i) (data.r()(i) == 1 ? lab : unlab).push_back(i);

    // The shuffle stream is decoupled from the caller's other uses of the
    // same seed by a fixed tag.
    SeededRng rng(mix64(seed ^ 0x666f6c6473ULL));
    fisher_yates(lab, rng);
    fisher_yates(unlab, rng);

    FoldAssignment fa;
    fa.j_folds = j_folds;
    fa.fold_of.assign(static_cast<std::size_t>(m), 0);
    std::vector<Eigen::Index> labeled_per_fold(static_cast<std::size_t>(j_folds), 0);
    for (std::size_t i = 0; i < lab.size(); ++i) {
        const int f = static_cast<int>(i % static_cast<std::size_t>(j_folds));
        fa.fold_of[static_cast<std::size_t>(lab[i])] = f;
        ++labeled_per_fold[static_cast<std::size_t>(f)];
    }
    for (std::size_t i = 0; i < unlab.size(); ++i)
        fa.fold_of[static_cast<std::size_t>(unlab[i])] =
            static_cast<int>(i % static_cast<std::size_t>(j_folds));

    // Each training complement must be able to fit the projection.
    const Eigen::Index needed = data.p() + 2;
    for (int j = 0; j < j_folds; ++j) {
        const Eigen::Index in_complement = n_lab - labeled_per_fold[static_cast<std::size_t>(j)];
        if (in_complement < needed)
            throw InsufficientDataError(
                "training complement of fold " + std::to_string(j) + " has only " +
                std::to_string(in_complement) + " labeled rows; needs " + std::to_string(needed));
    }
    return fa;
}

}  // namespace ds3
