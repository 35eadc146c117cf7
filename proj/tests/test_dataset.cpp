#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "ds3/dataset.hpp"
#include "ds3/error.hpp"

using namespace ds3;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = temp_path(name);
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

ObservedDataset random_dataset(std::mt19937_64& gen, Eigen::Index m, Eigen::Index p,
                               Eigen::Index k, Eigen::Index min_labeled = 1) {
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<int> coin(0, 1);
    Eigen::MatrixXd x(m, p), y(m, k);
    Eigen::VectorXi r(m);
    for (;;) {
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) x(i, j) = normal(gen) * std::pow(10.0, coin(gen) * 6 - 3);
            r(i) = coin(gen);
            for (Eigen::Index j = 0; j < k; ++j)
                y(i, j) = r(i) == 1 ? normal(gen) : std::numeric_limits<double>::quiet_NaN();
        }
        if (r.sum() >= min_labeled) break;
    }
    return ObservedDataset(x, r, y);
}

}  // namespace

TEST_CASE("load_csv parses a small labeled/unlabeled file") {
    const std::string path = write_temp("ds3_basic.csv",
                                        "x1,x2,r,y1\n"
                                        "0.5,1.0,1,2.5\n"
                                        "-1.5,2.0,0,\n"
                                        "3.25e0,-4.0,1,-7.125\n"
                                        "0.0,0.0,0,\n");
    const ObservedDataset data = load_csv(path);
    CHECK(data.m() == 4);
    CHECK(data.p() == 2);
    CHECK(data.k() == 1);
    CHECK(data.n_labeled() == 2);
    CHECK(data.x()(0, 0) == 0.5);
    CHECK(data.x()(2, 0) == 3.25);
    CHECK(data.y()(2, 0) == -7.125);
    CHECK(data.r()(3) == 0);
}

TEST_CASE("load_csv accepts CRLF line endings") {
    const std::string path = write_temp("ds3_crlf.csv",
                                        "x1,r,y1\r\n"
                                        "1.0,1,2.0\r\n"
                                        "2.0,0,\r\n");
    const ObservedDataset data = load_csv(path);
    CHECK(data.m() == 2);
    CHECK(data.y()(0, 0) == 2.0);
}

TEST_CASE("load_csv rejects malformed input with typed errors") {
    CHECK_THROWS_AS(load_csv(write_temp("bad_header.csv", "x1,y1,r\n1,2,1\n1,2,1\n")),
                    SchemaError);
    CHECK_THROWS_AS(load_csv(write_temp("bad_header2.csv", "x1,x3,r,y1\n1,2,1,3\n1,2,1,3\n")),
                    SchemaError);
    CHECK_THROWS_AS(load_csv(write_temp("bad_cells.csv", "x1,r,y1\n1,1\n2,0,\n")), SchemaError);
    CHECK_THROWS_AS(load_csv(write_temp("bad_r.csv", "x1,r,y1\n1,2,3\n2,0,\n")), DataError);
    CHECK_THROWS_AS(load_csv(write_temp("missing_y.csv", "x1,r,y1\n1,1,\n2,0,\n")), DataError);
    CHECK_THROWS_AS(load_csv(write_temp("nan_y.csv", "x1,r,y1\n1,1,nan\n2,0,\n")), DataError);
    CHECK_THROWS_AS(load_csv(write_temp("no_labels.csv", "x1,r,y1\n1,0,\n2,0,\n")),
                    DegenerateDataError);
    CHECK_THROWS_AS(load_csv(write_temp("one_row.csv", "x1,r,y1\n1,1,2\n")), DataError);
    CHECK_THROWS_AS(load_csv(temp_path("ds3_does_not_exist.csv")), DataError);
}

TEST_CASE("csv round trip reproduces the dataset bit for bit") {
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<int> md(2, 40), pd(1, 4), kd(1, 3);
    for (int rep = 0; rep < 30; ++rep) {
        const ObservedDataset data = random_dataset(gen, md(gen), pd(gen), kd(gen));
        const std::string path = temp_path("ds3_roundtrip.csv");
        write_csv(data, path);
        const ObservedDataset back = load_csv(path);
        REQUIRE(back.m() == data.m());
        REQUIRE(back.p() == data.p());
        REQUIRE(back.k() == data.k());
        CHECK(back.x() == data.x());
        CHECK(back.r() == data.r());
        for (Eigen::Index i = 0; i < data.m(); ++i)
            if (data.r()(i) == 1) CHECK(back.y().row(i) == data.y().row(i));
    }
}

TEST_CASE("labeled_fraction") {
    Eigen::MatrixXd x(4, 1);
    x << 1, 2, 3, 4;
    Eigen::VectorXi r(4);
    r << 1, 0, 0, 1;
    Eigen::MatrixXd y(4, 1);
    y << 1.0, 0, 0, 2.0;
    CHECK(labeled_fraction(ObservedDataset(x, r, y)) == 0.5);
    r.setOnes();
    CHECK(labeled_fraction(ObservedDataset(x, r, y)) == 1.0);
}

TEST_CASE("assign_folds: 5 labeled and 5 unlabeled rows into 5 folds") {
    Eigen::MatrixXd x(10, 1);
    Eigen::VectorXi r(10);
    Eigen::MatrixXd y(10, 1);
    for (Eigen::Index i = 0; i < 10; ++i) {
        x(i, 0) = static_cast<double>(i);
        r(i) = i < 5 ? 1 : 0;
        y(i, 0) = r(i) == 1 ? static_cast<double>(i) : std::numeric_limits<double>::quiet_NaN();
    }
    const ObservedDataset data(x, r, y);
    const FoldAssignment folds = assign_folds(data, 5, 42);
    for (int j = 0; j < 5; ++j) {
        int labeled = 0, unlabeled = 0;
        for (Eigen::Index i = 0; i < 10; ++i) {
            if (folds.fold_of[static_cast<std::size_t>(i)] != j) continue;
            (r(i) == 1 ? labeled : unlabeled)++;
        }
        CHECK(labeled == 1);
        CHECK(unlabeled == 1);
    }
}

TEST_CASE("assign_folds: fully labeled six rows split 3/3") {
    Eigen::MatrixXd x(6, 1);
    x << 1, 2, 3, 4, 5, 6;
    Eigen::VectorXi r = Eigen::VectorXi::Ones(6);
    Eigen::MatrixXd y(6, 1);
    y << 1, 2, 3, 4, 5, 6;
    const FoldAssignment folds = assign_folds(ObservedDataset(x, r, y), 2, 1);
    int sizes[2] = {0, 0};
    for (int f : folds.fold_of) sizes[f]++;
    CHECK(sizes[0] == 3);
    CHECK(sizes[1] == 3);
}

TEST_CASE("assign_folds is deterministic in the seed") {
    std::mt19937_64 gen(11);
    const ObservedDataset data = random_dataset(gen, 30, 1, 1, 8);
    const FoldAssignment a = assign_folds(data, 4, 99);
    const FoldAssignment b = assign_folds(data, 4, 99);
    CHECK(a.fold_of == b.fold_of);
    const FoldAssignment c = assign_folds(data, 4, 100);
    CHECK(a.fold_of != c.fold_of);  // astronomically unlikely to collide
}

TEST_CASE("assign_folds partition and stratification properties") {
    std::mt19937_64 gen(13);
    for (int rep = 0; rep < 20; ++rep) {
        const ObservedDataset data = random_dataset(gen, 40, 1, 1, 10);
        const int J = 3 + static_cast<int>(gen() % 3);
        const FoldAssignment folds = assign_folds(data, J, gen());
        std::set<Eigen::Index> seen;
        std::vector<int> labeled(static_cast<std::size_t>(J), 0),
            unlabeled(static_cast<std::size_t>(J), 0);
        for (int j = 0; j < J; ++j) {
            for (Eigen::Index i : folds.fold_rows(j)) {
                CHECK(seen.insert(i).second);
                (data.r()(i) == 1 ? labeled : unlabeled)[static_cast<std::size_t>(j)]++;
            }
            const auto comp = folds.complement_rows(j);
            CHECK(static_cast<Eigen::Index>(comp.size() + folds.fold_rows(j).size()) == data.m());
        }
        CHECK(static_cast<Eigen::Index>(seen.size()) == data.m());
        const auto spread = [](const std::vector<int>& counts) {
            int lo = counts[0], hi = counts[0];
            for (int c : counts) {
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
            return hi - lo;
        };
        CHECK(spread(labeled) <= 1);
        CHECK(spread(unlabeled) <= 1);
    }
}

TEST_CASE("assign_folds rejects invalid fold counts") {
    std::mt19937_64 gen(17);
    const ObservedDataset data = random_dataset(gen, 12, 1, 1, 4);
    CHECK_THROWS_AS(assign_folds(data, 1, 0), ConfigError);
    CHECK_THROWS_AS(assign_folds(data, static_cast<int>(data.n_labeled()) + 1, 0), ConfigError);
    if (data.m() > data.n_labeled())
        CHECK_THROWS_AS(assign_folds(data, static_cast<int>(data.m() - data.n_labeled()) + 1, 0),
                        ConfigError);
}

TEST_CASE("assign_folds enforces trainable complements") {
    // 6 labeled rows, p = 5: any 2-fold split leaves at most 3 labeled rows
    // in a complement, below the p + 2 = 7 needed.
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 5);
    Eigen::VectorXi r = Eigen::VectorXi::Ones(6);
    Eigen::MatrixXd y = Eigen::MatrixXd::Random(6, 1);
    CHECK_THROWS_AS(assign_folds(ObservedDataset(x, r, y), 2, 5), InsufficientDataError);
}
