#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace ds3 {

/// Partially labeled sample. Covariates are observed for every row; outcomes
/// only where the label indicator is 1. Outcome cells of unlabeled rows hold
/// NaN and are never read by any downstream computation.
///
/// Immutable after construction; safe to share across threads.
class ObservedDataset {
public:
    /// Validates: m >= 2, at least one labeled row, x finite everywhere,
    /// y finite on labeled rows, p >= 1, k >= 1.
    ObservedDataset(Eigen::MatrixXd x, Eigen::VectorXi r, Eigen::MatrixXd y);

    Eigen::Index m() const noexcept { return x_.rows(); }
    Eigen::Index p() const noexcept { return x_.cols(); }
    Eigen::Index k() const noexcept { return y_.cols(); }
    Eigen::Index n_labeled() const noexcept { return n_labeled_; }

    const Eigen::MatrixXd& x() const noexcept { return x_; }
    const Eigen::VectorXi& r() const noexcept { return r_; }
    const Eigen::MatrixXd& y() const noexcept { return y_; }

    std::vector<Eigen::Index> labeled_rows() const;

private:
    Eigen::MatrixXd x_;
    Eigen::VectorXi r_;
    Eigen::MatrixXd y_;
    Eigen::Index n_labeled_ = 0;
};

/// Reads the documented CSV schema: header `x1,...,xp,r,y1,...,yk`, UTF-8,
/// '.' decimal separator, LF or CRLF, scientific notation accepted. Outcome
/// cells may be empty only on unlabeled rows.
ObservedDataset load_csv(const std::string& path);

/// Writes the same schema; doubles carry full round-trip precision, unlabeled
/// outcome cells are emitted empty.
void write_csv(const ObservedDataset& data, const std::string& path);

/// Fraction of labeled rows, in (0, 1].
double labeled_fraction(const ObservedDataset& data);

/// Cross-fitting partition. fold_of[i] in [0, j_folds).
struct FoldAssignment {
    std::vector<int> fold_of;
    int j_folds = 0;

    std::vector<Eigen::Index> fold_rows(int j) const;
    std::vector<Eigen::Index> complement_rows(int j) const;
};

/// Stratified fold assignment: labeled and unlabeled rows are each shuffled
/// (Fisher-Yates on the documented stream) and dealt round-robin, so per-fold
/// labeled counts differ by at most 1, and likewise for unlabeled counts.
/// Deterministic function of (m, r, j_folds, seed).
///
/// Requires 2 <= j_folds <= #labeled, and j_folds <= #unlabeled when
/// unlabeled rows exist; every training complement must keep at least p + 2
/// labeled rows so the projection stays fittable.
FoldAssignment assign_folds(const ObservedDataset& data, int j_folds, std::uint64_t seed);

}  // namespace ds3
