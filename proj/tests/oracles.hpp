// Test-only numerical oracles, deliberately independent of the library's
// implementation paths: quadrature-based distribution functions and a
// textbook Gauss-Jordan solver. Everything here trades speed for being
// obviously correct.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

inline double simpson_slice(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, double whole, int depth) {
    const double c = 0.5 * (a + b);
    const double left = simpson_slice(f, a, c);
    const double right = simpson_slice(f, c, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) < 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, c, 0.5 * tol, left, depth - 1) +
           adaptive_simpson(f, c, b, 0.5 * tol, right, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    if (a == b) return 0.0;
    return adaptive_simpson(f, a, b, tol, simpson_slice(f, a, b), 60);
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Regularized incomplete beta by quadrature. The substitution u = t^a tames
// the t -> 0 singularity; arguments above the mean go through the symmetry
// identity so the other endpoint is never approached.
inline double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (x > a / (a + b)) return 1.0 - ibeta(b, a, 1.0 - x);
    const auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double t = std::pow(u, 1.0 / a);
        return std::pow(1.0 - t, b - 1.0);
    };
    const double raw = integrate(integrand, 0.0, std::pow(x, a)) / a;
    return raw * std::exp(-log_beta(a, b));
}

inline double f_cdf(double d1, double d2, double x) {
    if (x <= 0.0) return 0.0;
    return ibeta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

inline double normal_cdf(double x) {
    const double cap = std::min(std::abs(x), 40.0);
    const double tail = integrate(
        [](double t) { return std::exp(-0.5 * t * t) / 2.5066282746310005024; }, 0.0, cap);
    return x >= 0.0 ? 0.5 + tail : 0.5 - tail;
}

inline double normal_quantile(double p) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 120; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double t_cdf(double x, double dof) {
    const double log_norm =
        std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) - 0.5 * std::log(dof * M_PI);
    const auto density = [&](double t) {
        return std::exp(log_norm - 0.5 * (dof + 1.0) * std::log1p(t * t / dof));
    };
    const double cap = std::min(std::abs(x), 1e6);
    const double tail = integrate(density, 0.0, cap);
    return x >= 0.0 ? 0.5 + tail : 0.5 - tail;
}

inline double t_quantile(double p, double dof) {
    double lo = -1e7, hi = 1e7;
    for (int i = 0; i < 120; ++i) {
        const double mid = 0.5 * (lo + hi);
        (t_cdf(mid, dof) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Dense solve by Gauss-Jordan elimination with partial pivoting.
inline Eigen::MatrixXd gauss_jordan_inverse(Eigen::MatrixXd a) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        for (Eigen::Index r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (a(pivot, col) == 0.0) throw std::runtime_error("gauss_jordan_inverse: singular");
        a.row(col).swap(a.row(pivot));
        inv.row(col).swap(inv.row(pivot));
        const double d = a(col, col);
        a.row(col) /= d;
        inv.row(col) /= d;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = a(r, col);
            if (factor != 0.0) {
                a.row(r) -= factor * a.row(col);
                inv.row(r) -= factor * inv.row(col);
            }
        }
    }
    return inv;
}

inline Eigen::VectorXd gauss_jordan_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    return gauss_jordan_inverse(a) * b;
}

}  // namespace oracles
