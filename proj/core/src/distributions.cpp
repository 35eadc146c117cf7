#include "ds3/distributions.hpp"

#include <cmath>
#include <limits>

#include "ds3/error.hpp"

namespace ds3 {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Pi = 2.5066282746310005024;

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16;
    constexpr double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double beta_pdf_log(double a, double b, double t) {
    return (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - log_beta(a, b);
}

// Inverse of I_t(a, b) by Newton iterations kept inside a shrinking bracket.
double inverse_incomplete_beta(double a, double b, double p) {
    double lo = 0.0, hi = 1.0;
    double t = a / (a + b);  // mean of the Beta(a, b) distribution
    for (int it = 0; it < 200; ++it) {
        const double f = regularized_incomplete_beta(a, b, t) - p;
        if (f > 0.0)
            hi = t;
        else
            lo = t;
        double step;
        const double logpdf = beta_pdf_log(a, b, t);
        if (std::isfinite(logpdf) && logpdf > -700.0) {
            step = f / std::exp(logpdf);
        } else {
            step = 0.0;  // force bisection where the density underflows
        }
        double next = t - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double delta = std::abs(next - t);
        t = next;
        if (delta < 1e-15 && std::abs(f) < 1e-12) break;
    }
    return t;
}

// Inverse normal CDF on (0, 0.5]; rational approximation due to Acklam.
double normal_quantile_lower_half(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    // Two Newton refinements on the CDF push the absolute error to the
    // rounding floor.
    for (int i = 0; i < 2; ++i) {
        const double err = normal_cdf(x) - p;
        const double pdf = std::exp(-0.5 * x * x) / kSqrt2Pi;
        if (pdf > 0.0) x -= err / pdf;
    }
    return x;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta requires a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta requires x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cont_frac(a, b, x) / a;
    return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) throw DomainError("normal_quantile requires prob in (0, 1)");
    if (prob == 0.5) return 0.0;
    // Upper half mirrors the lower half so the antisymmetry identity holds to
    // the last bit.
    if (prob > 0.5) return -normal_quantile_lower_half(1.0 - prob);
    return normal_quantile_lower_half(prob);
}

double f_cdf(Eigen::Index d1, Eigen::Index d2, double x) {
    if (d1 < 1 || d2 < 1) throw DomainError("f_cdf requires d1, d2 >= 1");
    if (x <= 0.0) return 0.0;
    const double a = 0.5 * static_cast<double>(d1);
    const double b = 0.5 * static_cast<double>(d2);
    const double t = d1 * x / (d1 * x + static_cast<double>(d2));
    return regularized_incomplete_beta(a, b, t);
}

double f_quantile(Eigen::Index d1, Eigen::Index d2, double prob) {
    if (d1 < 1 || d2 < 1) throw DomainError("f_quantile requires d1, d2 >= 1");
    if (!(prob > 0.0 && prob < 1.0)) throw DomainError("f_quantile requires prob in (0, 1)");
    const double a = 0.5 * static_cast<double>(d1);
    const double b = 0.5 * static_cast<double>(d2);
    const double t = inverse_incomplete_beta(a, b, prob);
    if (t >= 1.0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(d2) * t / (static_cast<double>(d1) * (1.0 - t));
}

}  // namespace ds3
