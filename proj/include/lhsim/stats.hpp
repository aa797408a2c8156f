#ifndef LHSIM_STATS_HPP
#define LHSIM_STATS_HPP

// Cohort statistics: SEM and one-way repeated-measures ANOVA with the
// F-distribution tail evaluated through the regularized incomplete beta
// function (Lentz continued fraction).

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lhsim {

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Sample standard deviation (n-1 denominator).
inline double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) throw std::invalid_argument("sample_sd: need >= 2 values");
    double m = mean_of(v), s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double sem_of(const std::vector<double>& v) {
    return sample_sd(v) / std::sqrt(static_cast<double>(v.size()));
}

namespace detail {

inline double betacf(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 3e-14, fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        double m2 = 2.0 * m;
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
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::betacf(a, b, x) / a;
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

/// Upper tail P(F > f) for d1, d2 degrees of freedom.
inline double f_tail(double f, double d1, double d2) {
    if (f <= 0.0) return 1.0;
    return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

struct AnovaResult {
    double f = 0.0;
    double p = 1.0;
    double df_treatment = 0.0;
    double df_error = 0.0;
};

/// One-way repeated-measures ANOVA over a complete animals x phases matrix.
/// Total SS is partitioned into subject, treatment (phase) and error terms;
/// F = MS_treatment / MS_error with (k-1, (k-1)(n-1)) degrees of freedom.
inline AnovaResult rm_anova(const std::vector<std::vector<double>>& matrix) {
    const std::size_t n = matrix.size();  // animals
    if (n < 2) throw std::invalid_argument("rm_anova: need >= 2 animals");
    const std::size_t k = matrix[0].size();  // phases
    if (k < 2) throw std::invalid_argument("rm_anova: need >= 2 phases");
    for (const auto& row : matrix)
        if (row.size() != k) throw std::invalid_argument("rm_anova: ragged matrix");

    double grand = 0.0;
    std::vector<double> subj_mean(n, 0.0), treat_mean(k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            grand += matrix[i][j];
            subj_mean[i] += matrix[i][j];
            treat_mean[j] += matrix[i][j];
        }
    grand /= static_cast<double>(n * k);
    for (double& v : subj_mean) v /= static_cast<double>(k);
    for (double& v : treat_mean) v /= static_cast<double>(n);

    double ss_treat = 0.0, ss_subj = 0.0, ss_err = 0.0;
    for (std::size_t j = 0; j < k; ++j)
        ss_treat += static_cast<double>(n) * (treat_mean[j] - grand) * (treat_mean[j] - grand);
    for (std::size_t i = 0; i < n; ++i)
        ss_subj += static_cast<double>(k) * (subj_mean[i] - grand) * (subj_mean[i] - grand);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            double r = matrix[i][j] - subj_mean[i] - treat_mean[j] + grand;
            ss_err += r * r;
        }

    AnovaResult res;
    res.df_treatment = static_cast<double>(k - 1);
    res.df_error = static_cast<double>((k - 1) * (n - 1));
    double ms_treat = ss_treat / res.df_treatment;
    double ms_err = ss_err / res.df_error;
    if (ms_err <= 0.0) {
        if (ss_treat <= 0.0) {
            res.f = 0.0;
            res.p = 1.0;
        } else {
            res.f = std::numeric_limits<double>::infinity();
            res.p = 1e-12;  // sentinel for zero error variance
        }
        return res;
    }
    res.f = ms_treat / ms_err;
    res.p = f_tail(res.f, res.df_treatment, res.df_error);
    if (res.p < 1e-12) res.p = 1e-12;
    return res;
}

}  // namespace lhsim

#endif
