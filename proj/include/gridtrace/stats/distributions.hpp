#pragma once

#include <span>
#include <vector>

namespace gridtrace::stats {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

double normal_cdf(double z);
double normal_sf(double z);

/// Two-sided p-value of a Student-t statistic.
double student_t_two_sided(double t, double dof);
/// Upper tail of F(d1, d2).
double f_sf(double f, double d1, double d2);
/// Upper tail of chi-square(k).
double chi2_sf(double x, double k);

/// Empirical quantile by linear interpolation of order statistics,
/// h = (n - 1) q + 1 (the "type 7" rule). `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double q);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased
double median(std::vector<double> x);

}  // namespace gridtrace::stats
