#ifndef PUSHIFT_STATS_HPP
#define PUSHIFT_STATS_HPP

#include <vector>

namespace pushift {

double mean(const std::vector<double>& values);
// sample standard deviation / sqrt(n)
double standard_error(const std::vector<double>& values);
double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// P(T <= t) for Student's t with nu degrees of freedom.
double student_t_cdf(double t, double nu);

// One-sided Welch test of "mean(a) < mean(b)": returns P(T <= t_observed)
// under equal means, small when a looks significantly worse than b.
// Degenerate variances fall back to exact mean comparison (0, 1/2, or 1).
double welch_one_sided_p(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace pushift

#endif  // PUSHIFT_STATS_HPP
