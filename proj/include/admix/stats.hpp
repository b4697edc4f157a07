#ifndef ADMIX_STATS_H_
#define ADMIX_STATS_H_

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace admix {

double normal_cdf(double x);
// Inverse standard-normal CDF, accurate to ~1e-15 over (0,1).
double normal_quantile(double p);

// Survival function of the Kolmogorov distribution, Q(t) = 2 sum (-1)^{j-1} exp(-2 j^2 t^2).
double kolmogorov_sf(double t);

struct KsResult {
    double statistic = 0; // sup |F_emp - F_ref|
    double p_value = 1;
};

// One-sample KS against a continuous reference CDF.
KsResult ks_test(const std::vector<double>& sample, const std::function<double(double)>& cdf);
// Two-sample KS.
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

// Quantile of a sample by linear interpolation (R type-7).
double quantile(std::vector<double> sample, double prob);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v); // unbiased

// Sample covariance of the rows of a matrix (unbiased).
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& rows);

// Least-squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace admix

#endif // ADMIX_STATS_H_
