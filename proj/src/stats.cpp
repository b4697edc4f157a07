#include "admix/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace admix {

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

namespace {

// Acklam's rational approximation, then one Halley refinement.
double normal_quantile_approx(double p)
{
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if(p < plow) {
        const double q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
               / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if(p > 1 - plow) {
        const double q = std::sqrt(-2 * std::log(1 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
               / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    const double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
           / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

} // namespace

double normal_quantile(double p)
{
    if(!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
    double x = normal_quantile_approx(p);
    // Halley step on Phi(x) - p = 0.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
    x = x - u / (1 + x * u / 2);
    return x;
}

double kolmogorov_sf(double t)
{
    if(t <= 0) return 1.0;
    if(t < 0.2) return 1.0;
    double s = 0;
    for(int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * t * t);
        s += (j % 2 == 1 ? term : -term);
        if(term < 1e-16) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * s));
}

KsResult ks_test(const std::vector<double>& sample, const std::function<double(double)>& cdf)
{
    if(sample.empty()) throw std::invalid_argument("ks_test: empty sample");
    std::vector<double> x = sample;
    std::sort(x.begin(), x.end());
    const double n = double(x.size());
    double d = 0;
    for(std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max(d, std::abs(f - double(i) / n));
        d = std::max(d, std::abs(double(i + 1) / n - f));
    }
    KsResult r;
    r.statistic = d;
    r.p_value = kolmogorov_sf(std::sqrt(n) * d);
    return r;
}

KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b)
{
    if(a.empty() || b.empty()) throw std::invalid_argument("ks_test_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    double d = 0;
    std::size_t i = 0, j = 0;
    while(i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while(i < a.size() && a[i] <= x) ++i;
        while(j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / na - double(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    const double ne = na * nb / (na + nb);
    r.p_value = kolmogorov_sf(std::sqrt(ne) * d);
    return r;
}

double quantile(std::vector<double> sample, double prob)
{
    if(sample.empty()) throw std::invalid_argument("quantile: empty sample");
    if(!(prob >= 0.0 && prob <= 1.0)) throw std::domain_error("quantile: prob outside [0,1]");
    std::sort(sample.begin(), sample.end());
    const double h = (double(sample.size()) - 1.0) * prob;
    const std::size_t lo = std::size_t(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sample.size() - 1);
    return sample[lo] + (h - double(lo)) * (sample[hi] - sample[lo]);
}

double mean(const std::vector<double>& v)
{
    double s = 0;
    for(double x : v) s += x;
    return s / double(v.size());
}

double variance(const std::vector<double>& v)
{
    const double m = mean(v);
    double s = 0;
    for(double x : v) s += (x - m) * (x - m);
    return s / double(v.size() - 1);
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& rows)
{
    const Eigen::Index n = rows.rows();
    if(n < 2) throw std::invalid_argument("sample_covariance: need >= 2 rows");
    const Eigen::RowVectorXd mu = rows.colwise().mean();
    const Eigen::MatrixXd c = rows.rowwise() - mu;
    return c.transpose() * c / double(n - 1);
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if(x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("ols_slope: need matching samples of size >= 2");
    const double mx = mean(x), my = mean(y);
    double sxy = 0, sxx = 0;
    for(std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace admix
