#pragma once

// Independent reference computations used only by the tests: finite
// differences, bisection, closed-form estimators and a Kolmogorov-Smirnov test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "levysde/models.hpp"
#include "levysde/simulate.hpp"

namespace levysde::oracle {

inline double central_difference(const std::function<double(double)>& f, double x, double step)
{
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

inline double bisection(const std::function<double(double)>& f, double lo, double hi,
                        int iterations = 200)
{
    double flo = f(lo);
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Closed-form roots of the estimating equations for a = -alpha x, c = gamma.
inline Eigen::Vector2d ou_const_scale_estimator(const ObservationSeries& obs)
{
    const auto x = obs.values();
    const double h = obs.h();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 1; j < x.size(); ++j) {
        num += x[j - 1] * (x[j] - x[j - 1]);
        den += x[j - 1] * x[j - 1];
    }
    const double alpha = -num / (h * den);
    double ss = 0.0;
    for (std::size_t j = 1; j < x.size(); ++j) {
        const double r = x[j] - x[j - 1] + h * alpha * x[j - 1];
        ss += r * r;
    }
    const double gamma = std::sqrt(ss / (static_cast<double>(obs.n()) * h));
    return {alpha, gamma};
}

/// Closed-form roots for the built-in cmodel: alpha does not depend on gamma
/// because c^2 factors out of G^alpha.
inline Eigen::Vector2d cmodel_estimator(const ObservationSeries& obs)
{
    const auto x = obs.values();
    const double h = obs.h();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 1; j < x.size(); ++j) {
        const double w = std::pow(1.0 + x[j - 1] * x[j - 1], 2);
        num += w * x[j - 1] * (x[j] - x[j - 1]);
        den += w * x[j - 1] * x[j - 1];
    }
    const double alpha = -num / (h * den);
    double ss = 0.0;
    for (std::size_t j = 1; j < x.size(); ++j) {
        const double r = (x[j] - x[j - 1] + h * alpha * x[j - 1]) * (1.0 + x[j - 1] * x[j - 1]);
        ss += r * r;
    }
    return {alpha, std::sqrt(ss / (static_cast<double>(obs.n()) * h))};
}

inline double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Two-sided one-sample KS test against N(0, 1); returns the p-value from the
/// asymptotic Kolmogorov distribution with Stephens' small-sample correction.
inline double ks_pvalue_standard_normal(std::vector<double> xs)
{
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = normal_cdf(xs[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    const double t = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * t * t);
        p += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

inline double mean(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v)
{
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

inline double sd(const std::vector<double>& v)
{
    return std::sqrt(variance(v));
}

} // namespace levysde::oracle
