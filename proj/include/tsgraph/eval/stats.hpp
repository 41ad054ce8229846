#pragma once

// Two-sample tests used to compare datasets.

#include <span>

namespace tsg::eval {

struct TestResult {
    double statistic = 0.0;  // t for Welch, D for KS
    double p_value = 1.0;
    double df = 0.0;         // Welch-Satterthwaite; 0 for KS
};

/// Two-sided Welch t-test. Needs n >= 2 per sample and positive variance
/// in at least one of them.
TestResult welch_t_test(std::span<const double> x, std::span<const double> y);

/// Two-sample Kolmogorov-Smirnov test, asymptotic p-value with
/// n_eff = n m / (n + m).
TestResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// Kolmogorov distribution survival function Q(lambda) = P(K > lambda).
double kolmogorov_survival(double lambda);

}  // namespace tsg::eval
