#pragma once

#include <span>
#include <vector>

namespace locind {

// Kolmogorov-Smirnov distance between the empirical distribution of a sample
// and a continuous CDF, given the sample already mapped through that CDF.
double ks_distance_uniform(std::vector<double> cdf_values);

// Asymptotic P(D_n > d) with the Stephens small-sample correction.
double ks_p_value(double distance, std::size_t n);

// Quantile by linear interpolation between order statistics (type 7).
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

struct Proportion {
    std::size_t successes = 0;
    std::size_t trials = 0;

    double value() const;
    // Binomial standard error sqrt(p (1 - p) / n) at the observed p.
    double standard_error() const;
};

} // namespace locind
