#pragma once

#include <cstdint>
#include <vector>

#include "clt/linalg.hpp"
#include "clt/rng.hpp"

namespace clt::stats {

/// n points of dimension d, one per row.
struct SampleSet {
    Matrix points;

    long n() const { return points.rows(); }
    int dim() const { return static_cast<int>(points.cols()); }

    static SampleSet from_column(const Vector& xs);
};

/// Grid of sample sizes with estimates, standard errors, and the fitted
/// log-log line through (log n, log value).
struct RateReport {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> stderrs;
    double slope = 0.0;
    double intercept = 0.0;
};

struct SlicedW1 {
    double value = 0.0;
    double std_error = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Exact Wasserstein-1 distance between two one-dimensional sample sets:
/// sorted-difference mean for equal sizes, quantile-function integral on the
/// merged grid otherwise.
double w1_exact_1d(const SampleSet& xs, const SampleSet& ys);

/// Average of 1-d W1 over random unit projection directions, with the Monte
/// Carlo standard error across directions.
SlicedW1 sliced_w1(const SampleSet& xs, const SampleSet& ys, int directions,
                   std::uint64_t seed);

/// n i.i.d. draws of cov^{1/2} Z with Z standard normal.
SampleSet gaussian_samples(const Matrix& cov, long n, std::uint64_t seed);

/// Centered second-moment matrix with 1/(n-1) normalization; needs n >= 2.
Matrix empirical_covariance(const SampleSet& xs);

/// Least-squares line through (log grid, log values); values must be positive.
RateFit fit_rate(const std::vector<double>& grid, const std::vector<double>& values);

/// Removes an independent finite-sample floor from a measured distance by
/// RMS subtraction: sqrt(max(value^2 - floor^2, 0)).
double floor_adjust(double value, double floor);

}  // namespace clt::stats
