#include "clt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace clt::stats {

SampleSet SampleSet::from_column(const Vector& xs) {
    SampleSet s;
    s.points = xs;
    return s;
}

namespace {

std::vector<double> sorted_column(const SampleSet& s) {
    std::vector<double> v(s.points.data(), s.points.data() + s.points.rows());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

double w1_exact_1d(const SampleSet& xs, const SampleSet& ys) {
    if (xs.dim() != 1 || ys.dim() != 1) {
        throw DimensionError("w1_exact_1d: samples must be one-dimensional");
    }
    if (xs.n() < 1 || ys.n() < 1) {
        throw DomainError("w1_exact_1d: empty sample set");
    }
    const std::vector<double> a = sorted_column(xs);
    const std::vector<double> b = sorted_column(ys);
    const std::size_t n = a.size(), m = b.size();

    if (n == m) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += std::abs(a[i] - b[i]);
        return sum / static_cast<double>(n);
    }

    // Integral of |F_a^{-1} - F_b^{-1}| over the merged quantile grid. Both
    // quantile functions are constant between breakpoints i/n and j/m;
    // breakpoints are compared exactly via cross-multiplication.
    double total = 0.0;
    double u = 0.0;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        const unsigned long long lhs = static_cast<unsigned long long>(i + 1) * m;
        const unsigned long long rhs = static_cast<unsigned long long>(j + 1) * n;
        const double next =
            lhs <= rhs ? static_cast<double>(i + 1) / static_cast<double>(n)
                       : static_cast<double>(j + 1) / static_cast<double>(m);
        total += (next - u) * std::abs(a[i] - b[j]);
        u = next;
        if (lhs <= rhs) ++i;
        if (rhs <= lhs) ++j;
    }
    return total;
}

SlicedW1 sliced_w1(const SampleSet& xs, const SampleSet& ys, int directions,
                   std::uint64_t seed) {
    if (xs.dim() != ys.dim()) {
        throw DimensionError("sliced_w1: dimension mismatch " + std::to_string(xs.dim()) +
                             " vs " + std::to_string(ys.dim()));
    }
    if (directions < 1) throw DomainError("sliced_w1: directions must be >= 1");
    const int d = xs.dim();

    double sum = 0.0, sumsq = 0.0;
    for (int k = 0; k < directions; ++k) {
        Rng rng(seed, {0x51edULL, static_cast<std::uint64_t>(k)});
        Vector u(d);
        double norm = 0.0;
        do {
            for (int i = 0; i < d; ++i) u(i) = rng.next_normal();
            norm = u.norm();
        } while (norm < 1e-12);
        u /= norm;

        SampleSet px, py;
        px.points = xs.points * u;
        py.points = ys.points * u;
        const double w = w1_exact_1d(px, py);
        sum += w;
        sumsq += w * w;
    }

    SlicedW1 out;
    out.value = sum / directions;
    if (directions > 1) {
        const double var =
            std::max(0.0, (sumsq - directions * out.value * out.value) / (directions - 1));
        out.std_error = std::sqrt(var / directions);
    }
    return out;
}

SampleSet gaussian_samples(const Matrix& cov, long n, std::uint64_t seed) {
    if (n < 1) throw DomainError("gaussian_samples: n must be >= 1");
    const Matrix root = linalg::sqrt_psd(cov);
    const int d = static_cast<int>(cov.rows());

    SampleSet out;
    out.points.resize(n, d);
    Rng rng(seed, {0x9a55ULL});
    Vector z(d);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) z(j) = rng.next_normal();
        out.points.row(i) = (root * z).transpose();
    }
    return out;
}

Matrix empirical_covariance(const SampleSet& xs) {
    if (xs.n() < 2) throw DomainError("empirical_covariance: need n >= 2");
    const Vector mean = xs.points.colwise().mean();
    const Matrix centered = xs.points.rowwise() - mean.transpose();
    Matrix cov = centered.transpose() * centered / static_cast<double>(xs.n() - 1);
    return 0.5 * (cov + cov.transpose()).eval();
}

RateFit fit_rate(const std::vector<double>& grid, const std::vector<double>& values) {
    if (grid.size() != values.size()) {
        throw DimensionError("fit_rate: grid and values differ in length");
    }
    if (grid.size() < 2) throw DomainError("fit_rate: need at least 2 grid points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || (i > 0 && grid[i] <= grid[i - 1])) {
            throw DomainError("fit_rate: grid must be positive and strictly increasing");
        }
        if (!(values[i] > 0.0)) {
            throw DomainError("fit_rate: value at grid point " + std::to_string(grid[i]) +
                              " is not positive");
        }
    }

    const double n = static_cast<double>(grid.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = std::log(grid[i]);
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    RateFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

double floor_adjust(double value, double floor) {
    const double diff = value * value - floor * floor;
    return diff > 0.0 ? std::sqrt(diff) : 0.0;
}

}  // namespace clt::stats
