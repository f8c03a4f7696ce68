#include "clt/stein.hpp"

#include <cmath>
#include <string>

#include "clt/rng.hpp"

namespace clt::stein {

namespace {

// Inverse symmetric square root; requires a genuinely PD matrix.
Matrix inv_sqrt_pd(const Matrix& m, const char* who) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
    const Vector& evals = es.eigenvalues();
    const double threshold = 1e-10 * std::max(m.trace(), 0.0) / static_cast<double>(m.rows());
    if (evals(0) <= threshold) {
        throw DegenerateCovarianceError(std::string(who) +
                                        ": covariance is not positive definite (min eigenvalue " +
                                        std::to_string(evals(0)) + ")");
    }
    Vector inv_roots = evals.array().sqrt().inverse();
    return es.eigenvectors() * inv_roots.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

SteinConstants stein_constants(int d, double beta, double c_universal) {
    if (d < 1) throw DomainError("stein_constants: d must be >= 1");
    if (!(beta > 0.0 && beta < 1.0)) {
        throw DomainError("stein_constants: beta = " + std::to_string(beta) +
                          " outside (0, 1)");
    }
    if (!(c_universal > 0.0)) throw DomainError("stein_constants: c_universal must be > 0");

    SteinConstants c;
    c.d = d;
    c.beta = beta;
    c.c_universal = c_universal;
    const double dd = static_cast<double>(d);
    c.c1 = std::pow(2.0, 1.5) * (1.0 + 2.0 * dd * std::tgamma((1.0 + dd) / 2.0)) /
           (dd * std::tgamma(dd / 2.0));
    c.c2 = 2.0 * std::sqrt(2.0 * dd / M_PI);
    c.c1_tilde = c.c1 + 2.0 / (1.0 - beta);
    c.c2_tilde = c.c2 + 2.0 * dd / (1.0 - beta);
    return c;
}

double beta_schedule(long n) {
    if (n < 1 || std::log(static_cast<double>(n)) <= 2.0) {
        throw DomainError("beta_schedule: need log n > 2 (n >= 8), got n = " +
                          std::to_string(n));
    }
    return 1.0 - 2.0 / std::log(static_cast<double>(n));
}

double martingale_clt_bound(const MartingaleStats& stats, const SteinConstants& constants) {
    const std::size_t n = static_cast<std::size_t>(stats.n);
    if (stats.moment_2beta.size() != n || stats.moment_beta.size() != n ||
        stats.cov_error_hs.size() != n) {
        throw DimensionError("martingale_clt_bound: stats sequences must have length n = " +
                             std::to_string(stats.n));
    }
    const double sqrt_d = std::sqrt(static_cast<double>(constants.d));
    const double expo = (1.0 + constants.beta) / 2.0;

    double sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double decay = std::pow(static_cast<double>(n - k + 1), -expo);
        sum += (constants.c1_tilde * stats.moment_2beta[k - 1] +
                constants.c2_tilde * stats.moment_beta[k - 1]) *
                   stats.sigma_sqrt_opnorm * decay +
               constants.c_universal * sqrt_d * stats.sigma_sqrt_opnorm *
                   stats.cov_error_hs[k - 1];
    }
    return sum / std::sqrt(static_cast<double>(n));
}

MartingaleStats chain_martingale_stats(const markov::FiniteMarkovChain& chain,
                                       const markov::PoissonSolution& sol,
                                       const Matrix& sigma_inf, long n, double beta,
                                       const Vector& initial_distribution) {
    if (n < 1) throw DomainError("chain_martingale_stats: n must be >= 1");
    if (initial_distribution.size() != chain.num_states()) {
        throw DimensionError("chain_martingale_stats: initial distribution has " +
                             std::to_string(initial_distribution.size()) + " entries for " +
                             std::to_string(chain.num_states()) + " states");
    }
    const int s = chain.num_states();
    const int d = static_cast<int>(sol.v.cols());
    const Matrix& p = chain.transition();
    const Matrix isqrt = inv_sqrt_pd(sigma_inf, "chain_martingale_stats");

    // Per-state conditional moments of the normalized increment and the
    // normalized conditional covariance; the step-k expectation is then a
    // mixture under the law of X_{k-1}.
    Vector s2b(s), sb(s);
    std::vector<Matrix> cc_norm(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) {
        double m2 = 0.0, mb = 0.0;
        Matrix cc = Matrix::Zero(d, d);
        for (int j = 0; j < s; ++j) {
            if (p(i, j) == 0.0) continue;
            const Vector inc = isqrt * (sol.v.row(j) - sol.pv.row(i)).transpose();
            const double norm = inc.norm();
            m2 += p(i, j) * std::pow(norm, 2.0 + beta);
            mb += p(i, j) * std::pow(norm, beta);
            cc.noalias() += p(i, j) * inc * inc.transpose();
        }
        s2b(i) = m2;
        sb(i) = mb;
        cc_norm[static_cast<std::size_t>(i)] = cc;
    }

    MartingaleStats stats;
    stats.n = n;
    stats.moment_2beta.reserve(static_cast<std::size_t>(n));
    stats.moment_beta.reserve(static_cast<std::size_t>(n));
    stats.cov_error_hs.reserve(static_cast<std::size_t>(n));
    stats.sigma_sqrt_opnorm = linalg::operator_norm(linalg::sqrt_psd(sigma_inf));

    Vector law = initial_distribution;  // law of X_{k-1}
    const Matrix eye = Matrix::Identity(d, d);
    for (long k = 1; k <= n; ++k) {
        stats.moment_2beta.push_back(law.dot(s2b));
        stats.moment_beta.push_back(law.dot(sb));
        Matrix expected = Matrix::Zero(d, d);
        for (int i = 0; i < s; ++i) {
            if (law(i) != 0.0) expected.noalias() += law(i) * cc_norm[static_cast<std::size_t>(i)];
        }
        stats.cov_error_hs.push_back((expected - eye).norm());
        law = p.transpose() * law;
    }
    return stats;
}

OuGeneratorCheck ou_generator_check(const Matrix& a, const Matrix& bbt, long samples,
                                    std::uint64_t seed) {
    if (samples < 2) throw DomainError("ou_generator_check: need at least 2 samples");
    if (linalg::asymmetry(bbt) > 1e-10 * (1.0 + linalg::hs_norm(bbt))) {
        throw NotPsdError("ou_generator_check: BB^T is not symmetric");
    }
    if (linalg::min_symmetric_eigenvalue(bbt) < -1e-12 * (1.0 + linalg::hs_norm(bbt))) {
        throw NotPsdError("ou_generator_check: BB^T is not positive semidefinite");
    }
    const Matrix sigma = linalg::solve_lyapunov(a, bbt);  // checks Hurwitz + dims
    const Matrix sqrt_sigma = linalg::sqrt_psd(sigma);    // checks PSD
    const int d = static_cast<int>(a.rows());

    // Symmetric basis: E_ii, then E_ij + E_ji for i < j.
    std::vector<Matrix> basis;
    for (int i = 0; i < d; ++i) {
        Matrix q = Matrix::Zero(d, d);
        q(i, i) = 1.0;
        basis.push_back(q);
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            Matrix q = Matrix::Zero(d, d);
            q(i, j) = q(j, i) = 1.0;
            basis.push_back(q);
        }
    }

    // For f(x) = x^T Q x the generator is 2 x^T Q A x + Tr(Q BB^T).
    std::vector<Matrix> qa;
    std::vector<double> trace_term;
    for (const Matrix& q : basis) {
        qa.push_back(2.0 * q * a);
        trace_term.push_back((q * bbt).trace());
    }

    const std::size_t nb = basis.size();
    std::vector<double> sum(nb, 0.0), sumsq(nb, 0.0);
    Rng rng(seed, {0x6f75u});
    Vector z(d);
    for (long t = 0; t < samples; ++t) {
        for (int i = 0; i < d; ++i) z(i) = rng.next_normal();
        const Vector x = sqrt_sigma * z;
        for (std::size_t b = 0; b < nb; ++b) {
            const double g = x.dot(qa[b] * x) + trace_term[b];
            sum[b] += g;
            sumsq[b] += g * g;
        }
    }

    OuGeneratorCheck out;
    out.estimates.resize(nb);
    out.stderrs.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const double mean = sum[b] / static_cast<double>(samples);
        const double var =
            std::max(0.0, (sumsq[b] - static_cast<double>(samples) * mean * mean) /
                              static_cast<double>(samples - 1));
        const double se = std::sqrt(var / static_cast<double>(samples));
        out.estimates[b] = mean;
        out.stderrs[b] = se;
        const double standardized =
            se > 0.0 ? std::abs(mean) / se : (std::abs(mean) < 1e-12 ? 0.0 : HUGE_VAL);
        out.max_abs_standardized = std::max(out.max_abs_standardized, standardized);
    }
    return out;
}

}  // namespace clt::stein
