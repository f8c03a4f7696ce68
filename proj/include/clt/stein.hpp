#pragma once

#include <cstdint>
#include <vector>

#include "clt/linalg.hpp"
#include "clt/markov.hpp"

namespace clt::stein {

/// Regularity constants of the solution to Stein's equation for Lip_1 test
/// functions, at smoothness exponent beta in (0, 1). c_universal is the
/// unspecified universal constant of the Hessian inner-product bound; it
/// scales the covariance-error term linearly and is reported with every bound.
struct SteinConstants {
    int d = 0;
    double beta = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c1_tilde = 0.0;
    double c2_tilde = 0.0;
    double c_universal = 1.0;
};

SteinConstants stein_constants(int d, double beta, double c_universal = 1.0);

/// beta = 1 - 2 / log n; requires log n > 2, i.e. n >= 8.
double beta_schedule(long n);

/// Per-step summaries of a normalized martingale difference sequence:
///   moment_2beta[k-1] = E ||Sigma^{-1/2} m_k||^(2+beta)
///   moment_beta[k-1]  = E ||Sigma^{-1/2} m_k||^beta
///   cov_error_hs[k-1] = || Sigma^{-1/2} E(Sigma_k) Sigma^{-1/2} - I ||_HS
struct MartingaleStats {
    long n = 0;
    std::vector<double> moment_2beta;
    std::vector<double> moment_beta;
    std::vector<double> cov_error_hs;
    double sigma_sqrt_opnorm = 0.0;
};

/// Non-asymptotic martingale CLT bound on d_W(W_n, Sigma^{1/2} Z):
///   (1/sqrt(n)) * sum_k [ (C1~ * moment_2beta[k] + C2~ * moment_beta[k])
///                           * ||Sigma^{1/2}||_op / (n-k+1)^((1+beta)/2)
///                         + C * sqrt(d) * ||Sigma^{1/2}||_op * cov_error_hs[k] ]
/// The trace term is always replaced by its operator-norm majorant; the exact
/// Hessian-expectation matrix is never formed.
double martingale_clt_bound(const MartingaleStats& stats, const SteinConstants& constants);

/// Exact per-step stats for the Poisson-derived martingale of a finite chain,
/// computed by evolving the state distribution (no simulation): expectations
/// at step k use the law of X_{k-1} started from `initial_distribution`.
MartingaleStats chain_martingale_stats(const markov::FiniteMarkovChain& chain,
                                       const markov::PoissonSolution& sol,
                                       const Matrix& sigma_inf, long n, double beta,
                                       const Vector& initial_distribution);

/// Monte Carlo check that the O-U generator vanishes in expectation at the
/// Lyapunov-equation stationary law, over the quadratic test family
/// f(x) = x^T Q x with Q ranging over the symmetric basis {E_ii, E_ij+E_ji}.
struct OuGeneratorCheck {
    std::vector<double> estimates;
    std::vector<double> stderrs;
    double max_abs_standardized = 0.0;  // max_Q |estimate| / stderr
};

OuGeneratorCheck ou_generator_check(const Matrix& a, const Matrix& bbt, long samples,
                                    std::uint64_t seed);

}  // namespace clt::stein
