#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately use naive algorithms (series truncation, double loops, brute
// force) so they cannot share bugs with the library implementations.

#include <cmath>
#include <vector>

#include "clt/linalg.hpp"
#include "clt/markov.hpp"
#include "clt/rng.hpp"

namespace test_support {

using clt::Matrix;
using clt::Vector;

inline Matrix random_matrix(clt::Rng& rng, int rows, int cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.next_normal();
    }
    return m;
}

inline Matrix random_psd(clt::Rng& rng, int d, double scale = 1.0) {
    const Matrix g = random_matrix(rng, d, d, scale);
    return g * g.transpose();
}

// -(G G^T + 0.1 I) + skew is Hurwitz: the symmetric part is negative definite,
// so the numerical range (and every eigenvalue real part) stays below zero.
inline Matrix random_hurwitz(clt::Rng& rng, int d) {
    const Matrix g = random_matrix(rng, d, d);
    const Matrix h = random_matrix(rng, d, d);
    return -(g * g.transpose() + 0.1 * Matrix::Identity(d, d)) + (h - h.transpose());
}

// Random irreducible aperiodic chain: Dirichlet-ish rows with a floor that
// keeps every transition probability positive.
inline clt::markov::FiniteMarkovChain random_chain(clt::Rng& rng, int s) {
    Matrix p(s, s);
    for (int i = 0; i < s; ++i) {
        double sum = 0.0;
        for (int j = 0; j < s; ++j) {
            p(i, j) = 0.05 + rng.next_double();
            sum += p(i, j);
        }
        p.row(i) /= sum;
    }
    return clt::markov::FiniteMarkovChain(p);
}

inline clt::markov::FiniteMarkovChain two_state_chain() {
    Matrix p(2, 2);
    p << 0.8, 0.2, 0.3, 0.7;
    return clt::markov::FiniteMarkovChain(p);
}

inline clt::markov::RewardMap scalar_reward(std::initializer_list<double> values) {
    std::vector<Vector> per_state;
    for (double v : values) {
        Vector x(1);
        x(0) = v;
        per_state.push_back(x);
    }
    return clt::markov::RewardMap::from_vectors(per_state);
}

// Poisson solution by truncated series V = sum_{t=0}^{T} P^t (r - 1 r_bar^T);
// valid for vector rewards on well-mixing chains.
inline Matrix poisson_series_oracle(const clt::markov::FiniteMarkovChain& chain,
                                    const Matrix& reward_flat, int truncation) {
    const Vector pi = clt::markov::stationary(chain);
    const Vector r_bar = reward_flat.transpose() * pi;
    const Matrix centered = reward_flat - Vector::Ones(chain.num_states()) * r_bar.transpose();
    Matrix v = centered;
    Matrix term = centered;
    for (int t = 1; t <= truncation; ++t) {
        term = chain.transition() * term;
        v += term;
    }
    return v;
}

// Upsilon via the definition, naive double loop, no shared recursion.
inline Matrix upsilon_naive(long j, long n, double delta, const Matrix& a_bar) {
    const Eigen::Index d = a_bar.rows();
    const Matrix eye = Matrix::Identity(d, d);
    Matrix sum = Matrix::Zero(d, d);
    for (long k = j + 1; k <= n; ++k) {
        Matrix prod = eye;
        for (long l = j + 1; l <= k - 1; ++l) {
            prod = prod * (eye - std::pow(static_cast<double>(l + 1), -delta) * a_bar);
        }
        sum += prod;
    }
    const double eps_j = std::pow(static_cast<double>(j + 1), -delta);
    return eps_j * sum - a_bar.inverse();
}

inline Matrix phi_naive(long j, long n, double delta, const Matrix& a_bar) {
    const Eigen::Index d = a_bar.rows();
    const Matrix eye = Matrix::Identity(d, d);
    Matrix sum = Matrix::Zero(d, d);
    for (long k = j; k <= n - 1; ++k) {
        Matrix prod = eye;
        for (long l = j; l <= k - 1; ++l) {
            prod = prod * (eye - std::pow(static_cast<double>(l + 1), -delta) * a_bar);
        }
        sum += prod;
    }
    const double eps_j = std::pow(static_cast<double>(j + 1), -delta);
    return eps_j * sum - a_bar.inverse();
}

}  // namespace test_support
