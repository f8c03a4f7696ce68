#pragma once

#include <cstdint>
#include <vector>

#include "clt/linalg.hpp"
#include "clt/markov.hpp"
#include "clt/rng.hpp"
#include "clt/stats.hpp"

namespace clt::td {

/// TD learning as the jump-linear recursion
///   theta_{k+1} = theta_k - eps_k (A(X_k) theta_k + b(X_k)),
/// with eps_k = 1/(k+1)^delta. Construction computes pi, the stationary means
/// A_bar and b_bar, and theta* = -A_bar^{-1} b_bar, and rejects models whose
/// -A_bar is not Hurwitz.
class TDModel {
public:
    TDModel(markov::FiniteMarkovChain chain, std::vector<Matrix> a_map,
            std::vector<Vector> b_map, double delta);

    const markov::FiniteMarkovChain& chain() const { return chain_; }
    const std::vector<Matrix>& a_map() const { return a_map_; }
    const std::vector<Vector>& b_map() const { return b_map_; }
    double delta() const { return delta_; }
    int dim() const { return dim_; }

    const Vector& pi() const { return pi_; }
    const Matrix& a_bar() const { return a_bar_; }
    const Vector& b_bar() const { return b_bar_; }
    const Vector& theta_star() const { return theta_star_; }

private:
    markov::FiniteMarkovChain chain_;
    std::vector<Matrix> a_map_;
    std::vector<Vector> b_map_;
    double delta_;
    int dim_;
    Vector pi_;
    Matrix a_bar_;
    Vector b_bar_;
    Vector theta_star_;
};

/// Limit objects of the averaged-iterate CLT: reference covariance
/// limit_cov = A_bar^{-1} Sigma_inf A_bar^{-T} with Sigma_inf the asymptotic
/// covariance of the reward r(x) = A(x) theta* + b(x).
struct TDTarget {
    Matrix a_bar;
    Vector b_bar;
    Vector theta_star;
    Matrix sigma_inf;
    Matrix limit_cov;
    bool sigma_positive_definite = false;
};

struct TDTrajectory {
    std::vector<Vector> theta;      // theta_0 .. theta_n
    std::vector<Vector> theta_bar;  // theta_bar[k] = mean of theta_1..theta_k (k >= 1)
    std::vector<int> states;
    Vector scaled_error;  // sqrt(n) (theta_bar_n - theta*)
};

/// eps_k = 1/(k+1)^delta, delta in (0.5, 1).
double step_size(long k, double delta);

TDTarget mean_dynamics(const TDModel& model);

TDTrajectory simulate_td(const TDModel& model, long n, const Vector& theta0, int start,
                         Rng rng);

/// Streaming endpoint of the same recursion (no trajectory storage); used by
/// ensemble experiments. Produces exactly the final state of simulate_td.
struct TDEndpoint {
    Vector theta_n;
    Vector theta_bar_n;
};
TDEndpoint run_td_endpoint(const TDModel& model, long n, const Vector& theta0, int start,
                           Rng rng);

/// ||theta_k - theta*||^2 read at the requested k values along a single run.
std::vector<double> td_delta_sq_along_run(const TDModel& model,
                                          const std::vector<long>& k_grid,
                                          const Vector& theta0, int start, Rng rng);

/// Upsilon_j^n = eps_j sum_{k=j+1}^{n} prod_{l=j+1}^{k-1} (I - eps_l A_bar) - A_bar^{-1}
Matrix upsilon(long j, long n, double delta, const Matrix& a_bar);

/// Phi_j^n = eps_j sum_{k=j}^{n-1} prod_{l=j}^{k-1} (I - eps_l A_bar) - A_bar^{-1}
Matrix phi(long j, long n, double delta, const Matrix& a_bar);

/// Closed form for Upsilon_{j+1}^n - Upsilon_j^n:
///   eps_{j+1} (Upsilon_{j+1}^n + A_bar^{-1}) A_bar - eps_{j+1} I
///   + ((eps_{j+1} - eps_j)/eps_j) (Upsilon_j^n + A_bar^{-1})
Matrix upsilon_difference(long j, long n, double delta, const Matrix& a_bar);

/// Averaged squared operator norms (1/t) sum_{j<t} ||Upsilon_j^t||_op^2 over a
/// t-grid, with the fitted log-log slope and the per-t sup of ||Upsilon_j^t||_op.
/// Each fixed t costs O(t) via the suffix recursion T_j = I + (I - eps_{j+1} A) T_{j+1}.
struct UpsilonDecay {
    stats::RateReport report;
    std::vector<double> sup_norms;
};
UpsilonDecay upsilon_decay_curve(const std::vector<long>& t_grid, double delta,
                                 const Matrix& a_bar);

/// Ensemble estimate of E||Delta_k||^2 on a k-grid (one long run per
/// replicate, read at the grid points), with standard errors and fitted slope.
stats::RateReport delta_moment_curve(const TDModel& model, const std::vector<long>& k_grid,
                                     int replicates, std::uint64_t seed, int threads = 1,
                                     const Vector* theta0 = nullptr, int start = 0);

}  // namespace clt::td
