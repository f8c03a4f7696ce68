#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clt/linalg.hpp"
#include "clt/rng.hpp"

namespace clt::markov {

/// Row-stochastic transition matrix over a finite state space, plus optional
/// state labels. Construction validates non-negativity and row sums (1e-12).
class FiniteMarkovChain {
public:
    explicit FiniteMarkovChain(Matrix p, std::vector<std::string> labels = {});

    int num_states() const { return static_cast<int>(p_.rows()); }
    const Matrix& transition() const { return p_; }
    const std::vector<std::string>& labels() const { return labels_; }

    bool is_irreducible() const;
    bool is_aperiodic() const;

    /// Throws StructureError unless irreducible (and aperiodic when required).
    void require_ergodic(bool need_aperiodic) const;

private:
    Matrix p_;
    std::vector<std::string> labels_;
};

/// Per-state reward, either a d-vector or a d x d matrix per state. Matrix
/// rewards are flattened row-major to d^2-vectors; the Poisson operator acts
/// entrywise so the flat representation is exact.
struct RewardMap {
    Matrix flat;  // one row per state, m = rows*cols entries
    int rows = 0;
    int cols = 1;  // 1 for vector rewards

    static RewardMap from_vectors(const std::vector<Vector>& per_state);
    static RewardMap from_matrices(const std::vector<Matrix>& per_state);

    bool is_matrix_valued() const { return cols > 1; }
    int dim() const { return static_cast<int>(flat.cols()); }
};

/// Solution of the Poisson equation r_bar = r(x) + (PV)(x) - V(x), centered
/// so that the pi-weighted mean of V is zero. pv caches P*V.
struct PoissonSolution {
    Matrix v;      // one row per state (flattened if matrix-valued)
    Matrix pv;     // P * v
    Vector r_bar;  // stationary mean reward (flattened)
    Vector pi;
    int rows = 0;
    int cols = 1;
    double residual = 0.0;  // max-abs residual of the Poisson equation

    Vector value(int state) const { return v.row(state); }
    Matrix value_matrix(int state) const;
    Vector predicted(int state) const { return pv.row(state); }

    /// max over states of ||V(x)||; finite chains satisfy the boundedness
    /// assumption automatically, so this is reported rather than assumed.
    double max_value_norm() const;
};

/// Fitted uniform-ergodicity envelope tv_curve[n] <= k1 * rho^n, where
/// tv_curve[n] is the worst-case total-variation distance to pi after n steps.
struct MixingReport {
    double rho = 0.0;
    double k1 = 0.0;
    std::vector<double> tv_curve;  // index 0 = initial (one-point) distance
};

struct AsymptoticCovariance {
    Matrix sigma;
    bool positive_definite = false;
    double min_eigenvalue = 0.0;
};

/// Stationary distribution of an irreducible chain: pi^T P = pi^T, sum 1.
Vector stationary(const FiniteMarkovChain& chain);

/// Worst-case TV mixing curve over `horizon` steps plus a fitted (k1, rho)
/// envelope; requires irreducible and aperiodic.
MixingReport mixing_report(const FiniteMarkovChain& chain, int horizon);

/// Exact Poisson solve via the fundamental matrix (I - P + 1 pi^T).
PoissonSolution solve_poisson(const FiniteMarkovChain& chain, const RewardMap& reward);

/// Sigma_inf = sum_{i,j} pi_i P_ij (V(j) - (PV)(i)) (V(j) - (PV)(i))^T.
/// Requires a vector-valued solution. Non-PD results are flagged, not thrown.
AsymptoticCovariance asymptotic_covariance(const FiniteMarkovChain& chain,
                                           const PoissonSolution& sol);

/// Sigma(i) = sum_j P_ij (V(j) - (PV)(i)) (V(j) - (PV)(i))^T for one state.
Matrix conditional_covariance(const FiniteMarkovChain& chain, const PoissonSolution& sol,
                              int state);

/// Simulates n steps from a fixed start state; path has n+1 entries.
std::vector<int> simulate_chain(const FiniteMarkovChain& chain, long n, int start, Rng rng);

/// Same, with the start state drawn from `start_distribution`.
std::vector<int> simulate_chain(const FiniteMarkovChain& chain, long n,
                                const Vector& start_distribution, Rng rng);

/// Martingale increments m_k = V(path[k]) - (PV)(path[k-1]), k = 1..n,
/// returned as one row per k.
Matrix martingale_increments(const FiniteMarkovChain& chain, const PoissonSolution& sol,
                             const std::vector<int>& path);

/// One inverse-CDF transition step; exposed for streaming simulations.
int step_state(const Matrix& p, int from, double u);

}  // namespace clt::markov
