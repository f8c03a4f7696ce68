#include "clt/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace clt::markov {

namespace {

constexpr double kRowSumTol = 1e-12;

// Forward/backward reachability from state 0 on the support digraph.
std::vector<bool> reachable(const Matrix& p, bool transpose) {
    const int s = static_cast<int>(p.rows());
    std::vector<bool> seen(s, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < s; ++v) {
            const double w = transpose ? p(v, u) : p(u, v);
            if (w > 0.0 && !seen[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

}  // namespace

FiniteMarkovChain::FiniteMarkovChain(Matrix p, std::vector<std::string> labels)
    : p_(std::move(p)), labels_(std::move(labels)) {
    if (p_.rows() < 1 || p_.rows() != p_.cols()) {
        throw DimensionError("chain: transition matrix must be square with S >= 1, got " +
                             std::to_string(p_.rows()) + "x" + std::to_string(p_.cols()));
    }
    for (Eigen::Index i = 0; i < p_.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < p_.cols(); ++j) {
            const double v = p_(i, j);
            if (!std::isfinite(v) || v < 0.0) {
                throw ValidationError("chain: P[" + std::to_string(i) + "][" +
                                      std::to_string(j) + "] = " + std::to_string(v) +
                                      " is not a probability");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTol) {
            throw ValidationError("chain: row " + std::to_string(i) + " sums to " +
                                  std::to_string(sum) + ", expected 1");
        }
    }
    if (!labels_.empty() && static_cast<int>(labels_.size()) != num_states()) {
        throw ValidationError("chain: " + std::to_string(labels_.size()) + " labels for " +
                              std::to_string(num_states()) + " states");
    }
}

bool FiniteMarkovChain::is_irreducible() const {
    const auto fwd = reachable(p_, false);
    const auto bwd = reachable(p_, true);
    for (int i = 0; i < num_states(); ++i) {
        if (!fwd[i] || !bwd[i]) return false;
    }
    return true;
}

bool FiniteMarkovChain::is_aperiodic() const {
    // Period of a strongly connected digraph: gcd over edges (u,v) of
    // d(u) + 1 - d(v), with d = BFS levels from state 0.
    const int s = num_states();
    std::vector<int> dist(s, -1);
    std::vector<int> queue{0};
    dist[0] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        for (int v = 0; v < s; ++v) {
            if (p_(u, v) > 0.0 && dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    long g = 0;
    for (int u = 0; u < s; ++u) {
        if (dist[u] < 0) continue;
        for (int v = 0; v < s; ++v) {
            if (p_(u, v) > 0.0 && dist[v] >= 0) {
                g = std::gcd(g, static_cast<long>(dist[u] + 1 - dist[v]));
            }
        }
    }
    return g == 1;
}

void FiniteMarkovChain::require_ergodic(bool need_aperiodic) const {
    if (!is_irreducible()) {
        throw StructureError("chain is reducible: not every state communicates with state 0");
    }
    if (need_aperiodic && !is_aperiodic()) {
        throw StructureError("chain is periodic");
    }
}

RewardMap RewardMap::from_vectors(const std::vector<Vector>& per_state) {
    if (per_state.empty()) throw ValidationError("reward: no states");
    const Eigen::Index d = per_state.front().size();
    if (d < 1) throw ValidationError("reward: empty vector for state 0");
    RewardMap r;
    r.rows = static_cast<int>(d);
    r.cols = 1;
    r.flat.resize(static_cast<Eigen::Index>(per_state.size()), d);
    for (std::size_t i = 0; i < per_state.size(); ++i) {
        if (per_state[i].size() != d) {
            throw DimensionError("reward: state " + std::to_string(i) + " has dimension " +
                                 std::to_string(per_state[i].size()) + ", expected " +
                                 std::to_string(d));
        }
        r.flat.row(static_cast<Eigen::Index>(i)) = per_state[i];
    }
    return r;
}

RewardMap RewardMap::from_matrices(const std::vector<Matrix>& per_state) {
    if (per_state.empty()) throw ValidationError("reward: no states");
    const Eigen::Index rows = per_state.front().rows();
    const Eigen::Index cols = per_state.front().cols();
    RewardMap r;
    r.rows = static_cast<int>(rows);
    r.cols = static_cast<int>(cols);
    r.flat.resize(static_cast<Eigen::Index>(per_state.size()), rows * cols);
    for (std::size_t i = 0; i < per_state.size(); ++i) {
        const Matrix& m = per_state[i];
        if (m.rows() != rows || m.cols() != cols) {
            throw DimensionError("reward: state " + std::to_string(i) + " matrix is " +
                                 std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
        }
        for (Eigen::Index a = 0; a < rows; ++a) {
            for (Eigen::Index b = 0; b < cols; ++b) {
                r.flat(static_cast<Eigen::Index>(i), a * cols + b) = m(a, b);
            }
        }
    }
    return r;
}

Matrix PoissonSolution::value_matrix(int state) const {
    Matrix m(rows, cols);
    for (int a = 0; a < rows; ++a) {
        for (int b = 0; b < cols; ++b) {
            m(a, b) = v(state, static_cast<Eigen::Index>(a) * cols + b);
        }
    }
    return m;
}

double PoissonSolution::max_value_norm() const {
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        best = std::max(best, v.row(i).norm());
    }
    return best;
}

Vector stationary(const FiniteMarkovChain& chain) {
    chain.require_ergodic(/*need_aperiodic=*/false);
    const Matrix& p = chain.transition();
    const int s = chain.num_states();

    // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    Matrix m = p.transpose() - Matrix::Identity(s, s);
    m.row(s - 1).setOnes();
    Vector rhs = Vector::Zero(s);
    rhs(s - 1) = 1.0;
    Vector pi = m.fullPivLu().solve(rhs);

    // A few power-iteration refinements squeeze the residual to ~machine eps.
    auto residual = [&](const Vector& x) { return (p.transpose() * x - x).cwiseAbs().maxCoeff(); };
    for (int it = 0; it < 8; ++it) {
        Vector next = p.transpose() * pi;
        next /= next.sum();
        if (residual(next) < residual(pi)) {
            pi = next;
        } else {
            break;
        }
    }
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();
    return pi;
}

MixingReport mixing_report(const FiniteMarkovChain& chain, int horizon) {
    chain.require_ergodic(/*need_aperiodic=*/true);
    if (horizon < 1) throw DomainError("mixing_report: horizon must be >= 1");

    const Vector pi = stationary(chain);
    const int s = chain.num_states();
    MixingReport report;
    report.tv_curve.reserve(static_cast<std::size_t>(horizon) + 1);

    Matrix pn = Matrix::Identity(s, s);
    for (int n = 0; n <= horizon; ++n) {
        double worst = 0.0;
        for (int x = 0; x < s; ++x) {
            worst = std::max(worst, 0.5 * (pn.row(x).transpose() - pi).cwiseAbs().sum());
        }
        report.tv_curve.push_back(worst);
        if (n < horizon) pn = pn * chain.transition();
    }

    // Envelope with prefactor pinned to the measured initial distance; rho is
    // then the smallest rate that keeps tv_curve[n] <= k1 * rho^n everywhere.
    report.k1 = report.tv_curve[0];
    double rho = 0.0;
    if (report.k1 > 0.0) {
        for (int n = 1; n <= horizon; ++n) {
            const double tv = report.tv_curve[static_cast<std::size_t>(n)];
            if (tv > 0.0) {
                rho = std::max(rho, std::pow(tv / report.k1, 1.0 / n));
            }
        }
    }
    report.rho = rho;
    return report;
}

PoissonSolution solve_poisson(const FiniteMarkovChain& chain, const RewardMap& reward) {
    chain.require_ergodic(/*need_aperiodic=*/true);
    const int s = chain.num_states();
    if (reward.flat.rows() != s) {
        throw DimensionError("reward covers " + std::to_string(reward.flat.rows()) +
                             " states, chain has " + std::to_string(s));
    }

    const Matrix& p = chain.transition();
    const Vector pi = stationary(chain);
    const Vector r_bar = reward.flat.transpose() * pi;

    // Fundamental-matrix route: (I - P + 1 pi^T) V = r - 1 r_bar^T, solved
    // column-by-column, then re-centered so pi^T V = 0.
    const Matrix z = Matrix::Identity(s, s) - p + Vector::Ones(s) * pi.transpose();
    const Matrix rhs = reward.flat - Vector::Ones(s) * r_bar.transpose();
    Matrix v = z.partialPivLu().solve(rhs);
    v -= Vector::Ones(s) * (pi.transpose() * v);

    PoissonSolution sol;
    sol.v = v;
    sol.pv = p * v;
    sol.r_bar = r_bar;
    sol.pi = pi;
    sol.rows = reward.rows;
    sol.cols = reward.cols;
    sol.residual = (sol.v - sol.pv - rhs).cwiseAbs().maxCoeff();
    if (sol.residual > 1e-10) {
        throw NumericalError("poisson solve residual " + std::to_string(sol.residual) +
                             " exceeds 1e-10");
    }
    return sol;
}

AsymptoticCovariance asymptotic_covariance(const FiniteMarkovChain& chain,
                                           const PoissonSolution& sol) {
    if (sol.cols != 1) {
        throw DimensionError("asymptotic_covariance expects a vector-valued solution");
    }
    const int s = chain.num_states();
    const int d = sol.rows;
    const Matrix& p = chain.transition();

    Matrix sigma = Matrix::Zero(d, d);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            if (p(i, j) == 0.0) continue;
            const Vector inc = sol.v.row(j) - sol.pv.row(i);
            sigma.noalias() += sol.pi(i) * p(i, j) * inc * inc.transpose();
        }
    }
    sigma = 0.5 * (sigma + sigma.transpose()).eval();

    AsymptoticCovariance out;
    out.sigma = sigma;
    out.min_eigenvalue = linalg::min_symmetric_eigenvalue(sigma);
    const double threshold = 1e-10 * std::max(sigma.trace(), 0.0) / d;
    out.positive_definite = out.min_eigenvalue > threshold;
    return out;
}

Matrix conditional_covariance(const FiniteMarkovChain& chain, const PoissonSolution& sol,
                              int state) {
    if (state < 0 || state >= chain.num_states()) {
        throw DomainError("conditional_covariance: state " + std::to_string(state) +
                          " out of range");
    }
    const int d = static_cast<int>(sol.v.cols());
    const Matrix& p = chain.transition();
    Matrix sigma = Matrix::Zero(d, d);
    for (int j = 0; j < chain.num_states(); ++j) {
        if (p(state, j) == 0.0) continue;
        const Vector inc = sol.v.row(j) - sol.pv.row(state);
        sigma.noalias() += p(state, j) * inc * inc.transpose();
    }
    return 0.5 * (sigma + sigma.transpose()).eval();
}

int step_state(const Matrix& p, int from, double u) {
    const Eigen::Index s = p.cols();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < s; ++j) {
        acc += p(from, j);
        if (u < acc) return static_cast<int>(j);
    }
    return static_cast<int>(s - 1);  // u landed in row-sum rounding slack
}

std::vector<int> simulate_chain(const FiniteMarkovChain& chain, long n, int start, Rng rng) {
    if (start < 0 || start >= chain.num_states()) {
        throw DomainError("simulate_chain: start state " + std::to_string(start) +
                          " out of range");
    }
    std::vector<int> path;
    path.reserve(static_cast<std::size_t>(n) + 1);
    path.push_back(start);
    int x = start;
    for (long k = 0; k < n; ++k) {
        x = step_state(chain.transition(), x, rng.next_double());
        path.push_back(x);
    }
    return path;
}

std::vector<int> simulate_chain(const FiniteMarkovChain& chain, long n,
                                const Vector& start_distribution, Rng rng) {
    if (start_distribution.size() != chain.num_states()) {
        throw DimensionError("simulate_chain: start distribution has " +
                             std::to_string(start_distribution.size()) + " entries");
    }
    double acc = 0.0;
    const double u = rng.next_double();
    int start = chain.num_states() - 1;
    for (int i = 0; i < chain.num_states(); ++i) {
        acc += start_distribution(i);
        if (u < acc) {
            start = i;
            break;
        }
    }
    return simulate_chain(chain, n, start, rng);
}

Matrix martingale_increments(const FiniteMarkovChain& chain, const PoissonSolution& sol,
                             const std::vector<int>& path) {
    if (path.size() < 2) return Matrix(0, sol.v.cols());
    for (int x : path) {
        if (x < 0 || x >= chain.num_states()) {
            throw DomainError("martingale_increments: path state " + std::to_string(x) +
                              " out of range");
        }
    }
    const Eigen::Index n = static_cast<Eigen::Index>(path.size()) - 1;
    Matrix m(n, sol.v.cols());
    for (Eigen::Index k = 1; k <= n; ++k) {
        m.row(k - 1) = sol.v.row(path[static_cast<std::size_t>(k)]) -
                       sol.pv.row(path[static_cast<std::size_t>(k - 1)]);
    }
    return m;
}

}  // namespace clt::markov
