#include "clt/td.hpp"

#include <cmath>
#include <string>

#include "clt/parallel.hpp"

namespace clt::td {

namespace {

void require_delta(double delta) {
    if (!(delta > 0.5 && delta < 1.0)) {
        throw DomainError("step exponent delta = " + std::to_string(delta) +
                          " outside (0.5, 1)");
    }
}

void require_index_order(long j, long n, const char* who) {
    if (j < 0 || j >= n) {
        throw DomainError(std::string(who) + ": need 0 <= j < n, got j = " +
                          std::to_string(j) + ", n = " + std::to_string(n));
    }
}

}  // namespace

TDModel::TDModel(markov::FiniteMarkovChain chain, std::vector<Matrix> a_map,
                 std::vector<Vector> b_map, double delta)
    : chain_(std::move(chain)),
      a_map_(std::move(a_map)),
      b_map_(std::move(b_map)),
      delta_(delta) {
    require_delta(delta_);
    const int s = chain_.num_states();
    if (static_cast<int>(a_map_.size()) != s || static_cast<int>(b_map_.size()) != s) {
        throw DimensionError("td model: A and b must cover all " + std::to_string(s) +
                             " states");
    }
    dim_ = static_cast<int>(a_map_.front().rows());
    for (int i = 0; i < s; ++i) {
        if (a_map_[static_cast<std::size_t>(i)].rows() != dim_ ||
            a_map_[static_cast<std::size_t>(i)].cols() != dim_ ||
            b_map_[static_cast<std::size_t>(i)].size() != dim_) {
            throw DimensionError("td model: state " + std::to_string(i) +
                                 " has inconsistent dimensions");
        }
    }

    pi_ = markov::stationary(chain_);
    a_bar_ = Matrix::Zero(dim_, dim_);
    b_bar_ = Vector::Zero(dim_);
    for (int i = 0; i < s; ++i) {
        a_bar_ += pi_(i) * a_map_[static_cast<std::size_t>(i)];
        b_bar_ += pi_(i) * b_map_[static_cast<std::size_t>(i)];
    }
    if (!linalg::is_hurwitz(-a_bar_)) {
        throw StabilityError("td model: -A_bar is not Hurwitz");
    }
    theta_star_ = a_bar_.partialPivLu().solve(-b_bar_);
}

double step_size(long k, double delta) {
    require_delta(delta);
    if (k < 0) throw DomainError("step_size: k must be >= 0");
    return std::pow(static_cast<double>(k + 1), -delta);
}

TDTarget mean_dynamics(const TDModel& model) {
    TDTarget target;
    target.a_bar = model.a_bar();
    target.b_bar = model.b_bar();
    target.theta_star = model.theta_star();

    // Reward of the averaged-iterate CLT: r(x) = A(x) theta* + b(x).
    std::vector<Vector> reward;
    reward.reserve(model.a_map().size());
    for (std::size_t i = 0; i < model.a_map().size(); ++i) {
        reward.push_back(model.a_map()[i] * model.theta_star() + model.b_map()[i]);
    }
    const auto sol = markov::solve_poisson(model.chain(), markov::RewardMap::from_vectors(reward));
    const auto cov = markov::asymptotic_covariance(model.chain(), sol);
    target.sigma_inf = cov.sigma;
    target.sigma_positive_definite = cov.positive_definite;

    const auto lu = model.a_bar().partialPivLu();
    const Matrix inv_sigma = lu.solve(cov.sigma);  // A_bar^{-1} Sigma
    target.limit_cov = lu.solve(inv_sigma.transpose()).transpose();
    target.limit_cov = 0.5 * (target.limit_cov + target.limit_cov.transpose()).eval();
    return target;
}

TDTrajectory simulate_td(const TDModel& model, long n, const Vector& theta0, int start,
                         Rng rng) {
    if (theta0.size() != model.dim()) {
        throw DimensionError("simulate_td: theta0 has dimension " +
                             std::to_string(theta0.size()) + ", model is " +
                             std::to_string(model.dim()));
    }
    TDTrajectory traj;
    traj.states = markov::simulate_chain(model.chain(), n, start, rng);
    traj.theta.reserve(static_cast<std::size_t>(n) + 1);
    traj.theta_bar.reserve(static_cast<std::size_t>(n) + 1);
    traj.theta.push_back(theta0);
    traj.theta_bar.push_back(theta0);  // placeholder; averages start at k = 1

    Vector theta = theta0;
    Vector mean = Vector::Zero(model.dim());
    for (long k = 0; k < n; ++k) {
        const int x = traj.states[static_cast<std::size_t>(k)];
        const double eps = step_size(k, model.delta());
        theta -= eps * (model.a_map()[static_cast<std::size_t>(x)] * theta +
                        model.b_map()[static_cast<std::size_t>(x)]);
        mean += (theta - mean) / static_cast<double>(k + 1);
        traj.theta.push_back(theta);
        traj.theta_bar.push_back(mean);
    }
    traj.scaled_error = n > 0
                            ? (std::sqrt(static_cast<double>(n)) *
                               (traj.theta_bar.back() - model.theta_star()))
                                  .eval()
                            : Vector::Zero(model.dim());
    return traj;
}

TDEndpoint run_td_endpoint(const TDModel& model, long n, const Vector& theta0, int start,
                           Rng rng) {
    if (theta0.size() != model.dim()) {
        throw DimensionError("run_td_endpoint: theta0 dimension mismatch");
    }
    Vector theta = theta0;
    Vector mean = Vector::Zero(model.dim());
    int x = start;
    const Matrix& p = model.chain().transition();
    for (long k = 0; k < n; ++k) {
        const double eps = step_size(k, model.delta());
        theta -= eps * (model.a_map()[static_cast<std::size_t>(x)] * theta +
                        model.b_map()[static_cast<std::size_t>(x)]);
        mean += (theta - mean) / static_cast<double>(k + 1);
        x = markov::step_state(p, x, rng.next_double());
    }
    return TDEndpoint{theta, mean};
}

std::vector<double> td_delta_sq_along_run(const TDModel& model,
                                          const std::vector<long>& k_grid,
                                          const Vector& theta0, int start, Rng rng) {
    std::vector<double> out(k_grid.size(), 0.0);
    if (k_grid.empty()) return out;
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (k_grid[i] < 0 || (i > 0 && k_grid[i] <= k_grid[i - 1])) {
            throw DomainError("td_delta_sq_along_run: k grid must be strictly increasing");
        }
    }

    Vector theta = theta0;
    int x = start;
    const Matrix& p = model.chain().transition();
    std::size_t next = 0;
    const long horizon = k_grid.back();
    for (long k = 0; k <= horizon; ++k) {
        if (next < k_grid.size() && k == k_grid[next]) {
            out[next] = (theta - model.theta_star()).squaredNorm();
            ++next;
        }
        if (k == horizon) break;
        const double eps = step_size(k, model.delta());
        theta -= eps * (model.a_map()[static_cast<std::size_t>(x)] * theta +
                        model.b_map()[static_cast<std::size_t>(x)]);
        x = markov::step_state(p, x, rng.next_double());
    }
    return out;
}

namespace {

// Shared state for the partial-product sums: both Upsilon and Phi are
// eps_j * (sum of left-to-right products) - A_bar^{-1}.
Matrix inverse_of(const Matrix& a_bar) {
    return a_bar.partialPivLu().solve(Matrix::Identity(a_bar.rows(), a_bar.cols()));
}

}  // namespace

Matrix upsilon(long j, long n, double delta, const Matrix& a_bar) {
    require_index_order(j, n, "upsilon");
    require_delta(delta);
    const Eigen::Index d = a_bar.rows();
    const Matrix eye = Matrix::Identity(d, d);

    Matrix prod = eye;  // empty product for k = j+1
    Matrix sum = eye;
    for (long k = j + 2; k <= n; ++k) {
        prod = (prod * (eye - step_size(k - 1, delta) * a_bar)).eval();
        sum += prod;
    }
    return step_size(j, delta) * sum - inverse_of(a_bar);
}

Matrix phi(long j, long n, double delta, const Matrix& a_bar) {
    require_index_order(j, n, "phi");
    require_delta(delta);
    const Eigen::Index d = a_bar.rows();
    const Matrix eye = Matrix::Identity(d, d);

    Matrix prod = eye;  // empty product for k = j
    Matrix sum = eye;
    for (long k = j + 1; k <= n - 1; ++k) {
        prod = (prod * (eye - step_size(k - 1, delta) * a_bar)).eval();
        sum += prod;
    }
    return step_size(j, delta) * sum - inverse_of(a_bar);
}

Matrix upsilon_difference(long j, long n, double delta, const Matrix& a_bar) {
    if (j < 0 || j + 1 >= n) {
        throw DomainError("upsilon_difference: need 0 <= j < j+1 < n");
    }
    const Matrix inv = inverse_of(a_bar);
    const Matrix u_j = upsilon(j, n, delta, a_bar);
    const Matrix u_j1 = upsilon(j + 1, n, delta, a_bar);
    const double eps_j = step_size(j, delta);
    const double eps_j1 = step_size(j + 1, delta);
    const Eigen::Index d = a_bar.rows();

    return eps_j1 * (u_j1 + inv) * a_bar - eps_j1 * Matrix::Identity(d, d) +
           ((eps_j1 - eps_j) / eps_j) * (u_j + inv);
}

UpsilonDecay upsilon_decay_curve(const std::vector<long>& t_grid, double delta,
                                 const Matrix& a_bar) {
    require_delta(delta);
    if (t_grid.size() < 1) throw DomainError("upsilon_decay_curve: empty grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 1 || (i > 0 && t_grid[i] <= t_grid[i - 1])) {
            throw DomainError("upsilon_decay_curve: t grid must be strictly increasing, >= 1");
        }
    }

    const Eigen::Index d = a_bar.rows();
    const Matrix eye = Matrix::Identity(d, d);
    const Matrix inv = inverse_of(a_bar);

    UpsilonDecay out;
    for (long t : t_grid) {
        // Suffix recursion (fixed t): T_{t-1} = I and
        // T_j = I + (I - eps_{j+1} A_bar) T_{j+1}; Upsilon_j^t = eps_j T_j - A_bar^{-1}.
        Matrix tail = eye;
        double sum_sq = 0.0;
        double sup = 0.0;
        for (long j = t - 1; j >= 0; --j) {
            const double norm = linalg::operator_norm(step_size(j, delta) * tail - inv);
            sum_sq += norm * norm;
            sup = std::max(sup, norm);
            if (j > 0) {
                tail = (eye + (eye - step_size(j, delta) * a_bar) * tail).eval();
            }
        }
        out.report.grid.push_back(static_cast<double>(t));
        out.report.values.push_back(sum_sq / static_cast<double>(t));
        out.report.stderrs.push_back(0.0);  // deterministic quantity
        out.sup_norms.push_back(sup);
    }
    if (out.report.grid.size() >= 2) {
        const auto fit = stats::fit_rate(out.report.grid, out.report.values);
        out.report.slope = fit.slope;
        out.report.intercept = fit.intercept;
    }
    return out;
}

stats::RateReport delta_moment_curve(const TDModel& model, const std::vector<long>& k_grid,
                                     int replicates, std::uint64_t seed, int threads,
                                     const Vector* theta0, int start) {
    if (replicates < 2) throw DomainError("delta_moment_curve: need replicates >= 2");
    const Vector init = theta0 ? *theta0 : Vector::Zero(model.dim());

    std::vector<std::vector<double>> per_replicate(static_cast<std::size_t>(replicates));
    parallel_for(replicates, threads, [&](long r) {
        Rng rng(seed, {0xde17a5ULL, static_cast<std::uint64_t>(r)});
        per_replicate[static_cast<std::size_t>(r)] =
            td_delta_sq_along_run(model, k_grid, init, start, rng);
    });

    stats::RateReport report;
    for (std::size_t g = 0; g < k_grid.size(); ++g) {
        double sum = 0.0, sumsq = 0.0;
        for (int r = 0; r < replicates; ++r) {
            const double v = per_replicate[static_cast<std::size_t>(r)][g];
            sum += v;
            sumsq += v * v;
        }
        const double mean = sum / replicates;
        const double var = std::max(0.0, (sumsq - replicates * mean * mean) / (replicates - 1));
        report.grid.push_back(static_cast<double>(k_grid[g]));
        report.values.push_back(mean);
        report.stderrs.push_back(std::sqrt(var / replicates));
    }
    // k = 0 may sit on the grid with Delta_0 = 0; fit over positive entries.
    std::vector<double> fit_grid, fit_values;
    for (std::size_t g = 0; g < report.values.size(); ++g) {
        if (report.values[g] > 0.0 && report.grid[g] > 0.0) {
            fit_grid.push_back(report.grid[g]);
            fit_values.push_back(report.values[g]);
        }
    }
    if (fit_grid.size() >= 2) {
        const auto fit = stats::fit_rate(fit_grid, fit_values);
        report.slope = fit.slope;
        report.intercept = fit.intercept;
    }
    return report;
}

}  // namespace clt::td
