// Acceptance suite: one check per release criterion, each printed as a single
// PASS/FAIL line with its runtime. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "clt/harness.hpp"
#include "clt/io.hpp"
#include "clt/linalg.hpp"
#include "clt/markov.hpp"
#include "clt/stats.hpp"
#include "clt/stein.hpp"
#include "clt/td.hpp"
#include "support.hpp"

using clt::Matrix;
using clt::Vector;
using clt::io::json;

namespace {

json two_state_chain_json() { return json::parse(R"({"P": [[0.8,0.2],[0.3,0.7]]})"); }
json scalar_reward_json() { return json::parse(R"({"r": [[1.0],[0.0]]})"); }

json td_model_json() {
    return json{{"chain", two_state_chain_json()},
                {"A", json::parse("[[[1.0]], [[3.0]]]")},
                {"b", json::parse("[[-2.0], [-2.0]]")},
                {"delta", 0.75}};
}

const clt::harness::ResultRow* find_row(const clt::harness::ExperimentResult& result, long n,
                                        const std::string& estimator) {
    for (const auto& row : result.rows) {
        if (row.n == n && row.estimator == estimator) return &row;
    }
    return nullptr;
}

std::string body_of(const std::string& csv) {
    std::string body;
    std::stringstream ss(csv);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line[0] == '#') continue;
        body += line;
        body += '\n';
    }
    return body;
}

// ---- criterion implementations ------------------------------------------

bool poisson_correctness(std::string& detail) {
    clt::Rng rng(2024);
    double worst_residual = 0.0, worst_centering = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int s = 2 + static_cast<int>(rng.next_index(9));   // S <= 10
        const int d = 1 + static_cast<int>(rng.next_index(3));   // d <= 3
        const auto chain = test_support::random_chain(rng, s);
        std::vector<Vector> values;
        for (int i = 0; i < s; ++i) values.push_back(test_support::random_matrix(rng, d, 1, 2.0));
        const auto sol =
            clt::markov::solve_poisson(chain, clt::markov::RewardMap::from_vectors(values));
        worst_residual = std::max(worst_residual, sol.residual);
        worst_centering = std::max(
            worst_centering, (sol.pi.transpose() * sol.v).cwiseAbs().maxCoeff());
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max residual %.2e, max centering %.2e", worst_residual,
                  worst_centering);
    detail = buf;
    return worst_residual <= 1e-10 && worst_centering <= 1e-10;
}

bool sigma_cross_validation(std::string& detail) {
    const auto chain = clt::io::chain_from_json(two_state_chain_json());
    const auto reward = clt::io::reward_from_json(scalar_reward_json());
    const auto sol = clt::markov::solve_poisson(chain, reward);
    const auto acov = clt::markov::asymptotic_covariance(chain, sol);

    std::vector<Matrix> cond;
    for (int i = 0; i < 2; ++i) cond.push_back(clt::markov::conditional_covariance(chain, sol, i));
    const long n = 1000000;
    const auto path = clt::markov::simulate_chain(chain, n, 0, clt::Rng(777, {2}));
    double avg = 0.0;
    for (long k = 1; k <= n; ++k) {
        avg += cond[static_cast<std::size_t>(path[static_cast<std::size_t>(k - 1)])](0, 0);
    }
    avg /= static_cast<double>(n);
    const double rel = std::abs(avg - acov.sigma(0, 0)) / acov.sigma(0, 0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "exact %.6f vs MC %.6f (rel err %.3f%%)", acov.sigma(0, 0),
                  avg, 100.0 * rel);
    detail = buf;
    return rel <= 0.05;
}

bool lyapunov_ou(std::string& detail) {
    const Matrix sigma =
        clt::linalg::solve_lyapunov(-Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2));
    const double lyap_err = clt::linalg::hs_norm(sigma - Matrix::Identity(2, 2));

    const auto iso = clt::stein::ou_generator_check(-Matrix::Identity(2, 2),
                                                    2.0 * Matrix::Identity(2, 2), 100000, 31);
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    const auto aniso = clt::stein::ou_generator_check(a, Matrix::Identity(2, 2), 100000, 32);

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "lyapunov err %.2e; |estimate|/se max %.2f (iso), %.2f (aniso)", lyap_err,
                  iso.max_abs_standardized, aniso.max_abs_standardized);
    detail = buf;
    return lyap_err <= 1e-12 && iso.max_abs_standardized <= 5.0 &&
           aniso.max_abs_standardized <= 5.0;
}

// Shared by criteria 4 and 5: one mc-clt run at the pinned scale.
const clt::harness::ExperimentResult& mc_clt_run() {
    static const clt::harness::ExperimentResult result = [] {
        json config{{"kind", "mc-clt"},
                    {"chain", two_state_chain_json()},
                    {"reward", scalar_reward_json()},
                    {"n_grid", json::array({100, 1000, 10000})},
                    {"replicates", 5000},
                    {"seed", 20240808},
                    {"beta", 0.5},
                    {"ensemble_resamples", 64},
                    {"floor_resamples", 64}};
        return clt::harness::run_mc_clt(clt::harness::load_experiment_config(config, "."));
    }();
    return result;
}

bool markov_clt_rate(std::string& detail) {
    const auto& result = mc_clt_run();
    const double slope = result.rate.slope;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "floor-adjusted W1 = {%.4f, %.4f, %.4f}, fitted slope %.3f",
                  result.rate.values[0], result.rate.values[1], result.rate.values[2], slope);
    detail = buf;
    return slope >= -0.65 && slope <= -0.35;
}

bool bound_dominance(std::string& detail) {
    const auto& result = mc_clt_run();
    bool dominates = true;
    double c_log_sum = 0.0;
    std::vector<double> sched;
    for (long n : {100L, 1000L, 10000L}) {
        const auto* w1 = find_row(result, n, "w1_exact");
        const auto* fixed = find_row(result, n, "bound_fixed_beta");
        const auto* scheduled = find_row(result, n, "bound_scheduled_beta");
        if (w1 == nullptr || fixed == nullptr || scheduled == nullptr) {
            detail = "missing rows";
            return false;
        }
        dominates = dominates && fixed->value >= w1->value && scheduled->value >= w1->value;
        const double ratio =
            scheduled->value * std::sqrt(static_cast<double>(n)) / std::log(static_cast<double>(n));
        sched.push_back(ratio);
        c_log_sum += std::log(ratio);
    }
    const double c_fit = std::exp(c_log_sum / 3.0);
    double max_ratio = 0.0;
    for (double r : sched) max_ratio = std::max(max_ratio, r / c_fit);

    char buf[192];
    std::snprintf(buf, sizeof buf, "bound >= W1 at all n: %s; scheduled c = %.2f, spread %.2fx",
                  dominates ? "yes" : "NO", c_fit, max_ratio);
    detail = buf;
    return dominates && max_ratio <= 1.5;
}

bool td_clt(std::string& detail) {
    json config{{"kind", "td-clt"},
                {"model", td_model_json()},
                {"n_grid", json::array({1000, 10000, 100000})},
                {"replicates", 2000},
                {"seed", 60},
                {"ensemble_resamples", 8},
                {"floor_resamples", 16}};
    const auto result =
        clt::harness::run_td_clt(clt::harness::load_experiment_config(config, "."));

    const auto* cov = find_row(result, 100000, "cov_rel_hs_error");
    if (cov == nullptr) {
        detail = "missing covariance row";
        return false;
    }
    const bool cov_ok = cov->value <= 0.20;
    const bool decreasing = result.rate.values[0] > result.rate.values[1] &&
                            result.rate.values[1] > result.rate.values[2];
    char buf[224];
    std::snprintf(buf, sizeof buf,
                  "cov rel HS err %.3f at n=1e5; adjusted W1 = {%.4f, %.4f, %.4f}",
                  cov->value, result.rate.values[0], result.rate.values[1],
                  result.rate.values[2]);
    detail = buf;
    return cov_ok && decreasing;
}

bool upsilon_decay(std::string& detail) {
    Matrix a_bar(1, 1);
    a_bar << 1.0;
    const auto decay = clt::td::upsilon_decay_curve({200, 2000, 20000}, 0.7, a_bar);
    double sup = 0.0;
    for (double s : decay.sup_norms) sup = std::max(sup, s);
    char buf[160];
    std::snprintf(buf, sizeof buf, "slope %.3f (target -0.3 +- 0.15), sup ||Upsilon|| %.3f",
                  decay.report.slope, sup);
    detail = buf;
    return std::abs(decay.report.slope + 0.3) <= 0.15 && sup <= 10.0;
}

bool delta_moments(std::string& detail) {
    const auto model = clt::io::td_model_from_json(td_model_json());
    const auto report =
        clt::td::delta_moment_curve(model, {1000, 10000, 100000}, 500, 61, 1);
    char buf[160];
    std::snprintf(buf, sizeof buf, "E||Delta_k||^2 slope %.3f over k in [1e3, 1e5]",
                  report.slope);
    detail = buf;
    return report.slope <= -0.3;
}

bool stein_constants_criterion(std::string& detail) {
    const auto c = clt::stein::stein_constants(1, 0.5);
    // 30-digit oracle for 2^{3/2} (1 + 2 Gamma(1)) / Gamma(1/2).
    const double oracle_c1 = 4.78730736481719214;
    const bool c1_ok = std::abs(c.c1 - oracle_c1) <= 1e-9;
    const bool tilde_ok = std::abs(c.c1_tilde - (c.c1 + 4.0)) <= 1e-12;

    bool limit_ok = true;
    for (int d : {1, 2, 5, 10}) {
        const double beta = 1.0 - 1e-7;
        const auto cc = clt::stein::stein_constants(d, beta);
        limit_ok = limit_ok && std::abs((1.0 - beta) * cc.c1_tilde - 2.0) < 1e-5 &&
                   std::abs((1.0 - beta) * cc.c2_tilde - 2.0 * d) < 1e-5;
    }

    bool monotone = true;
    for (int d = 1; d <= 10 && monotone; ++d) {
        double prev1 = 0.0, prev2 = 0.0;
        for (int i = 1; i <= 9; ++i) {
            const auto cc = clt::stein::stein_constants(d, 0.1 * i);
            monotone = monotone && cc.c1_tilde > prev1 && cc.c2_tilde > prev2;
            prev1 = cc.c1_tilde;
            prev2 = cc.c2_tilde;
        }
    }
    for (int i = 1; i <= 9 && monotone; ++i) {
        double prev1 = 0.0, prev2 = 0.0;
        for (int d = 1; d <= 10; ++d) {
            const auto cc = clt::stein::stein_constants(d, 0.1 * i);
            monotone = monotone && cc.c1_tilde > prev1 && cc.c2_tilde > prev2;
            prev1 = cc.c1_tilde;
            prev2 = cc.c2_tilde;
        }
    }

    char buf[160];
    std::snprintf(buf, sizeof buf, "C1(1) = %.12f (|err| %.1e); limits and monotonicity %s",
                  c.c1, std::abs(c.c1 - oracle_c1),
                  (limit_ok && monotone) ? "hold" : "FAIL");
    detail = buf;
    return c1_ok && tilde_ok && limit_ok && monotone;
}

bool estimator_metric_suite(std::string& detail) {
    clt::Rng rng(404);
    bool axioms = true;
    for (int rep = 0; rep < 100 && axioms; ++rep) {
        auto sample = [&](long n) {
            Vector v(n);
            for (long i = 0; i < n; ++i) v(i) = rng.next_normal() * (1.0 + rng.next_double());
            return clt::stats::SampleSet::from_column(v);
        };
        const auto xs = sample(1 + static_cast<long>(rng.next_index(25)));
        const auto ys = sample(1 + static_cast<long>(rng.next_index(25)));
        const auto zs = sample(1 + static_cast<long>(rng.next_index(25)));
        const double xy = clt::stats::w1_exact_1d(xs, ys);
        axioms = axioms && xy == clt::stats::w1_exact_1d(ys, xs);
        axioms = axioms && clt::stats::w1_exact_1d(xs, xs) == 0.0;
        axioms = axioms &&
                 xy <= clt::stats::w1_exact_1d(xs, zs) + clt::stats::w1_exact_1d(zs, ys) + 1e-12;
    }

    const long n = 100000;
    const auto xs = clt::stats::gaussian_samples(Matrix::Identity(2, 2), n, 881);
    auto ys = clt::stats::gaussian_samples(Matrix::Identity(2, 2), n, 882);
    ys.points.col(0).array() += 1.0;
    const auto sliced = clt::stats::sliced_w1(xs, ys, 256, 883);
    const double target = 2.0 / M_PI;
    const bool shift_ok = std::abs(sliced.value - target) <= 3.0 * sliced.std_error + 5e-3;

    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "metric axioms on 100 triples: %s; sliced shift %.4f vs 2/pi %.4f (se %.4f)",
                  axioms ? "hold" : "FAIL", sliced.value, target, sliced.std_error);
    detail = buf;
    return axioms && shift_ok;
}

bool determinism(std::string& detail) {
    auto run_with_threads = [&](const json& config_json, int threads) {
        auto config = clt::harness::load_experiment_config(config_json, ".");
        config.threads = threads;
        return body_of(clt::harness::to_csv(clt::harness::run_experiment(config)));
    };

    json mc{{"kind", "mc-clt"},       {"chain", two_state_chain_json()},
            {"reward", scalar_reward_json()}, {"n_grid", json::array({100, 1000})},
            {"replicates", 500},      {"seed", 91},
            {"floor_resamples", 4}};
    json td{{"kind", "td-clt"},      {"model", td_model_json()},
            {"n_grid", json::array({200, 2000})}, {"replicates", 300},
            {"seed", 92},            {"floor_resamples", 4}};
    json dm{{"kind", "delta-moments"}, {"model", td_model_json()},
            {"n_grid", json::array({100, 1000})}, {"replicates", 200},
            {"seed", 93}};

    const bool mc_ok = run_with_threads(mc, 1) == run_with_threads(mc, 8);
    const bool td_ok = run_with_threads(td, 1) == run_with_threads(td, 8);
    const bool dm_ok = run_with_threads(dm, 1) == run_with_threads(dm, 8);
    detail = std::string("1 vs 8 threads byte-identical: mc-clt ") + (mc_ok ? "yes" : "NO") +
             ", td-clt " + (td_ok ? "yes" : "NO") + ", delta-moments " + (dm_ok ? "yes" : "NO");
    return mc_ok && td_ok && dm_ok;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<bool(std::string&)> check;
    };
    const std::vector<Criterion> criteria{
        {1, "Poisson correctness on random chains", poisson_correctness},
        {2, "Sigma_inf vs Monte Carlo cross-validation", sigma_cross_validation},
        {3, "Lyapunov solve and O-U generator check", lyapunov_ou},
        {4, "Markov CLT rate (exact W1, floor-adjusted)", markov_clt_rate},
        {5, "Martingale CLT bound dominates measured W1", bound_dominance},
        {6, "TD averaging CLT (covariance and distance decay)", td_clt},
        {7, "Upsilon averaged-norm decay", upsilon_decay},
        {8, "Delta second-moment decay", delta_moments},
        {9, "Stein constants", stein_constants_criterion},
        {10, "Wasserstein estimator metric suite", estimator_metric_suite},
        {11, "Thread-count determinism of CSV bodies", determinism},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.check(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %2d [%6.1fs] %s: %s\n", ok ? "PASS" : "FAIL", criterion.id,
                    secs, criterion.name, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
